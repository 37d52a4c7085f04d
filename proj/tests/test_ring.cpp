#include "doctest.h"

#include "opal/arith.hpp"
#include "opal/ring.hpp"

#include <random>

using namespace opal;

namespace {

// Reference arithmetic through bigint for cross-checking the Montgomery path.
template <int NL>
void ring_matches_bigint(uint64_t p, int e, int iters) {
  MontCtx<NL> C(p, e);
  RingScope<NL> scope(C);
  std::mt19937_64 rng(12345);
  bigint n = C.n_big;
  for (int it = 0; it < iters; ++it) {
    bigint a = 0, b = 0;
    for (int i = 0; i < NL; ++i) {
      a = (a << 64) + rng();
      b = (b << 64) + rng();
    }
    a %= n;
    b %= n;
    Zq<NL> x = Zq<NL>::from_bigint(a), y = Zq<NL>::from_bigint(b);
    CHECK((x + y).lift() == (a + b) % n);
    CHECK((x - y).lift() == ((a - b) % n + n) % n);
    CHECK((x * y).lift() == (a * b) % n);
    CHECK((-x).lift() == (n - a % n) % n);
  }
}

}  // namespace

TEST_CASE("montgomery arithmetic matches bigint reference") {
  ring_matches_bigint<1>(5, 13, 200);
  ring_matches_bigint<2>(7, 36, 200);
  ring_matches_bigint<2>(11, 34, 200);
  ring_matches_bigint<3>(89, 22, 200);
}

TEST_CASE("round trips and constants") {
  MontCtx<2> C(5, 38);
  RingScope<2> scope(C);
  CHECK(Zq<2>::one().lift() == 1);
  CHECK(Zq<2>::zero().is_zero());
  CHECK(Zq<2>::from_int64(-3).lift() == C.n_big - 3);
  CHECK(Zq<2>::from_int64(-3).lift_balanced() == -3);
  Zq<2> t = Zq<2>::from_u64(123456789);
  CHECK(t.lift() == 123456789);
}

TEST_CASE("valuation, exact division, units") {
  MontCtx<2> C(5, 30);
  RingScope<2> scope(C);
  Zq<2> x = Zq<2>::from_bigint(pow_big(5, 7) * 12);
  CHECK(x.val() == 7);
  CHECK(x.div_exact_p(7).lift() == 12);
  CHECK_THROWS(x.div_exact_p(8));
  CHECK(!x.is_unit());
  CHECK(Zq<2>::from_u64(12).is_unit());
  CHECK(Zq<2>::zero().val() == 30);
}

TEST_CASE("inverse and pow") {
  MontCtx<3> C(89, 22);
  RingScope<3> scope(C);
  Zq<3> a = Zq<3>::from_u64(123457);
  CHECK((a.inv() * a).lift() == 1);
  CHECK_THROWS(Zq<3>::from_u64(89).inv());
  CHECK(a.pow(3).lift() == a.lift() * a.lift() * a.lift() % C.n_big);
}

TEST_CASE("limb width selection") {
  CHECK(limbs_needed(5, 13) == 1);
  CHECK(limbs_needed(5, 38) == 2);
  CHECK(limbs_needed(11, 34) == 2);
  CHECK(limbs_needed(89, 22) == 3);
}
