#include "doctest.h"

#include "opal/qseries.hpp"

#include <random>

using namespace opal;

namespace {

template <int NL>
QSeries<NL> random_series(int prec, std::mt19937_64& rng) {
  QSeries<NL> r(prec);
  for (int i = 0; i < prec; ++i) r[i] = Zq<NL>::from_u64(rng());
  return r;
}

}  // namespace

TEST_CASE("karatsuba agrees with schoolbook") {
  MontCtx<2> C(7, 36);
  RingScope<2> scope(C);
  std::mt19937_64 rng(7);
  for (int na : {1, 5, 24, 25, 64, 200, 611}) {
    for (int nb : {1, 7, 24, 100, 611}) {
      QSeries<2> a = random_series<2>(na, rng), b = random_series<2>(nb, rng);
      std::vector<Zq<2>> ref((size_t)(na + nb - 1));
      detail::mul_school(ref.data(), a.c.data(), na, b.c.data(), nb, C);
      std::vector<Zq<2>> got((size_t)(na + nb - 1));
      detail::mul_full(got.data(), a.c.data(), na, b.c.data(), nb, C);
      bool ok = true;
      for (size_t i = 0; i < ref.size(); ++i) ok = ok && ref[i] == got[i];
      CHECK(ok);
    }
  }
}

TEST_CASE("series algebra") {
  MontCtx<1> C(5, 13);
  RingScope<1> scope(C);
  std::mt19937_64 rng(11);
  QSeries<1> a = random_series<1>(300, rng), b = random_series<1>(300, rng),
             c = random_series<1>(300, rng);
  auto ab_c = series_mul(series_mul(a, b, 300), c, 300);
  auto a_bc = series_mul(a, series_mul(b, c, 300), 300);
  CHECK(ab_c.c == a_bc.c);
  auto dist = series_mul(series_add(a, b), c, 300);
  auto dist2 = series_add(series_mul(a, c, 300), series_mul(b, c, 300));
  CHECK(dist.c == dist2.c);
}

TEST_CASE("series inverse") {
  MontCtx<2> C(5, 30);
  RingScope<2> scope(C);
  std::mt19937_64 rng(3);
  QSeries<2> a = random_series<2>(257, rng);
  a[0] = Zq<2>::from_u64(1) + Zq<2>::from_u64(5) * a[0];  // force unit constant
  auto ai = series_inverse(a, 257);
  auto prod = series_mul(a, ai, 257);
  CHECK(prod[0].lift() == 1);
  bool rest_zero = true;
  for (int i = 1; i < 257; ++i) rest_zero = rest_zero && prod[i].is_zero();
  CHECK(rest_zero);
  QSeries<2> bad = a;
  bad[0] = Zq<2>::from_u64(5);
  CHECK_THROWS(series_inverse(bad, 257));
}

TEST_CASE("U_p, V_p, depletion identities") {
  MontCtx<1> C(7, 9);
  RingScope<1> scope(C);
  std::mt19937_64 rng(17);
  QSeries<1> a = random_series<1>(210, rng);
  // U_p V_p = id
  auto uv = atkin_up(frobenius_vp(a, 7, 210), 7);
  for (int i = 0; i < uv.prec() && i < a.prec(); ++i) CHECK(uv[i] == a[i]);
  // depletion = (1 - V_p U_p), and U_p kills depleted series
  auto dep = p_deplete(a, 7);
  auto vu = frobenius_vp(atkin_up(a, 7), 7, 210);
  for (int i = 0; i < 210; ++i) CHECK(dep[i] == a[i] - vu[i]);
  auto udep = atkin_up(dep, 7);
  CHECK(udep.is_zero());
}

TEST_CASE("d_pow and d_inv are mutually inverse on depleted series") {
  MontCtx<2> C(5, 25);
  RingScope<2> scope(C);
  std::mt19937_64 rng(23);
  QSeries<2> a = p_deplete(random_series<2>(180, rng), 5);
  auto d2 = d_pow(a, 2);
  auto back = d_inv(d2, 2, 5);
  CHECK(back.c == a.c);
  auto inv1 = d_inv(a, 1, 5);
  auto fwd = d_pow(inv1, 1);
  CHECK(fwd.c == a.c);
  QSeries<2> notdep = a;
  notdep[5] = Zq<2>::one();
  CHECK_THROWS(d_inv(notdep, 1, 5));
}

TEST_CASE("stabilization roots") {
  MontCtx<2> C(5, 30);
  RingScope<2> scope(C);
  // 57a at p = 5: a_5 = -3, trivial character, weight 2
  auto [alpha, beta] = unit_root_stabilize(Zq<2>::from_int64(-3), 1, 2);
  CHECK((alpha * beta).lift() == 5);
  CHECK((alpha + beta).lift_balanced() == -3);
  CHECK(alpha.is_unit());
  CHECK(beta.val() == 1);
  // p | N: eigenvalue passes through
  auto [a2, b2] = unit_root_stabilize(Zq<2>::from_int64(-1), 0, 2);
  CHECK(a2.lift_balanced() == -1);
  CHECK(b2.is_zero());
  // non-ordinary input rejected
  CHECK_THROWS(unit_root_stabilize(Zq<2>::from_int64(5), 1, 2));
}

TEST_CASE("p-stabilized form is a U_p eigenform") {
  MontCtx<2> C(5, 20);
  RingScope<2> scope(C);
  // multiplicative toy series with a_5 = -3, a_n for n <= 100 built by hand:
  // use a geometric-flavoured eigenform surrogate: a_n = n-th coefficient of
  // an actual Hecke-multiplicative sequence is exercised later with real
  // fixtures; here check the algebraic identity U_p(f - beta V f) =
  // (U f) - beta f directly on random input.
  std::mt19937_64 rng(29);
  QSeries<2> f(500);
  for (int i = 0; i < 500; ++i) f[i] = Zq<2>::from_u64(rng());
  Zq<2> beta = Zq<2>::from_u64(5) * Zq<2>::from_u64(rng());
  auto stab = p_stabilized_form(f, beta, 5, 500);
  auto lhs = atkin_up(stab, 5);
  auto uf = atkin_up(f, 5);
  for (int i = 0; i < lhs.prec(); ++i) CHECK(lhs[i] == uf[i] - beta * f[i]);
}
