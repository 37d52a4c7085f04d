#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "doctest.h"
#include "opal/arith.hpp"
#include "opal/chars.hpp"
#include "opal/dims.hpp"
#include "opal/modp.hpp"
#include "opal/newform.hpp"
#include "opal/pool.hpp"
#include "opal/ring.hpp"

using namespace opal;

namespace {

const std::string kData = std::string(OPAL_DATA_DIR) + "/newforms/";

Newform load(const std::string& name) { return read_newform(kData + name + ".nf"); }

// sum of d^k over divisors d of n, by trial division
int64_t sigma_pow(int n, int k) {
  int64_t s = 0;
  for (int64_t d = 1; d <= n; ++d) {
    if (n % d != 0) continue;
    int64_t t = 1;
    for (int i = 0; i < k; ++i) t *= d;
    s += t;
  }
  return s;
}

bigint mod_norm(bigint x, const bigint& m) {
  x %= m;
  if (x < 0) x += m;
  return x;
}

}  // namespace

TEST_CASE("echelon rank over F_p certifies independence") {
  ModpEchelon ech(5, 4);
  CHECK(ech.absorb({1, 2, 3, 4}));
  CHECK(ech.absorb({0, 1, 1, 1}));
  // 2 r1 + r2 = (2, 5, 7, 9) = (2, 0, 2, 4) mod 5
  CHECK_FALSE(ech.absorb({2, 0, 2, 4}));
  CHECK(ech.rank() == 2);
  CHECK(ech.absorb({0, 0, 0, 2}));
  CHECK(ech.rank() == 3);
  CHECK_FALSE(ech.absorb({0, 0, 0, 0}));
  // r1 - 2 r2 hits a fresh pivot column only after the first two cancel
  CHECK(ech.absorb({1, 0, 0, 0}));
  CHECK(ech.rank() == 4);
  CHECK_FALSE(ech.absorb({4, 3, 2, 1}));
}

TEST_CASE("mod-p convolution by hand") {
  // (1 + 2q + 3q^2)(4 + q^2) = 4 + 8q + 13q^2 + ...
  ModpRow a = {1, 2, 3};
  ModpRow b = {4, 0, 1};
  ModpRow r = modp_mul(a, b, 3, 7);
  REQUIRE(r.size() == 3);
  CHECK(r[0] == 4);
  CHECK(r[1] == 1);
  CHECK(r[2] == 6);
}

TEST_CASE("level one pool is the two Eisenstein generators") {
  RingScope<1> R(5, 8);
  const bigint m = pow_big(5, 8);
  auto pool = build_pool<1>(1, trivial_char(1), 6, 4, 40, {});
  CHECK(pool.total() == 2);
  REQUIRE(pool.count(4, 0) == 1);
  REQUIRE(pool.count(6, 0) == 1);
  CHECK(pool.count(2, 0) == 0);
  CHECK(pool.count(3, 0) == 0);
  CHECK(pool.count(5, 0) == 0);

  const auto& e4 = pool.at(4, 0, 0);
  CHECK(e4.name == "E4(1,1)");
  CHECK(e4.full.prec() == 40);
  for (int n = 0; n < 40; ++n) {
    bigint want = n == 0 ? bigint(1) : bigint(240) * sigma_pow(n, 3);
    CHECK(e4.full[n].lift() == mod_norm(want, m));
  }
  const auto& e6 = pool.at(6, 0, 0);
  CHECK(e6.name == "E6(1,1)");
  for (int n = 0; n < 40; ++n) {
    bigint want = n == 0 ? bigint(1) : bigint(-504) * sigma_pow(n, 5);
    CHECK(e6.full[n].lift() == mod_norm(want, m));
  }
  CHECK(e4.modp.size() == 4);
  CHECK(e4.modp[0] == 1);
  CHECK(e4.modp[1] == 0);  // 240 = 0 mod 5
  CHECK(e6.modp[1] == (504 * 4) % 5);
}

TEST_CASE("weight two at 57 combines shifted Eisenstein and ingested forms") {
  RingScope<1> R(5, 8);
  std::vector<Newform> extra = {load("57a"), load("57b"), load("57c"), load("19a")};
  REQUIRE(dim_mk(57, trivial_char(57), 2) == 8);
  auto pool = build_pool<1>(57, trivial_char(57), 2, sturm_bound(57, 2), 120, extra);
  REQUIRE(pool.count(2, 0) == 8);
  // 57c falls into the mod 5 span of the Eisenstein shifts, so the raw list
  // stops at rank 7 and saturation supplies the missing lattice vector
  const char* names[] = {"E2[3]", "E2[19]", "E2[57]", "57a", "57b", "19a", "19a[3]", "57c'"};
  for (size_t i = 0; i < 8; ++i) CHECK(pool.at(2, 0, i).name == names[i]);

  // a level shift moves coefficient n to slot 3n and leaves the rest empty
  const auto& sh = pool.at(2, 0, 6);
  const Newform& g = extra[3];
  CHECK(sh.full[0].is_zero());
  for (int n = 1; n < 120; ++n) {
    if (n % 3 == 0)
      CHECK(sh.full[n].lift_balanced() == g.an[(size_t)(n / 3)]);
    else
      CHECK(sh.full[n].is_zero());
  }
  // the stored mod-p rows are the reductions of the stored full series
  for (size_t i = 0; i < 8; ++i) {
    const auto& el = pool.at(2, 0, i);
    CHECK(el.ploss == (i == 7 ? 1 : 0));
    for (int n = 0; n < pool.qprec_modp; ++n)
      CHECK(bigint(el.modp[n]) == el.full[n].lift() % 5);
  }
}

TEST_CASE("saturation divides the Eisenstein congruence of 57c by five") {
  RingScope<1> R(5, 8);
  const bigint mod7 = pow_big(5, 7);
  std::vector<Newform> extra = {load("57a"), load("57b"), load("57c"), load("19a")};
  auto pool = build_pool<1>(57, trivial_char(57), 2, sturm_bound(57, 2), 120, extra);
  const auto& sat = pool.at(2, 0, 7);
  REQUIRE(sat.name == "57c'");

  // independent route: E2[3] + 4 E2[19] + E2[57] + 57c = 0 mod 5 in every
  // coefficient, so (57c - 4 E2[3] - E2[19] - 4 E2[57]) / 5 is integral;
  // the shifted series have a_0 = t - 1 and a_n = 24(sigma_1(n) - t sigma_1(n/t))
  const Newform& c57 = extra[2];
  for (int n = 0; n < 120; ++n) {
    auto e2t = [&](int t) {
      int64_t v = n == 0 ? t - 1 : 24 * sigma_pow(n, 1);
      if (n > 0 && n % t == 0) v -= 24 * (int64_t)t * sigma_pow(n / t, 1);
      return v;
    };
    int64_t num = (n == 0 ? 0 : c57.an[(size_t)n]) - 4 * e2t(3) - e2t(19) - 4 * e2t(57);
    REQUIRE(num % 5 == 0);
    CHECK(mod_norm(bigint(num / 5), mod7) == sat.full[n].lift() % mod7);
  }
}

TEST_CASE("tracked absorption reports the combination over the originals") {
  ModpEchelon ech(7, 3, true);
  std::vector<uint32_t> combo;
  CHECK(ech.absorb({1, 2, 3}, combo));
  CHECK(ech.absorb({0, 1, 1}, combo));
  // 2 (1,2,3) = (2,4,6)
  CHECK_FALSE(ech.absorb({2, 4, 6}, combo));
  REQUIRE(combo.size() == 2);
  CHECK(combo[0] == 2);
  CHECK(combo[1] == 0);
  // 3 (1,2,3) + 4 (0,1,1) = (3,10,13) = (3,3,6) mod 7
  CHECK_FALSE(ech.absorb({3, 3, 6}, combo));
  REQUIRE(combo.size() == 2);
  CHECK(combo[0] == 3);
  CHECK(combo[1] == 4);
  // combinations stay correct after later unnormalized accepts
  CHECK(ech.absorb({0, 0, 5}, combo));
  CHECK_FALSE(ech.absorb({1, 2, 1}, combo));
  REQUIRE(combo.size() == 3);
  CHECK(combo[0] == 1);
  CHECK(combo[1] == 0);
  CHECK((combo[2] * 5) % 7 == 5);  // coefficient over the original (0,0,5)
  ModpEchelon plain(7, 3);
  std::vector<uint32_t> unused;
  CHECK_THROWS_AS(plain.absorb({1, 0, 0}, unused), std::logic_error);
}

TEST_CASE("pool reaches every classical dimension up to the weight bound") {
  RingScope<1> R(5, 8);
  std::vector<Newform> extra = {load("57a"), load("57b"), load("57c"), load("19a")};
  auto pool = build_pool<1>(57, trivial_char(57), 6, sturm_bound(57, 6), 150, extra);
  size_t want_total = 0;
  for (int b = 2; b <= 6; ++b) {
    int64_t d = dim_mk(57, trivial_char(57), b);
    CHECK((int64_t)pool.count(b, 0) == d);
    want_total += (size_t)d;
  }
  CHECK(pool.total() == want_total);
  // independence is re-certifiable from the stored rows alone
  for (int b = 2; b <= 6; b += 2) {
    ModpEchelon ech(5, pool.qprec_modp);
    for (size_t i = 0; i < pool.count(b, 0); ++i) {
      ModpRow row = pool.at(b, 0, i).modp;
      CHECK(ech.absorb(std::move(row)));
    }
    CHECK(ech.rank() == (int)pool.count(b, 0));
  }
  // every saturation spent exactly one digit and each space needed at most
  // one division past the product span
  CHECK(pool.max_ploss() == 1);
  std::vector<std::string> lost;
  for (size_t i = 0; i < pool.count(4, 0); ++i)
    if (pool.at(4, 0, i).ploss > 0) lost.push_back(pool.at(4, 0, i).name);
  CHECK(lost == std::vector<std::string>{"E2[3]*57c'", "E2[19]*57c'", "E4(1,1)[19]'"});
}

TEST_CASE("missing cusp forms are reported, not papered over") {
  RingScope<1> R(5, 8);
  try {
    build_pool<1>(57, trivial_char(57), 2, sturm_bound(57, 2), 60, {});
    FAIL("deficient pool did not throw");
  } catch (const PoolDeficiency& ex) {
    REQUIRE(ex.items.size() == 1);
    CHECK(ex.items[0].b == 2);
    CHECK(ex.items[0].disc == 0);
    CHECK(ex.items[0].got == 3);  // the three shifted Eisenstein series
    CHECK(ex.items[0].want == 8);
    std::string msg = ex.what();
    CHECK(msg.find("weight 2") != std::string::npos);
    CHECK(msg.find("3 of 8") != std::string::npos);
  }
}

TEST_CASE("odd character contributes the weight one Eisenstein helper") {
  RingScope<1> R(7, 6);
  auto pool = build_pool<1>(43, quadratic_char(-43, 43), 1, 1, 60, {});
  CHECK(pool.total() == 1);
  REQUIRE(pool.count(1, -43) == 1);
  const auto& h = pool.at(1, -43, 0);
  CHECK(h.name == "E1(1,-43)");
  // 2 a_0 = 1 cleared to a_0 = 1 with the tail doubled: a_n = 2 sum_{d|n} chi(d)
  CHECK(h.full[0].lift() == 1);
  for (int n = 1; n < 60; ++n) {
    int64_t s = 0;
    for (int64_t d = 1; d <= n; ++d)
      if (n % d == 0) s += kronecker64(-43, d);
    CHECK(h.full[n].lift_balanced() == 2 * s);
  }
}

TEST_CASE("under an odd character the pool fills odd weights") {
  RingScope<1> R(7, 6);
  DirichletChar chi = quadratic_char(-43, 43);
  // without quaternionic basis files weight 2 cannot be completed at 43
  try {
    build_pool<1>(43, chi, 2, sturm_bound(43, 2), 60, {load("43a")});
    FAIL("deficient pool did not throw");
  } catch (const PoolDeficiency& ex) {
    REQUIRE(ex.items.size() == 1);
    CHECK(ex.items[0].b == 2);
    CHECK(ex.items[0].disc == 0);
    CHECK(ex.items[0].want == dim_mk(43, trivial_char(43), 2));
    CHECK(ex.items[0].got < ex.items[0].want);
  }
}

TEST_CASE("a fixture too short for the requested precision is an error") {
  RingScope<1> R(5, 8);
  std::vector<Newform> extra = {load("57a"), load("57b"), load("57c"), load("19a")};
  extra[0].an.resize(50);
  try {
    build_pool<1>(57, trivial_char(57), 2, sturm_bound(57, 2), 120, extra);
    FAIL("short fixture did not throw");
  } catch (const std::runtime_error& ex) {
    CHECK(std::string(ex.what()).find("57a") != std::string::npos);
  }
}

TEST_CASE("qprec below the Sturm bound of the top weight is rejected") {
  RingScope<1> R(5, 8);
  CHECK_THROWS_AS(build_pool<1>(57, trivial_char(57), 6, 10, 60, {}), std::invalid_argument);
  CHECK_THROWS_AS(build_pool<1>(57, trivial_char(57), 2, 30, 20, {}), std::invalid_argument);
}

TEST_CASE("tame level one pool at a large prime") {
  RingScope<1> R(89, 3);
  auto pool = build_pool<1>(1, trivial_char(1), 6, 2, 30, {});
  CHECK(pool.total() == 2);
  CHECK(pool.count(4, 0) == 1);
  CHECK(pool.count(6, 0) == 1);
}
