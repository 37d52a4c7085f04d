#pragma once

// Elliptic curves over Q in long Weierstrass form and the q-expansions of
// their weight 2 newforms via point counting. Good primes use a quadratic
// character sum in O(p); bad primes (all small here) count smooth points
// directly.

#include <cstdint>
#include <string>
#include <vector>

namespace opal {

struct EllCurve {
  std::string label;
  uint64_t conductor = 0;
  int64_t a1 = 0, a2 = 0, a3 = 0, a4 = 0, a6 = 0;

  int64_t b2() const { return a1 * a1 + 4 * a2; }
  int64_t b4() const { return 2 * a4 + a1 * a3; }
  int64_t b6() const { return a3 * a3 + 4 * a6; }
  int64_t b8() const { return a1 * a1 * a6 + 4 * a2 * a6 - a1 * a3 * a4 + a2 * a3 * a3 - a4 * a4; }
  int64_t disc() const {
    int64_t B2 = b2(), B4 = b4(), B6 = b6(), B8 = b8();
    return -B2 * B2 * B8 - 8 * B4 * B4 * B4 - 27 * B6 * B6 + 9 * B2 * B4 * B6;
  }
  bool good_at(uint64_t p) const {
    int64_t d = disc() % (int64_t)p;
    return d != 0;
  }
};

// a_p of the attached newform; p need not be good
int64_t curve_ap(const EllCurve& E, uint64_t p);

// #E(F_p) including the point at infinity; requires good reduction
uint64_t curve_order_mod_p(const EllCurve& E, uint64_t p);

// q-expansion coefficients a_0 .. a_{nmax-1} (a_0 = 0, a_1 = 1)
std::vector<int64_t> curve_an(const EllCurve& E, int nmax);

// Hecke recursion fill from prime coefficients: ap[p] for primes p < nmax,
// eps(p) = 0 at primes dividing the level, 1 otherwise, weight k.
std::vector<int64_t> hecke_an_from_ap(const std::vector<int64_t>& ap_at_primes, uint64_t level,
                                      int k, int nmax);

}  // namespace opal
