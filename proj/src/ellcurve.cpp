#include "opal/ellcurve.hpp"

#include <cmath>
#include <stdexcept>

#include "opal/arith.hpp"

namespace opal {

namespace {

inline int64_t md(int64_t v, int64_t p) {
  int64_t r = v % p;
  return r < 0 ? r + p : r;
}

// smooth affine point count by exhaustion; p must be small
uint64_t smooth_affine_count(const EllCurve& E, int64_t p, bool& saw_singular) {
  uint64_t s = 0;
  saw_singular = false;
  for (int64_t x = 0; x < p; ++x) {
    int64_t rhs = md(((x + E.a2) * x + E.a4) * x + E.a6, p);
    for (int64_t y = 0; y < p; ++y) {
      int64_t lhs = md((y + E.a1 * x + E.a3) * y, p);
      if (lhs != rhs) continue;
      int64_t fy = md(2 * y + E.a1 * x + E.a3, p);
      int64_t fx = md(E.a1 * y - (3 * x * x + 2 * E.a2 * x + E.a4), p);
      if (fy == 0 && fx == 0)
        saw_singular = true;
      else
        ++s;
    }
  }
  return s;
}

}  // namespace

int64_t curve_ap(const EllCurve& E, uint64_t p) {
  int64_t sp = (int64_t)p;
  if (E.good_at(p) && p > 2) {
    // a_p = -sum_x chi(D(x)) with D the completed square discriminant
    std::vector<int8_t> chi(p, -1);
    chi[0] = 0;
    for (int64_t t = 1; t < sp; ++t) chi[(uint64_t)((t * t) % sp)] = 1;
    int64_t sum = 0;
    int64_t a1 = md(E.a1, sp), a2 = md(E.a2, sp), a3 = md(E.a3, sp), a4 = md(E.a4, sp),
            a6 = md(E.a6, sp);
    for (int64_t x = 0; x < sp; ++x) {
      int64_t t = md(a1 * x + a3, sp);
      int64_t d = md(t * t + 4 * (((x + a2) * x % sp + a4) * x % sp + a6), sp);
      sum += chi[(uint64_t)d];
    }
    return -sum;
  }
  if (p > 4096) throw std::invalid_argument("curve_ap: bad prime too large for exhaustion");
  bool saw_singular = false;
  uint64_t s = smooth_affine_count(E, sp, saw_singular);
  bool good = E.good_at(p) && !saw_singular;
  return good ? sp - (int64_t)s : sp - (int64_t)(s + 1);
}

uint64_t curve_order_mod_p(const EllCurve& E, uint64_t p) {
  if (!E.good_at(p)) throw std::invalid_argument("curve_order_mod_p: bad reduction");
  int64_t ap = curve_ap(E, p);
  uint64_t order = (uint64_t)((int64_t)p + 1 - ap);
  if ((__int128)ap * ap > (__int128)4 * p)
    throw std::logic_error("curve_order_mod_p: Hasse bound violated");
  return order;
}

std::vector<int64_t> curve_an(const EllCurve& E, int nmax) {
  std::vector<int64_t> ap(nmax, 0);
  for (int64_t p = 2; p < nmax; ++p) {
    if (!is_prime_u64((uint64_t)p)) continue;
    ap[p] = curve_ap(E, (uint64_t)p);
  }
  return hecke_an_from_ap(ap, E.conductor, 2, nmax);
}

std::vector<int64_t> hecke_an_from_ap(const std::vector<int64_t>& ap_at_primes, uint64_t level,
                                      int k, int nmax) {
  if ((int)ap_at_primes.size() < nmax)
    throw std::invalid_argument("hecke_an_from_ap: prime table too short");
  std::vector<int32_t> spf(nmax, 0);
  for (int64_t i = 2; i < nmax; ++i) {
    if (spf[i] != 0) continue;
    for (int64_t j = i; j < nmax; j += i)
      if (spf[j] == 0) spf[j] = (int32_t)i;
  }
  std::vector<int64_t> a(nmax, 0);
  if (nmax > 1) a[1] = 1;
  for (int64_t n = 2; n < nmax; ++n) {
    int64_t p = spf[n];
    int64_t q = p, m = n / p;
    while (m % p == 0) {
      q *= p;
      m /= p;
    }
    if (m > 1) {
      a[n] = a[q] * a[m];
      continue;
    }
    // n = p^r: recursion a_{p^r} = a_p a_{p^{r-1}} - eps p^{k-1} a_{p^{r-2}}
    if (q == p) {
      a[n] = ap_at_primes[p];
      continue;
    }
    int64_t pk = 1;
    for (int i = 1; i < k; ++i) pk *= p;
    int64_t eps = level % (uint64_t)p == 0 ? 0 : 1;
    a[n] = ap_at_primes[p] * a[n / p] - eps * pk * a[n / p / p];
  }
  return a;
}

}  // namespace opal
