#include "opal/dims.hpp"

#include <stdexcept>

#include "opal/arith.hpp"

namespace opal {

uint64_t psi_index(uint64_t N) {
  uint64_t r = 1;
  for (auto [p, e] : factor64(N)) {
    uint64_t pk = 1;
    for (int i = 1; i < e; ++i) pk *= p;
    r *= pk * (p + 1);
  }
  return r;
}

namespace {

// local factor of the cusp count product at p^r with conductor exponent s
uint64_t lambda_factor(int r, int s, uint64_t p) {
  if (2 * s <= r) {
    if (r % 2 == 0) {
      uint64_t q = 1;
      for (int i = 0; i < r / 2 - 1; ++i) q *= p;
      return q * p + q;
    }
    uint64_t q = 1;
    for (int i = 0; i < r / 2; ++i) q *= p;
    return 2 * q;
  }
  uint64_t q = 1;
  for (int i = 0; i < r - s; ++i) q *= p;
  return 2 * q;
}

// sum of chi(x) over roots of x^2 + c1 x + c0 mod N
int64_t elliptic_term(uint64_t N, const DirichletChar& chi, uint64_t c1, uint64_t c0) {
  int64_t s = 0;
  for (uint64_t x = 0; x < N; ++x)
    if ((x * x + c1 * x + c0) % N == 0) s += chi.eval((int64_t)x);
  if (N == 1) s = 1;
  return s;
}

void check_level(uint64_t N, const DirichletChar& chi) {
  if (N == 0 || N % 2 == 0 || !is_squarefree64(N))
    throw std::invalid_argument("dimension formulas: level must be odd and squarefree");
  if (chi.modulus != N) throw std::invalid_argument("dimension formulas: character modulus mismatch");
  if (!chi.is_trivial() && N % chi.conductor() != 0)
    throw std::invalid_argument("dimension formulas: conductor does not divide level");
}

}  // namespace

int64_t dim_sk(uint64_t N, const DirichletChar& chi, int k) {
  check_level(N, chi);
  if (k == 1) throw std::invalid_argument("dim_sk: weight 1 is not supported");
  if (k <= 0) return 0;
  if (!chi.parity_matches(k)) return 0;

  uint64_t s_cond = chi.conductor();
  int64_t lam = 1;
  for (auto [p, r] : factor64(N)) lam *= (int64_t)lambda_factor(r, valuation64(s_cond, p), p);

  int64_t e4 = elliptic_term(N, chi, 0, 1);
  int64_t e3 = elliptic_term(N, chi, 1, 1);
  int64_t g4_12 = (k % 2 != 0) ? 0 : (k % 4 == 0 ? 3 : -3);
  int64_t g3_12 = (k % 3 == 0) ? 4 : (k % 3 == 2 ? -4 : 0);

  // twelve times (dim S_k - dim M_{2-k}); must land on an integer
  int64_t t12 = (int64_t)(k - 1) * (int64_t)psi_index(N) - 6 * lam + g4_12 * e4 + g3_12 * e3;
  if (t12 % 12 != 0) throw std::logic_error("dim_sk: formula did not produce an integer");
  int64_t d = t12 / 12;
  if (k == 2 && chi.is_trivial()) d += 1;  // dim M_0 = 1 for the trivial character
  if (k >= 3 && d < 0) throw std::logic_error("dim_sk: negative dimension");
  if (d < 0) d = 0;
  return d;
}

int64_t dim_eis(uint64_t N, const DirichletChar& chi, int k) {
  check_level(N, chi);
  if (k == 1) throw std::invalid_argument("dim_eis: weight 1 is not supported");
  if (k <= 0) return 0;
  if (!chi.parity_matches(k)) return 0;

  // Only real primitive pairs can occur: a non-real component of chi1 at a
  // prime l would have to be cancelled by chi2 at the same l, forcing
  // l^2 | c1 c2 | N against squarefreeness.
  int64_t want_disc = chi.is_trivial() ? 1 : chi.disc;
  int64_t count = 0;
  for (uint64_t c1 : divisors64(N)) {
    for (uint64_t c2 : divisors64(N / c1)) {
      int64_t d1 = c1 == 1 ? 1 : disc_of_conductor(c1);
      int64_t d2 = c2 == 1 ? 1 : disc_of_conductor(c2);
      if (d1 * d2 != want_disc) continue;
      int64_t shifts = (int64_t)divisors64(N / (c1 * c2)).size();
      if (k == 2 && c1 == 1 && c2 == 1) shifts -= 1;  // weight 2 has no level 1 series
      count += shifts;
    }
  }
  return count;
}

int64_t dim_mk(uint64_t N, const DirichletChar& chi, int k) {
  check_level(N, chi);
  if (k < 0) return 0;
  if (k == 0) return chi.is_trivial() ? 1 : 0;
  if (k == 1) throw std::invalid_argument("dim_mk: weight 1 is not supported");
  return dim_sk(N, chi, k) + dim_eis(N, chi, k);
}

int64_t sturm_bound(uint64_t N, int k) {
  if (k <= 0) throw std::invalid_argument("sturm_bound: weight must be positive");
  uint64_t m = (uint64_t)k * psi_index(N);
  return (int64_t)((m + 11) / 12) + 1;
}

}  // namespace opal
