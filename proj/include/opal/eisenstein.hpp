#pragma once

// Eisenstein q-expansions attached to pairs of real primitive characters,
// normalized to integral coefficients (the constant term's denominator is
// cleared, so the series generates the integral span of the classical
// normalization). Coefficients land in the active Z/p^e ring.

#include <stdexcept>

#include "opal/bernoulli.hpp"
#include "opal/chars.hpp"
#include "opal/qseries.hpp"

namespace opal {

template <int NL>
Zq<NL> zq_from_rational(const bigrat& x) {
  bigint num = boost::multiprecision::numerator(x);
  bigint den = boost::multiprecision::denominator(x);
  Zq<NL> d = Zq<NL>::from_bigint(den);
  if (!d.is_unit()) throw std::domain_error("zq_from_rational: denominator not a p-adic unit");
  return Zq<NL>::from_bigint(num) * d.inv();
}

// E_k(chi1, chi2): a_n = sum_{d|n} chi1(n/d) chi2(d) d^{k-1} for n >= 1,
// a_0 = -B_{k,chi2}/(2k) when chi1 is trivial and 0 otherwise, then scaled
// by the denominator of a_0. Both characters must be primitive (modulus =
// conductor) and the product parity must match k. Weight 2 with both
// characters trivial is rejected (not a modular form); see e2_shifted.
template <int NL>
QSeries<NL> eisenstein_qexp(int k, const DirichletChar& chi1, const DirichletChar& chi2,
                            int qprec) {
  if (k < 1) throw std::invalid_argument("eisenstein_qexp: weight must be positive");
  if (chi1.modulus != chi1.conductor() || chi2.modulus != chi2.conductor())
    throw std::invalid_argument("eisenstein_qexp: characters must be primitive");
  bool odd = chi1.is_odd() != chi2.is_odd();
  if (odd != (k % 2 != 0))
    throw std::invalid_argument("eisenstein_qexp: character parity does not match the weight");
  if (k == 2 && chi1.is_trivial() && chi2.is_trivial())
    throw std::invalid_argument("eisenstein_qexp: weight 2 needs a level shift, use e2_shifted");
  if (qprec < 1) throw std::invalid_argument("eisenstein_qexp: empty precision");

  QSeries<NL> f;
  f.c.assign((size_t)qprec, Zq<NL>::zero());

  Zq<NL> scale = Zq<NL>::one();
  if (chi1.is_trivial()) {
    bigrat a0 = -bernoulli_chi(k, chi2.disc) / (2 * k);
    bigint num = boost::multiprecision::numerator(a0);
    bigint den = boost::multiprecision::denominator(a0);
    // scale by +-den so the constant term is |num|; den need not be a unit
    // (that is the E_{p-1} = 1 mod p phenomenon) since scaling multiplies
    if (num < 0) {
      num = -num;
      den = -den;
    }
    f.c[0] = Zq<NL>::from_bigint(num);
    scale = Zq<NL>::from_bigint(den);
  }

  for (int64_t d = 1; d < qprec; ++d) {
    int c2 = chi2.eval(d);
    if (c2 == 0) continue;
    Zq<NL> w = Zq<NL>::from_u64((uint64_t)d).pow(k - 1) * scale;
    if (c2 < 0) w = -w;
    for (int64_t n = d; n < qprec; n += d) {
      int c1 = chi1.eval(n / d);
      if (c1 == 0) continue;
      if (c1 > 0)
        f.c[(size_t)n] += w;
      else
        f.c[(size_t)n] -= w;
    }
  }
  return f;
}

// E_{p-1} of level 1 with constant term 1; congruent to 1 mod p.
template <int NL>
QSeries<NL> eis_weight_pm1(uint64_t p, int qprec) {
  if (p < 5) throw std::invalid_argument("eis_weight_pm1: need p >= 5");
  int k = (int)p - 1;
  bigrat c = bigrat(-2 * (int64_t)k) / bernoulli_chi(k, 0);
  Zq<NL> cz = zq_from_rational<NL>(c);
  if (cz.val() < 1) throw std::logic_error("eis_weight_pm1: coefficient should vanish mod p");
  QSeries<NL> f;
  f.c.assign((size_t)qprec, Zq<NL>::zero());
  f.c[0] = Zq<NL>::one();
  for (int64_t d = 1; d < qprec; ++d) {
    Zq<NL> w = Zq<NL>::from_u64((uint64_t)d).pow(k - 1) * cz;
    for (int64_t n = d; n < qprec; n += d) f.c[(size_t)n] += w;
  }
  return f;
}

// 24 (E_2(q) - t E_2(q^t)) for t > 1: a_0 = t - 1, a_n = 24 (sigma_1(n) - t sigma_1(n/t)).
template <int NL>
QSeries<NL> e2_shifted(uint64_t t, int qprec) {
  if (t < 2) throw std::invalid_argument("e2_shifted: shift must exceed 1");
  QSeries<NL> f;
  f.c.assign((size_t)qprec, Zq<NL>::zero());
  f.c[0] = Zq<NL>::from_u64(t - 1);
  Zq<NL> k24 = Zq<NL>::from_u64(24);
  Zq<NL> kt = Zq<NL>::from_u64(t);
  for (int64_t d = 1; d < qprec; ++d) {
    Zq<NL> w = k24 * Zq<NL>::from_u64((uint64_t)d);
    for (int64_t n = d; n < qprec; n += d) {
      f.c[(size_t)n] += w;
      int64_t nt = n * (int64_t)t;
      if (nt < qprec) f.c[(size_t)nt] -= w * kt;
    }
  }
  return f;
}

}  // namespace opal
