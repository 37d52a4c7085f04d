#pragma once

// Truncated power series over Z/p^e: the working representation of
// q-expansions. A series of precision s is known modulo q^s; coefficient
// reads past the precision are errors, never implicit zeros.

#include <algorithm>
#include <stdexcept>
#include <utility>
#include <vector>

#include "opal/ring.hpp"

namespace opal {

template <int NL>
struct QSeries {
  std::vector<Zq<NL>> c;

  QSeries() = default;
  explicit QSeries(int prec) : c((size_t)prec) {}

  int prec() const { return (int)c.size(); }
  Zq<NL>& operator[](int n) { return c[(size_t)n]; }
  const Zq<NL>& operator[](int n) const { return c[(size_t)n]; }
  Zq<NL> coeff(int n) const {
    if (n < 0) return Zq<NL>::zero();
    if (n >= prec()) throw std::out_of_range("QSeries::coeff: beyond q-adic precision");
    return c[(size_t)n];
  }
  void truncate(int prec) {
    if (prec < (int)c.size()) c.resize((size_t)prec);
  }
  bool is_zero() const {
    for (auto& x : c)
      if (!x.is_zero()) return false;
    return true;
  }
};

// ---- multiplication kernel -------------------------------------------------

namespace detail {

inline constexpr int kKaratsubaThreshold = 24;

template <int NL>
void mul_school(Zq<NL>* r, const Zq<NL>* a, int na, const Zq<NL>* b, int nb, const MontCtx<NL>& C) {
  for (int i = 0; i < na; ++i) {
    const limbs<NL> ai = a[i].v;
    if (ai.is_zero()) continue;
    for (int j = 0; j < nb; ++j) {
      r[i + j].v = mont_add(r[i + j].v, mont_mul(ai, b[j].v, C), C);
    }
  }
}

// Equal-length Karatsuba, assigns the full product r[0 .. 2n-2].
template <int NL>
void kara_eq(Zq<NL>* r, const Zq<NL>* a, const Zq<NL>* b, int n, Zq<NL>* ws, const MontCtx<NL>& C) {
  if (n <= kKaratsubaThreshold) {
    for (int i = 0; i < 2 * n - 1; ++i) r[i] = Zq<NL>();
    mul_school(r, a, n, b, n, C);
    return;
  }
  const int h = n / 2, n1 = n - h;
  kara_eq(r, a, b, h, ws, C);
  r[2 * h - 1] = Zq<NL>();
  kara_eq(r + 2 * h, a + h, b + h, n1, ws, C);
  Zq<NL>* sa = ws;
  Zq<NL>* sb = ws + n1;
  Zq<NL>* m = ws + 2 * n1;
  for (int i = 0; i < n1; ++i) {
    sa[i] = a[h + i];
    sb[i] = b[h + i];
  }
  for (int i = 0; i < h; ++i) {
    sa[i] += a[i];
    sb[i] += b[i];
  }
  kara_eq(m, sa, sb, n1, ws + 4 * n1 - 1, C);
  // m -= a0 b0 + a1 b1, then fold into the middle
  for (int i = 0; i < 2 * h - 1; ++i) m[i] -= r[i];
  for (int i = 0; i < 2 * n1 - 1; ++i) m[i] -= r[2 * h + i];
  for (int i = 0; i < 2 * n1 - 1; ++i) r[h + i] += m[i];
}

inline int kara_ws_size(int n) {
  int total = 0;
  while (n > kKaratsubaThreshold) {
    int n1 = n - n / 2;
    total += 4 * n1 - 1;
    n = n1;
  }
  return total + 8;
}

// Full product r[0 .. na+nb-2] (assigned), ragged sizes handled by chunking
// the longer operand into blocks of the shorter one's length.
template <int NL>
void mul_full(Zq<NL>* r, const Zq<NL>* a, int na, const Zq<NL>* b, int nb, const MontCtx<NL>& C) {
  for (int i = 0; i < na + nb - 1; ++i) r[i] = Zq<NL>();
  if (na < nb) {
    std::swap(a, b);
    std::swap(na, nb);
  }
  if (nb <= kKaratsubaThreshold) {
    mul_school(r, a, na, b, nb, C);
    return;
  }
  std::vector<Zq<NL>> ws((size_t)kara_ws_size(nb));
  std::vector<Zq<NL>> tmp((size_t)(2 * nb - 1));
  std::vector<Zq<NL>> apad;
  for (int i = 0; i < na; i += nb) {
    int len = std::min(nb, na - i);
    const Zq<NL>* chunk = a + i;
    if (len < nb) {
      apad.assign((size_t)nb, Zq<NL>());
      std::copy(a + i, a + i + len, apad.begin());
      chunk = apad.data();
    }
    kara_eq(tmp.data(), chunk, b, nb, ws.data(), C);
    int keep = len + nb - 1;
    for (int t = 0; t < keep; ++t) r[i + t] += tmp[(size_t)t];
  }
}

}  // namespace detail

// ---- series operations -----------------------------------------------------

template <int NL>
QSeries<NL> series_add(const QSeries<NL>& a, const QSeries<NL>& b) {
  QSeries<NL> r(std::min(a.prec(), b.prec()));
  for (int i = 0; i < r.prec(); ++i) r[i] = a[i] + b[i];
  return r;
}

template <int NL>
QSeries<NL> series_sub(const QSeries<NL>& a, const QSeries<NL>& b) {
  QSeries<NL> r(std::min(a.prec(), b.prec()));
  for (int i = 0; i < r.prec(); ++i) r[i] = a[i] - b[i];
  return r;
}

template <int NL>
QSeries<NL> series_scale(const QSeries<NL>& a, const Zq<NL>& s) {
  QSeries<NL> r(a.prec());
  for (int i = 0; i < r.prec(); ++i) r[i] = a[i] * s;
  return r;
}

// Product truncated to q^prec. The result's precision is
// min(prec, a.prec, b.prec): unknown tails never leak into known terms.
template <int NL>
QSeries<NL> series_mul(const QSeries<NL>& a, const QSeries<NL>& b, int prec) {
  const MontCtx<NL>& C = ring<NL>();
  int eff = std::min({prec, a.prec(), b.prec()});
  if (eff <= 0) return QSeries<NL>(std::max(0, eff));
  std::vector<Zq<NL>> full((size_t)(2 * eff - 1));
  detail::mul_full(full.data(), a.c.data(), eff, b.c.data(), eff, C);
  QSeries<NL> r(eff);
  std::copy(full.begin(), full.begin() + eff, r.c.begin());
  return r;
}

// Newton inversion; requires a unit constant term.
template <int NL>
QSeries<NL> series_inverse(const QSeries<NL>& a, int prec) {
  if (a.prec() < prec) throw std::invalid_argument("series_inverse: input precision too small");
  if (!a[0].is_unit()) throw std::domain_error("series_inverse: constant term is not a unit");
  QSeries<NL> x(1);
  x[0] = a[0].inv();
  int cur = 1;
  Zq<NL> two = Zq<NL>::from_u64(2);
  while (cur < prec) {
    cur = std::min(2 * cur, prec);
    x.c.resize((size_t)cur);  // the iterate is an exact polynomial
    QSeries<NL> ax = series_mul(a, x, cur);
    for (int i = 0; i < cur; ++i) ax[i] = -ax[i];
    ax[0] += two;
    x = series_mul(x, ax, cur);
  }
  return x;
}

// U_p on q-expansions: picks out a_{np}.
template <int NL>
QSeries<NL> atkin_up(const QSeries<NL>& a, uint64_t p) {
  int n = (a.prec() + (int)p - 1) / (int)p;
  QSeries<NL> r(n);
  for (int i = 0; i < n; ++i) r[i] = a[(int)(i * (int64_t)p)];
  return r;
}

// V_p on q-expansions: a_n goes to the q^{np} slot.
template <int NL>
QSeries<NL> frobenius_vp(const QSeries<NL>& a, uint64_t p, int prec) {
  if ((int64_t)a.prec() * (int64_t)p < prec)
    throw std::invalid_argument("frobenius_vp: input precision too small");
  QSeries<NL> r(prec);
  for (int i = 0; (int64_t)i * (int64_t)p < prec; ++i) {
    r[(int)(i * (int64_t)p)] = a[i];
  }
  return r;
}

// p-depletion: kills every coefficient with p | n (n = 0 included).
template <int NL>
QSeries<NL> p_deplete(const QSeries<NL>& a, uint64_t p) {
  QSeries<NL> r = a;
  for (int i = 0; i < r.prec(); i += (int)p) r[i] = Zq<NL>();
  return r;
}

// (q d/dq)^j for j >= 0.
template <int NL>
QSeries<NL> d_pow(const QSeries<NL>& a, int j) {
  QSeries<NL> r = a;
  for (int i = 0; i < r.prec(); ++i) {
    Zq<NL> n = Zq<NL>::from_u64((uint64_t)i);
    Zq<NL> nj = n.pow(j);
    r[i] = r[i] * nj;
  }
  return r;
}

// (q d/dq)^{-j} for j >= 1; defined on p-depleted series only. Uses one
// batched inversion for all the n^{-j} factors.
template <int NL>
QSeries<NL> d_inv(const QSeries<NL>& a, int j, uint64_t p) {
  QSeries<NL> r(a.prec());
  std::vector<int> idx;
  std::vector<Zq<NL>> vals;
  for (int i = 0; i < a.prec(); ++i) {
    if (i % (int64_t)p == 0) {
      if (!a[i].is_zero())
        throw std::domain_error("d_inv: series is not p-depleted");
      continue;
    }
    if (a[i].is_zero()) continue;
    idx.push_back(i);
    vals.push_back(Zq<NL>::from_u64((uint64_t)i).pow(j));
  }
  // Montgomery batch inversion of vals
  size_t m = vals.size();
  if (m) {
    std::vector<Zq<NL>> pre(m);
    Zq<NL> acc = Zq<NL>::one();
    for (size_t i = 0; i < m; ++i) {
      pre[i] = acc;
      acc *= vals[i];
    }
    Zq<NL> inv = acc.inv();
    for (size_t i = m; i-- > 0;) {
      Zq<NL> vi = inv * pre[i];
      inv *= vals[i];
      vals[i] = vi;
    }
  }
  for (size_t i = 0; i < m; ++i) r[idx[i]] = a[idx[i]] * vals[i];
  return r;
}

// Roots (alpha, beta) of x^2 - a_p x + chi(p) p^{k-1}, alpha the unit root.
// chi_p = 0 encodes p | N: the form is its own stabilization, (a_p, 0).
template <int NL>
std::pair<Zq<NL>, Zq<NL>> unit_root_stabilize(const Zq<NL>& ap, int chi_p, int k) {
  const MontCtx<NL>& C = ring<NL>();
  if (chi_p == 0) {
    if (!ap.is_unit()) throw std::domain_error("unit_root_stabilize: U_p eigenvalue not a unit");
    return {ap, Zq<NL>::zero()};
  }
  if (!ap.is_unit()) throw std::domain_error("unit_root_stabilize: form not ordinary at p");
  if (k < 2) throw std::invalid_argument("unit_root_stabilize: weight must be >= 2");
  Zq<NL> c = Zq<NL>::from_int64(chi_p) * Zq<NL>::from_u64(C.p).pow(k - 1);
  // Hensel from x = a_p mod p; f(x) = x^2 - ap x + c, f'(x) = 2x - ap is a
  // unit along the iteration.
  Zq<NL> x = ap;
  for (int it = 0; it < C.e + 2; ++it) {
    Zq<NL> fx = x * x - ap * x + c;
    if (fx.is_zero()) break;
    Zq<NL> fp = x + x - ap;
    x = x - fx * fp.inv();
  }
  Zq<NL> alpha = x, beta = ap - x;
  if (!alpha.is_unit()) throw std::domain_error("unit_root_stabilize: no unit root found");
  return {alpha, beta};
}

// f(q) - beta f(q^p)
template <int NL>
QSeries<NL> p_stabilized_form(const QSeries<NL>& f, const Zq<NL>& beta, uint64_t p, int prec) {
  if (f.prec() < prec) throw std::invalid_argument("p_stabilized_form: input precision too small");
  QSeries<NL> r(prec);
  for (int i = 0; i < prec; ++i) r[i] = f[i];
  for (int i = 0; (int64_t)i * (int64_t)p < prec && i < f.prec(); ++i) {
    r[(int)(i * (int64_t)p)] -= beta * f[i];
  }
  return r;
}

}  // namespace opal
