// The formal group of E over Z_p. On the scaled short model y^2 = x^3+Ax+B
// (A = -27c4, B = -54c6, an integer model; the coordinate change is
// xs = 36x+3b2, ys = 216y+108(a1 x+a3), so its differential is 1/6 of the
// long model's) the parameter is t = -x/y, and w = -1/y satisfies
// w = t^3 + A t w^2 + B w^3, an integer power series in t. The invariant
// differential is (1 + t u'/(2u)) dt with u = w/t^3, the logarithm is its
// term-wise integral, and the exponential is the compositional inverse by
// Lagrange inversion. A rational point enters the formal group after
// multiplication by the smooth group order times small factors clearing the
// remaining p in denominators; the division back out is by a unit times at
// most one power of p, so precision is tracked exactly.

#include "opal/curvepoints.hpp"

#include <algorithm>
#include <cassert>
#include <sstream>
#include <stdexcept>

#include "opal/arith.hpp"
#include "opal/ring.hpp"

namespace opal {

using boost::multiprecision::denominator;
using boost::multiprecision::numerator;

bool on_curve(const EllCurve& E, const RatPoint& P) {
  if (P.infinity) return true;
  bigrat lhs = P.y * P.y + E.a1 * P.x * P.y + E.a3 * P.y;
  bigrat rhs = P.x * P.x * P.x + E.a2 * P.x * P.x + E.a4 * P.x + E.a6;
  return lhs == rhs;
}

RatPoint curve_neg(const EllCurve& E, const RatPoint& P) {
  if (P.infinity) return P;
  return RatPoint{false, P.x, -P.y - E.a1 * P.x - E.a3};
}

RatPoint curve_add(const EllCurve& E, const RatPoint& P, const RatPoint& Q) {
  if (P.infinity) return Q;
  if (Q.infinity) return P;
  bigrat lam;
  if (P.x == Q.x) {
    if (P.y + Q.y + E.a1 * P.x + E.a3 == 0) return RatPoint{true, 0, 0};
    lam = (3 * P.x * P.x + 2 * E.a2 * P.x + E.a4 - E.a1 * P.y) / (2 * P.y + E.a1 * P.x + E.a3);
  } else {
    lam = (Q.y - P.y) / (Q.x - P.x);
  }
  bigrat nu = P.y - lam * P.x;
  RatPoint R;
  R.x = lam * lam + E.a1 * lam - E.a2 - P.x - Q.x;
  R.y = -(lam + E.a1) * R.x - nu - E.a3;
  return R;
}

RatPoint curve_mul(const EllCurve& E, int64_t n, const RatPoint& P) {
  if (n < 0) return curve_mul(E, -n, curve_neg(E, P));
  RatPoint R{true, 0, 0}, base = P;
  while (n > 0) {
    if (n & 1) R = curve_add(E, R, base);
    base = curve_add(E, base, base);
    n >>= 1;
  }
  return R;
}

namespace {

// power series over Q, coefficient of t^n at index n
using QS = std::vector<bigrat>;

QS qs_mul(const QS& a, const QS& b, int nmax) {
  QS r((size_t)nmax + 1, bigrat(0));
  for (int i = 0; i <= nmax && i < (int)a.size(); ++i) {
    if (a[(size_t)i] == 0) continue;
    int jtop = std::min(nmax - i, (int)b.size() - 1);
    for (int j = 0; j <= jtop; ++j) r[(size_t)(i + j)] += a[(size_t)i] * b[(size_t)j];
  }
  return r;
}

// inverse of a series with constant term 1
QS qs_inv1(const QS& a, int nmax) {
  assert(!a.empty() && a[0] == 1);
  QS r((size_t)nmax + 1, bigrat(0));
  r[0] = 1;
  for (int n = 1; n <= nmax; ++n) {
    bigrat s = 0;
    int jtop = std::min(n, (int)a.size() - 1);
    for (int j = 1; j <= jtop; ++j) s += a[(size_t)j] * r[(size_t)(n - j)];
    r[(size_t)n] = -s;
  }
  return r;
}

// w(t) with w = t^3 + A t w^2 + B w^3, coefficients in Z, to degree nmax
QS w_series(const bigint& A, const bigint& B, int nmax) {
  QS w((size_t)nmax + 1, bigrat(0));
  if (nmax >= 3) w[3] = 1;
  for (int pass = 0; pass <= nmax + 1; ++pass) {
    QS w2 = qs_mul(w, w, nmax);
    QS w3 = qs_mul(w2, w, nmax);
    QS nw((size_t)nmax + 1, bigrat(0));
    if (nmax >= 3) nw[3] = 1;
    for (int i = 0; i < nmax; ++i) nw[(size_t)(i + 1)] += bigrat(A) * w2[(size_t)i];
    for (int i = 0; i <= nmax; ++i) nw[(size_t)i] += bigrat(B) * w3[(size_t)i];
    if (nw == w) return w;
    w = nw;
  }
  throw std::logic_error("w_series: fixpoint not reached");
}

// logarithm l_1 t + ... + l_N t^N with l_1 = 1; index n holds l_n
QS log_series(const bigint& A, const bigint& B, int N) {
  QS w = w_series(A, B, N + 3);
  QS u((size_t)N + 1, bigrat(0));
  for (int i = 0; i <= N; ++i) u[(size_t)i] = w[(size_t)(i + 3)];
  assert(u[0] == 1);
  QS du((size_t)N + 1, bigrat(0));
  for (int i = 1; i <= N; ++i) du[(size_t)(i - 1)] = i * u[(size_t)i];
  QS omega = qs_mul(du, qs_inv1(u, N), N);  // u'/u, then omega/dt = 1 + t*(u'/u)/2
  QS l((size_t)N + 1, bigrat(0));
  l[1] = 1;
  for (int n = 2; n <= N; ++n) l[(size_t)n] = omega[(size_t)(n - 2)] / (2 * n);
  return l;
}

// compositional inverse of the logarithm by Lagrange inversion:
// e_n = [t^{n-1}] (t/L)^n / n
QS exp_series(const QS& l, int N) {
  QS s((size_t)N, bigrat(0));
  for (int j = 0; j < N; ++j) s[(size_t)j] = (j + 1 < (int)l.size()) ? l[(size_t)(j + 1)] : bigrat(0);
  QS r = qs_inv1(s, N - 1);
  QS pw((size_t)N, bigrat(0));
  pw[0] = 1;
  QS e((size_t)N + 1, bigrat(0));
  for (int n = 1; n <= N; ++n) {
    pw = qs_mul(pw, r, N - 1);
    e[(size_t)n] = pw[(size_t)(n - 1)] / n;
  }
  // the triangular identity pins both series; check l(e(s)) = s low down
  int chk = std::min(N, 9);
  QS comp((size_t)chk + 1, bigrat(0));
  for (int n = chk; n >= 1; --n) {
    comp[0] += (n < (int)l.size()) ? l[(size_t)n] : bigrat(0);
    comp = qs_mul(comp, e, chk);
  }
  for (int i = 1; i <= chk; ++i)
    if (comp[(size_t)i] != (i == 1 ? bigrat(1) : bigrat(0)))
      throw std::logic_error("exp_series: composition check failed");
  return e;
}

int vp_big(bigint n, uint64_t p) {
  assert(n != 0);
  if (n < 0) n = -n;
  int v = 0;
  while (n % p == 0) {
    n /= p;
    ++v;
  }
  return v;
}

int max_den_valuation(const QS& c, uint64_t p) {
  int g = 0;
  for (const bigrat& x : c) {
    if (x == 0) continue;
    g = std::max(g, vp_big(denominator(x), p));
  }
  return g;
}

// smallest truncation degree so that every dropped term of a series whose
// n-th coefficient has denominator valuation at most dv(n) is 0 mod p^e at
// arguments of valuation >= 1
template <class DV>
int required_terms(uint64_t p, int e, DV dv) {
  int last_fail = 0;
  int cap = 4 * e + (int)(4 * p < 400 ? 40 : 4 * p);
  for (int n = 1; n <= cap; ++n)
    if (n - dv(n) < e) last_fail = n;
  return last_fail;
}

int ilog_p(uint64_t p, int n) {
  int k = 0;
  long long q = n;
  while (q >= (long long)p) {
    q /= (long long)p;
    ++k;
  }
  return k;
}

struct ShortModel {
  bigint A, B;  // y^2 = x^3 + A x + B
  bigint b2;
  int64_t a1, a3;
};

ShortModel short_model(const EllCurve& E) {
  bigint b2 = E.b2(), b4 = E.b4(), b6 = E.b6();
  bigint c4 = b2 * b2 - 24 * b4;
  bigint c6 = -b2 * b2 * b2 + 36 * b2 * b4 - 216 * b6;
  return ShortModel{-27 * c4, -54 * c6, b2, E.a1, E.a3};
}

void to_short(const ShortModel& S, const bigrat& x, const bigrat& y, bigrat& xs, bigrat& ys) {
  xs = 36 * x + 3 * bigrat(S.b2);
  ys = 216 * y + 108 * (S.a1 * x + bigrat(S.a3));
}

template <int NL>
Zq<NL> zq_of_rat(const bigrat& r) {
  const bigint& den = denominator(r);
  Zq<NL> d = Zq<NL>::from_bigint(den);
  if (!d.is_unit()) throw std::domain_error("zq_of_rat: denominator not a unit");
  return Zq<NL>::from_bigint(numerator(r)) * d.inv();
}

// sum of c_n t^n for n >= 1; coefficients may carry p-power denominators,
// each term is a p-adic integer so the exact divisions go through
template <int NL>
Zq<NL> eval_series(const QS& c, const Zq<NL>& t, uint64_t p) {
  Zq<NL> acc = Zq<NL>::zero(), tp = Zq<NL>::one();
  for (int n = 1; n < (int)c.size(); ++n) {
    tp *= t;
    if (tp.is_zero()) break;
    const bigrat& cn = c[(size_t)n];
    if (cn == 0) continue;
    bigint den = denominator(cn);
    int v = vp_big(den, p);
    bigint dd = den;
    for (int i = 0; i < v; ++i) dd /= p;
    Zq<NL> term = tp * Zq<NL>::from_bigint(numerator(cn)) * Zq<NL>::from_bigint(dd).inv();
    if (v > 0) term = term.div_exact_p(v);
    acc += term;
  }
  return acc;
}

template <int NL>
bigint log_eval(uint64_t p, int ew, const QS& lser, const bigrat& t, const bigint& M, int kM,
                const bigint& out_mod) {
  RingScope<NL> scope(p, ew);
  Zq<NL> tz = zq_of_rat<NL>(t);
  Zq<NL> s = eval_series(lser, tz, p);
  bigint Mu = M;
  for (int i = 0; i < kM; ++i) Mu /= p;
  if (kM > 0) s = s.div_exact_p(kM);
  Zq<NL> res = s * Zq<NL>::from_bigint(Mu).inv() * Zq<NL>::from_u64(6);
  return res.lift() % out_mod;
}

// Exact scalar u p^v over the active ring with the valuation of the
// accumulated error tracked in prec. Divisions split off the measured
// power of p and invert the remaining unit, so nothing is rounded; when a
// read-off would hand out fewer trusted digits than asked for it throws
// precision_error instead of returning a wrong residue.
struct precision_error : std::runtime_error {
  explicit precision_error(const char* w) : std::runtime_error(w) {}
};

template <int NL>
struct Pad {
  Zq<NL> u;
  int v = 0;
  int prec = 0;
};

template <int NL>
Pad<NL> pad_of(const Zq<NL>& r) {
  return Pad<NL>{r, 0, ring<NL>().e};
}

// valuation of the value; saturates at v + e when the residue vanishes
template <int NL>
int pad_val(const Pad<NL>& a) {
  return a.u.val() + a.v;
}

template <int NL>
Zq<NL> zq_ppow(int k) {
  return Zq<NL>::from_bigint(pow_big(ring<NL>().p, k));
}

template <int NL>
Pad<NL> pad_mul(const Pad<NL>& a, const Pad<NL>& b) {
  int e = ring<NL>().e;
  int prec = std::min({a.prec + pad_val(b), b.prec + pad_val(a), a.v + b.v + e});
  return Pad<NL>{a.u * b.u, a.v + b.v, prec};
}

template <int NL>
Pad<NL> pad_add(const Pad<NL>& a, const Pad<NL>& b) {
  int e = ring<NL>().e;
  int v = std::min(a.v, b.v);
  Zq<NL> ua = a.v > v ? a.u * zq_ppow<NL>(a.v - v) : a.u;
  Zq<NL> ub = b.v > v ? b.u * zq_ppow<NL>(b.v - v) : b.u;
  return Pad<NL>{ua + ub, v, std::min({a.prec, b.prec, v + e})};
}

template <int NL>
Pad<NL> pad_neg(const Pad<NL>& a) {
  return Pad<NL>{-a.u, a.v, a.prec};
}

template <int NL>
Pad<NL> pad_sub(const Pad<NL>& a, const Pad<NL>& b) {
  return pad_add(a, pad_neg(b));
}

template <int NL>
Pad<NL> pad_inv(const Pad<NL>& a) {
  int e = ring<NL>().e;
  int m = a.u.val();
  if (m >= e) throw precision_error("inverse of a value vanishing at working precision");
  int val = a.v + m;
  int known = std::min(a.prec, a.v + e);  // absolute precision of the value
  return Pad<NL>{a.u.div_exact_p(m).inv(), -val, known - 2 * val};
}

template <int NL>
Pad<NL> pad_div(const Pad<NL>& a, const Pad<NL>& b) {
  return pad_mul(a, pad_inv(b));
}

// residue of an integral value, refusing if fewer than need digits are trusted
template <int NL>
Zq<NL> pad_res(const Pad<NL>& a, int need) {
  if (a.prec < need) throw precision_error("working precision exhausted");
  if (a.v >= 0) return a.v > 0 ? a.u * zq_ppow<NL>(a.v) : a.u;
  if (a.u.val() + a.v < 0) throw std::logic_error("pad_res: value not integral");
  return a.u.div_exact_p(-a.v);
}

// a point over the ring in the chart its reduction selects: the identity,
// an affine pair, or a formal-group parameter of positive valuation
template <int NL>
struct EPoint {
  int chart = 0;  // 0 identity, 1 affine, 2 formal
  Pad<NL> x, y, t;
};

// u(t) = w(t)/t^3, a unit integer series; long enough that the dropped
// tail vanishes mod the ring modulus at arguments of valuation >= 1
template <int NL>
Zq<NL> eval_unit_series(const QS& user, const Zq<NL>& t) {
  assert((int)user.size() > ring<NL>().e);
  Zq<NL> acc = Zq<NL>::zero();
  for (int n = (int)user.size() - 1; n >= 0; --n) {
    assert(denominator(user[(size_t)n]) == 1);
    acc = acc * t + Zq<NL>::from_bigint(numerator(user[(size_t)n]));
  }
  return acc;
}

// affine coordinates as exact scalars; a formal point of parameter t has
// x = 1/(t^2 u(t)), y = -1/(t^3 u(t))
template <int NL>
void ep_coords(const EPoint<NL>& P, const QS& user, Pad<NL>& x, Pad<NL>& y) {
  if (P.chart == 1) {
    x = P.x;
    y = P.y;
    return;
  }
  assert(P.chart == 2);
  Zq<NL> tr = pad_res(P.t, 1);
  Pad<NL> U{eval_unit_series<NL>(user, tr), 0, P.t.prec};
  Pad<NL> t2 = pad_mul(P.t, P.t);
  x = pad_inv(pad_mul(t2, U));
  y = pad_neg(pad_inv(pad_mul(pad_mul(t2, P.t), U)));
}

// Chord-and-tangent sum on y^2 = x^3 + A x + B; the output chart is read
// from where the result lands. The slope is (y2-y1)/(x2-x1) or
// (x1^2+x1x2+x2^2+A)/(y1+y2), whichever denominator is less divisible by
// p; the forms agree on the curve, so the choice only steers precision.
// Both denominators vanishing at working precision means the points are
// opposite there, and the sum is the identity to the same depth.
template <int NL>
EPoint<NL> ep_add(const EPoint<NL>& P, const EPoint<NL>& Q, const Pad<NL>& A, const QS& user) {
  if (P.chart == 0) return Q;
  if (Q.chart == 0) return P;
  Pad<NL> x1, y1, x2, y2;
  ep_coords(P, user, x1, y1);
  ep_coords(Q, user, x2, y2);
  Pad<NL> dx = pad_sub(x2, x1), sy = pad_add(y1, y2);
  bool dx0 = dx.u.is_zero(), sy0 = sy.u.is_zero();
  if (dx0 && sy0) return EPoint<NL>{};
  Pad<NL> num, den;
  if (!dx0 && (sy0 || pad_val(dx) <= pad_val(sy))) {
    num = pad_sub(y2, y1);
    den = dx;
  } else {
    num = pad_add(pad_add(pad_mul(x1, x1), pad_mul(x1, x2)), pad_add(pad_mul(x2, x2), A));
    den = sy;
  }
  Pad<NL> lam = pad_div(num, den);
  Pad<NL> x3 = pad_sub(pad_sub(pad_mul(lam, lam), x1), x2);
  Pad<NL> y3 = pad_sub(pad_mul(lam, pad_sub(x1, x3)), y1);
  if (pad_val(x3) >= 0) return EPoint<NL>{1, x3, y3, Pad<NL>{}};
  EPoint<NL> R{2, Pad<NL>{}, Pad<NL>{}, pad_neg(pad_div(x3, y3))};
  if (pad_val(R.t) < 1) throw std::logic_error("ep_add: formal parameter not divisible by p");
  return R;
}

template <int NL>
EPoint<NL> ep_mul(bigint n, const EPoint<NL>& P, const Pad<NL>& A, const QS& user) {
  assert(n >= 0);
  EPoint<NL> R, base = P;
  while (n > 0) {
    if ((n & 1) != 0) R = ep_add(R, base, A, user);
    base = ep_add(base, base, A, user);
    n >>= 1;
  }
  return R;
}

struct ClassRep {
  bool inf;
  uint64_t x, y;  // residues mod p on the short model
};

template <int NL>
RecoverResult recover_impl(const EllCurve& E, const ShortModel& S, const bigint& lambda, uint64_t p,
                           int e, int ew, const QS& lser, const QS& eser, const QS& user,
                           const QS& wser, const std::vector<ClassRep>& reps, const bigint& M,
                           int kM, const bigint& nb, const bigint& db, bool auto_bounds) {
  RingScope<NL> scope(p, ew);
  using Z = Zq<NL>;
  Pad<NL> A = pad_of(Z::from_bigint(S.A));

  auto hensel_lift = [&](const ClassRep& c) -> EPoint<NL> {
    Z x = Z::from_u64(c.x), y = Z::from_u64(c.y);
    Z a = Z::from_bigint(S.A);
    auto f = [&](const Z& xx) { return xx * xx * xx + a * xx + Z::from_bigint(S.B); };
    if (c.y != 0) {
      for (int it = 0; it < 9; ++it) y = y - (y * y - f(x)) * (y + y).inv();
    } else {
      Z three = Z::from_u64(3);
      for (int it = 0; it < 9; ++it) x = x - f(x) * (three * x * x + a).inv();
      y = Z::zero();
    }
    return EPoint<NL>{1, pad_of(x), pad_of(y), Pad<NL>{}};
  };

  Z lam_s = Z::from_bigint(lambda) * Z::from_u64(6).inv();

  RecoverResult out;
  int skipped_domain = 0, skipped_prec = 0, failed_recon = 0, failed_curve = 0;
  for (const ClassRep& c : reps) {
    try {
      EPoint<NL> P0 = c.inf ? EPoint<NL>{} : hensel_lift(c);
      Z logP0 = Z::zero();
      bool have_log = true;
      if (!c.inf) {
        EPoint<NL> W = ep_mul(M, P0, A, user);
        if (W.chart == 1) throw std::logic_error("recover_point: multiple left the formal chart");
        Z sM = W.chart == 2 ? eval_series(lser, pad_res(W.t, e + kM + 1), p) : Z::zero();
        bigint Mu = M;
        for (int i = 0; i < kM; ++i) Mu /= p;
        if (sM.val() < kM) {
          have_log = false;  // class log not in Z_p at this precision
        } else {
          if (kM > 0) sM = sM.div_exact_p(kM);
          logP0 = sM * Z::from_bigint(Mu).inv();
        }
      }
      if (!have_log) {
        ++skipped_domain;
        continue;
      }
      Z diff = lam_s - logP0;
      if (diff.val() < 1) {
        ++skipped_domain;  // exponential does not converge for this class
        continue;
      }
      // trusted digits of the formal parameter: e; below that the class
      // candidate is the torsion lift itself
      Z tC = eval_series(eser, diff, p);
      EPoint<NL> F;
      if (tC.val() < e) F = EPoint<NL>{2, Pad<NL>{}, Pad<NL>{}, Pad<NL>{tC, 0, e}};
      EPoint<NL> C = c.inf ? F : ep_add(P0, F, A, user);

      RatPoint cand;
      bool ok = false;
      if (C.chart == 0) {
        cand = RatPoint{true, 0, 0};
        ok = true;
      } else {
        // the translation through the chart costs a few digits, a small
        // multiple of the depth of the formal factor; reconstruct from the
        // digits actually trusted, with the default bounds shrunk to match
        int avail = std::min(e, C.chart == 1 ? std::min(C.x.prec, C.y.prec) : C.t.prec);
        if (avail < 2) throw precision_error("candidate below reconstruction depth");
        bigint ma = pow_big(p, avail);
        bigint cnb = nb, cdb = db;
        if (2 * cnb * cdb >= ma) {
          if (!auto_bounds) throw precision_error("bounds exceed the trusted digits");
          bigint half = ma / 2;
          cnb = cdb = boost::multiprecision::sqrt(half);
        }
        if (C.chart == 1) {
          Z xs = pad_res(C.x, avail), ys = pad_res(C.y, avail);
          // back to the long model: x = (xs-3b2)/36, y = (ys-108(a1 x+a3))/216
          Z xl = (xs - Z::from_bigint(3 * S.b2)) * Z::from_u64(36).inv();
          Z yl = (ys - Z::from_u64(108) * (Z::from_int64(S.a1) * xl + Z::from_int64(S.a3))) *
                 Z::from_u64(216).inv();
          auto rx = rational_reconstruct_big(xl.lift() % ma, ma, cnb, cdb);
          auto ry = rational_reconstruct_big(yl.lift() % ma, ma, cnb, cdb);
          if (rx && ry) {
            cand = RatPoint{false, bigrat(rx->first) / bigrat(rx->second),
                            bigrat(ry->first) / bigrat(ry->second)};
            ok = true;
          }
        } else {
          Z tc = pad_res(C.t, avail);
          Z wc = eval_series(wser, tc, p);
          bigint tl = tc.lift() % ma, wl = wc.lift() % ma;
          if (tl == 0 && wl == 0) {
            cand = RatPoint{true, 0, 0};
            ok = true;
          } else {
            auto rt = rational_reconstruct_big(tl, ma, cnb, cdb);
            auto rw = rational_reconstruct_big(wl, ma, cnb, cdb);
            if (rt && rw && rw->first != 0) {
              bigrat tq = bigrat(rt->first) / bigrat(rt->second);
              bigrat wq = bigrat(rw->first) / bigrat(rw->second);
              bigrat xs = tq / wq, ys = bigrat(-1) / wq;
              bigrat xl = (xs - 3 * bigrat(S.b2)) / 36;
              bigrat yl = (ys - 108 * (S.a1 * xl + bigrat(S.a3))) / 216;
              cand = RatPoint{false, xl, yl};
              ok = true;
            }
          }
        }
      }
      if (!ok) {
        ++failed_recon;
        continue;
      }
      if (on_curve(E, cand))
        out.points.push_back(cand);
      else
        ++failed_curve;
    } catch (const precision_error&) {
      ++skipped_prec;  // class lives too close to the kernel of reduction
    }
  }
  if (out.points.empty()) {
    std::ostringstream os;
    os << "no rational point found: " << reps.size() << " residue classes, " << skipped_domain
       << " outside the exponential domain, " << skipped_prec << " lost to working precision, "
       << failed_recon << " failed reconstruction, " << failed_curve
       << " failed the exact curve equation";
    out.note = os.str();
  }
  return out;
}

}  // namespace

bigint formal_log(const EllCurve& E, const RatPoint& P, uint64_t p, int e) {
  if (p < 5 || !is_prime_u64(p)) throw std::invalid_argument("formal_log: p must be a prime >= 5");
  if (e < 1) throw std::invalid_argument("formal_log: precision must be positive");
  if (!on_curve(E, P)) throw std::invalid_argument("formal_log: point not on the curve");
  if (P.infinity) return 0;

  bigint M;
  if (E.good_at(p)) {
    M = curve_order_mod_p(E, p);
  } else {
    int64_t ap = curve_ap(E, p);
    if (ap == 0) throw std::invalid_argument("formal_log: additive reduction is not supported");
    M = bigint(p) - ap;  // order of the smooth part, prime to p
  }
  RatPoint R = curve_mul(E, (int64_t)M, P);

  // clear any p left in the denominator with small prime-to-p factors
  static const int extras[] = {2, 3, 5, 7, 11, 13};
  int ei = 0;
  bigint extra = 1;
  auto in_formal = [&](const RatPoint& Q) {
    return !Q.infinity && denominator(Q.x) % p == 0;
  };
  while (!R.infinity && !in_formal(R)) {
    int ell = extras[ei];
    ei = (ei + 1) % 6;
    if ((uint64_t)ell == p) continue;
    R = curve_mul(E, ell, R);
    extra *= ell;
    if (extra > 1000000)
      throw std::runtime_error("formal_log: no multiplier below the cap reaches the formal group");
  }
  if (R.infinity) return 0;  // the point is torsion
  M *= extra;

  ShortModel S = short_model(E);
  bigrat xs, ys;
  to_short(S, R.x, R.y, xs, ys);
  bigrat t = -xs / ys;
  if (numerator(t) % p != 0 || denominator(t) % p == 0)
    throw std::logic_error("formal_log: parameter not in the formal group");

  int kM = (M % p == 0) ? vp_big(M, p) : 0;
  assert(kM <= 1);
  int N = (int)((bigint(e) * p + (p - 2)) / (bigint(p) - 1)) + 5;
  int need = required_terms(p, e + kM, [&](int n) { return ilog_p(p, n); });
  if (N < need) {
    std::ostringstream os;
    os << "formal_log: series truncated at " << N << " terms, " << need
       << " required at this precision";
    throw std::runtime_error(os.str());
  }
  QS lser = log_series(S.A, S.B, N);
  int ew = e + max_den_valuation(lser, p) + kM + 1;
  bigint out_mod = pow_big(p, e);
  switch (limbs_needed(p, ew)) {
    case 1:
      return log_eval<1>(p, ew, lser, t, M, kM, out_mod);
    case 2:
      return log_eval<2>(p, ew, lser, t, M, kM, out_mod);
    default:
      return log_eval<3>(p, ew, lser, t, M, kM, out_mod);
  }
}

RecoverResult recover_point(const EllCurve& E, const bigint& lambda, uint64_t p, int e,
                            const bigint& num_bound, const bigint& den_bound) {
  if (p < 5 || !is_prime_u64(p)) throw std::invalid_argument("recover_point: p must be a prime >= 5");
  if (e < 2) throw std::invalid_argument("recover_point: precision must be at least 2");
  if (!E.good_at(p)) throw std::invalid_argument("recover_point: requires good reduction at p");

  bigint pem = pow_big(p, e);
  bigint nb = num_bound, db = den_bound;
  bool auto_bounds = nb == 0 && db == 0;
  if (nb == 0 || db == 0) {
    bigint half = pem / 2;
    bigint s = boost::multiprecision::sqrt(half);
    if (nb == 0) nb = s;
    if (db == 0) db = s;
  }
  if (2 * nb * db >= pem)
    throw std::invalid_argument("recover_point: bounds too large for unique reconstruction");

  ShortModel S = short_model(E);

  // residue classes of the short model over F_p, via a square table
  std::vector<int64_t> sq((size_t)p, -1);
  for (uint64_t y = 0; y < p; ++y) sq[(size_t)((y * y) % p)] = (int64_t)y;
  int64_t Am = (int64_t)(((S.A % (int64_t)p) + (int64_t)p) % (int64_t)p);
  int64_t Bm = (int64_t)(((S.B % (int64_t)p) + (int64_t)p) % (int64_t)p);
  std::vector<ClassRep> reps;
  reps.push_back(ClassRep{true, 0, 0});
  for (uint64_t x = 0; x < p; ++x) {
    uint64_t fx = (uint64_t)(((__int128)x * x % p * x + (__int128)Am * x + Bm) % p);
    if (fx == 0) {
      reps.push_back(ClassRep{false, x, 0});
    } else if (sq[(size_t)fx] >= 0) {
      uint64_t y = (uint64_t)sq[(size_t)fx];
      reps.push_back(ClassRep{false, x, y});
      reps.push_back(ClassRep{false, x, p - y});
    }
  }
  if (reps.size() != curve_order_mod_p(E, p))
    throw std::logic_error("recover_point: class count disagrees with the point count");
  bigint M = (bigint)reps.size();
  int kM = (M % p == 0) ? vp_big(M, p) : 0;
  assert(kM <= 1);

  int N = (int)((bigint(e) * p + (p - 2)) / (bigint(p) - 1)) + 5;
  int need_log = required_terms(p, e + kM, [&](int n) { return ilog_p(p, n); });
  int need_exp = required_terms(p, e, [&](int n) { return (n - 1) / (int)(p - 1); });
  int need = std::max(need_log, need_exp);
  if (N < need) {
    std::ostringstream os;
    os << "recover_point: series truncated at " << N << " terms, " << need
       << " required at this precision";
    throw std::runtime_error(os.str());
  }
  QS lser = log_series(S.A, S.B, N);
  QS eser = exp_series(lser, N);
  // guard digits: series denominators, the p in the group order, and room
  // for the powers of p split off by chords near the kernel of reduction
  int ew = e + max_den_valuation(lser, p) + max_den_valuation(eser, p) + kM +
           (p < 50 ? 10 : 4);
  int wlen = std::max(N, ew + 2);
  QS wser = w_series(S.A, S.B, wlen + 3);
  QS user((size_t)wlen + 1);
  for (int i = 0; i <= wlen; ++i) user[(size_t)i] = wser[(size_t)(i + 3)];
  switch (limbs_needed(p, ew)) {
    case 1:
      return recover_impl<1>(E, S, lambda, p, e, ew, lser, eser, user, wser, reps, M, kM, nb, db, auto_bounds);
    case 2:
      return recover_impl<2>(E, S, lambda, p, e, ew, lser, eser, user, wser, reps, M, kM, nb, db, auto_bounds);
    default:
      return recover_impl<3>(E, S, lambda, p, e, ew, lser, eser, user, wser, reps, M, kM, nb, db, auto_bounds);
  }
}

namespace {

template <int NL>
std::array<bigint, 3> padd_mod_impl(uint64_t p, int e, const bigint& A, const bigint& B,
                                    const std::array<bigint, 3>& P, const std::array<bigint, 3>& Q) {
  RingScope<NL> scope(p, e);
  using Z = Zq<NL>;
  int wlen = e + 2;
  QS wser = w_series(A, B, wlen + 3);
  QS user((size_t)wlen + 1);
  for (int i = 0; i <= wlen; ++i) user[(size_t)i] = wser[(size_t)(i + 3)];
  auto lift = [](const std::array<bigint, 3>& R) -> EPoint<NL> {
    if (R[2] == 0) return EPoint<NL>{};
    return EPoint<NL>{1, pad_of(Z::from_bigint(R[0])), pad_of(Z::from_bigint(R[1])), Pad<NL>{}};
  };
  EPoint<NL> C = ep_add(lift(P), lift(Q), pad_of(Z::from_bigint(A)), user);
  if (C.chart == 0) return {bigint(0), bigint(1), bigint(0)};
  if (C.chart == 1) return {pad_res(C.x, e).lift(), pad_res(C.y, e).lift(), bigint(1)};
  Z t = pad_res(C.t, e);
  return {t.lift(), (-Z::one()).lift(), eval_series(wser, t, p).lift()};
}

}  // namespace

std::array<bigint, 3> short_padd_mod(uint64_t p, int e, const bigint& A, const bigint& B,
                                     const std::array<bigint, 3>& P,
                                     const std::array<bigint, 3>& Q) {
  switch (limbs_needed(p, e)) {
    case 1:
      return padd_mod_impl<1>(p, e, A, B, P, Q);
    case 2:
      return padd_mod_impl<2>(p, e, A, B, P, Q);
    default:
      return padd_mod_impl<3>(p, e, A, B, P, Q);
  }
}

namespace {

// LLL reduction with delta = 3/4 on a small integer basis, exact arithmetic
void lll_reduce(std::vector<std::vector<bigint>>& b) {
  const int n = (int)b.size();
  auto dot = [](const std::vector<bigint>& u, const std::vector<bigint>& v) {
    bigint s = 0;
    for (size_t i = 0; i < u.size(); ++i) s += u[i] * v[i];
    return s;
  };
  std::vector<std::vector<bigrat>> mu((size_t)n, std::vector<bigrat>((size_t)n, bigrat(0)));
  std::vector<bigrat> Bs((size_t)n, bigrat(0));
  auto gso = [&]() {
    std::vector<std::vector<bigrat>> star((size_t)n);
    for (int i = 0; i < n; ++i) {
      std::vector<bigrat> v((size_t)b[(size_t)i].size());
      for (size_t j = 0; j < v.size(); ++j) v[j] = bigrat(b[(size_t)i][j]);
      for (int k = 0; k < i; ++k) {
        bigrat num = 0;
        for (size_t j = 0; j < v.size(); ++j) num += bigrat(b[(size_t)i][j]) * star[(size_t)k][j];
        mu[(size_t)i][(size_t)k] = Bs[(size_t)k] == 0 ? bigrat(0) : num / Bs[(size_t)k];
        for (size_t j = 0; j < v.size(); ++j) v[j] -= mu[(size_t)i][(size_t)k] * star[(size_t)k][j];
      }
      star[(size_t)i] = v;
      bigrat nn = 0;
      for (const bigrat& x : v) nn += x * x;
      Bs[(size_t)i] = nn;
    }
  };
  auto round_rat = [](const bigrat& r) -> bigint {
    bigint num = numerator(r), den = denominator(r);
    bigint q = (2 * num + den) / (2 * den);
    if (2 * num + den < 0 && (2 * num + den) % (2 * den) != 0) q -= 1;
    return q;
  };
  gso();
  int k = 1;
  int guard = 0;
  while (k < n) {
    if (++guard > 100000) throw std::logic_error("lll_reduce: iteration cap hit");
    for (int j = k - 1; j >= 0; --j) {
      bigint r = round_rat(mu[(size_t)k][(size_t)j]);
      if (r != 0) {
        for (size_t i = 0; i < b[(size_t)k].size(); ++i) b[(size_t)k][i] -= r * b[(size_t)j][i];
        gso();
      }
    }
    bigrat lhs = Bs[(size_t)k];
    bigrat rhs = (bigrat(3, 4) - mu[(size_t)k][(size_t)(k - 1)] * mu[(size_t)k][(size_t)(k - 1)]) *
                 Bs[(size_t)(k - 1)];
    if (lhs >= rhs) {
      ++k;
    } else {
      std::swap(b[(size_t)k], b[(size_t)(k - 1)]);
      gso();
      k = std::max(1, k - 1);
    }
    (void)dot;
  }
}

}  // namespace

RelationResult detect_relation(const bigint& t, uint64_t p, int e, int degree,
                               const bigint& height_bound) {
  if (degree < 1 || degree > 8) throw std::invalid_argument("detect_relation: degree out of range");
  if (e < 1) throw std::invalid_argument("detect_relation: precision must be positive");
  bigint m = pow_big(p, e);
  bigint tr = t % m;
  if (tr < 0) tr += m;

  int d = degree;
  std::vector<std::vector<bigint>> b((size_t)d + 1, std::vector<bigint>((size_t)d + 1, bigint(0)));
  b[0][0] = m;
  bigint tp = 1;
  for (int i = 1; i <= d; ++i) {
    tp = (tp * tr) % m;
    b[(size_t)i][0] = -tp;
    b[(size_t)i][(size_t)i] = 1;
  }
  lll_reduce(b);

  // shortest reduced vector by euclidean norm
  int best = 0;
  bigint bestn = -1;
  for (int i = 0; i <= d; ++i) {
    bigint nn = 0;
    for (const bigint& x : b[(size_t)i]) nn += x * x;
    if (bestn < 0 || nn < bestn) {
      bestn = nn;
      best = i;
    }
  }
  std::vector<bigint> c = b[(size_t)best];

  bigint g = 0;
  for (const bigint& x : c) g = boost::multiprecision::gcd(g, x < 0 ? bigint(-x) : x);
  if (g == 0) return RelationResult{};
  for (bigint& x : c) x /= g;
  int lead = d;
  while (lead > 0 && c[(size_t)lead] == 0) --lead;
  if (c[(size_t)lead] < 0)
    for (bigint& x : c) x = -x;

  // membership of the lattice is exactness of the relation mod p^e
  bigint chk = 0, tq = 1;
  for (int i = 0; i <= d; ++i) {
    chk = (chk + c[(size_t)i] * tq) % m;
    tq = (tq * tr) % m;
  }
  chk %= m;
  if (chk < 0) chk += m;
  if (chk != 0) throw std::logic_error("detect_relation: reduced vector left the lattice");

  for (const bigint& x : c)
    if ((x < 0 ? bigint(-x) : x) > height_bound) return RelationResult{};
  RelationResult res;
  res.found = true;
  c.resize((size_t)lead + 1);
  res.coeffs = c;
  return res;
}

}  // namespace opal
