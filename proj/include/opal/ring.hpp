#pragma once

// Exact arithmetic in Z/p^e for odd primes p, with Montgomery representation
// over a fixed number of 64-bit limbs NL in {1,2,3}. The active ring is held
// thread-local (set with RingScope); scalars are plain limb vectors so large
// arrays stay flat and relocatable.

#include <cassert>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

namespace opal {

using bigint = boost::multiprecision::cpp_int;

template <int NL>
struct limbs {
  uint64_t w[NL];
  static limbs zero() {
    limbs r;
    for (int i = 0; i < NL; ++i) r.w[i] = 0;
    return r;
  }
  bool is_zero() const {
    for (int i = 0; i < NL; ++i)
      if (w[i]) return false;
    return true;
  }
  bool operator==(const limbs& o) const {
    for (int i = 0; i < NL; ++i)
      if (w[i] != o.w[i]) return false;
    return true;
  }
  bool operator!=(const limbs& o) const { return !(*this == o); }
};

template <int NL>
inline int limbs_cmp(const limbs<NL>& a, const limbs<NL>& b) {
  for (int i = NL - 1; i >= 0; --i) {
    if (a.w[i] < b.w[i]) return -1;
    if (a.w[i] > b.w[i]) return 1;
  }
  return 0;
}

// r = a + b, returns carry out
template <int NL>
inline uint64_t limbs_add(limbs<NL>& r, const limbs<NL>& a, const limbs<NL>& b) {
  uint64_t carry = 0;
  for (int i = 0; i < NL; ++i) {
    unsigned __int128 t = (unsigned __int128)a.w[i] + b.w[i] + carry;
    r.w[i] = (uint64_t)t;
    carry = (uint64_t)(t >> 64);
  }
  return carry;
}

// r = a - b, returns borrow out
template <int NL>
inline uint64_t limbs_sub(limbs<NL>& r, const limbs<NL>& a, const limbs<NL>& b) {
  uint64_t borrow = 0;
  for (int i = 0; i < NL; ++i) {
    unsigned __int128 t = (unsigned __int128)a.w[i] - b.w[i] - borrow;
    r.w[i] = (uint64_t)t;
    borrow = (uint64_t)(t >> 64) ? 1 : 0;
  }
  return borrow;
}

template <int NL>
inline bigint limbs_to_bigint(const limbs<NL>& a) {
  bigint r = 0;
  for (int i = NL - 1; i >= 0; --i) {
    r <<= 64;
    r += a.w[i];
  }
  return r;
}

template <int NL>
inline limbs<NL> limbs_from_bigint(bigint x) {
  limbs<NL> r = limbs<NL>::zero();
  for (int i = 0; i < NL; ++i) {
    r.w[i] = (uint64_t)(x & 0xffffffffffffffffULL);
    x >>= 64;
  }
  if (x != 0) throw std::overflow_error("limbs_from_bigint: value too wide");
  return r;
}

// Divides a by the single word d in place, returns the remainder.
template <int NL>
inline uint64_t limbs_divmod_u64(limbs<NL>& a, uint64_t d) {
  unsigned __int128 rem = 0;
  for (int i = NL - 1; i >= 0; --i) {
    unsigned __int128 cur = (rem << 64) | a.w[i];
    a.w[i] = (uint64_t)(cur / d);
    rem = cur % d;
  }
  return (uint64_t)rem;
}

template <int NL>
struct MontCtx {
  uint64_t p = 0;   // odd prime
  int e = 0;        // modulus is p^e
  limbs<NL> n;      // p^e
  uint64_t n0inv;   // -n^{-1} mod 2^64
  limbs<NL> r1;     // Montgomery image of 1
  limbs<NL> r2;     // R^2 mod n, R = 2^{64 NL}
  bigint n_big;

  MontCtx() = default;
  MontCtx(uint64_t p_, int e_) { init(p_, e_); }

  void init(uint64_t p_, int e_) {
    if (p_ < 3 || (p_ & 1) == 0) throw std::invalid_argument("MontCtx: p must be odd >= 3");
    if (e_ < 1) throw std::invalid_argument("MontCtx: e must be positive");
    p = p_;
    e = e_;
    n_big = 1;
    for (int i = 0; i < e; ++i) n_big *= p_;
    n = limbs_from_bigint<NL>(n_big);
    // Newton iteration for the word inverse of n mod 2^64, then negate.
    uint64_t inv = n.w[0];
    for (int it = 0; it < 5; ++it) inv *= 2 - n.w[0] * inv;
    n0inv = ~inv + 1;
    bigint R = (bigint(1) << (64 * NL)) % n_big;
    r1 = limbs_from_bigint<NL>(R);
    r2 = limbs_from_bigint<NL>((R * R) % n_big);
  }
};

// Montgomery product: returns a*b/R mod n. Inputs must be < n.
template <int NL>
inline limbs<NL> mont_mul(const limbs<NL>& a, const limbs<NL>& b, const MontCtx<NL>& C) {
  uint64_t t[2 * NL + 1];
  for (int i = 0; i < 2 * NL + 1; ++i) t[i] = 0;
  for (int i = 0; i < NL; ++i) {
    uint64_t carry = 0;
    for (int j = 0; j < NL; ++j) {
      unsigned __int128 cur = (unsigned __int128)a.w[i] * b.w[j] + t[i + j] + carry;
      t[i + j] = (uint64_t)cur;
      carry = (uint64_t)(cur >> 64);
    }
    t[i + NL] = carry;
  }
  for (int i = 0; i < NL; ++i) {
    uint64_t m = t[i] * C.n0inv;
    uint64_t carry = 0;
    for (int j = 0; j < NL; ++j) {
      unsigned __int128 cur = (unsigned __int128)m * C.n.w[j] + t[i + j] + carry;
      t[i + j] = (uint64_t)cur;
      carry = (uint64_t)(cur >> 64);
    }
    for (int j = i + NL; carry && j <= 2 * NL; ++j) {
      unsigned __int128 cur = (unsigned __int128)t[j] + carry;
      t[j] = (uint64_t)cur;
      carry = (uint64_t)(cur >> 64);
    }
  }
  limbs<NL> r;
  for (int i = 0; i < NL; ++i) r.w[i] = t[NL + i];
  if (t[2 * NL] || limbs_cmp(r, C.n) >= 0) limbs_sub(r, r, C.n);
  return r;
}

template <int NL>
inline limbs<NL> mont_add(const limbs<NL>& a, const limbs<NL>& b, const MontCtx<NL>& C) {
  limbs<NL> r;
  uint64_t carry = limbs_add(r, a, b);
  if (carry || limbs_cmp(r, C.n) >= 0) limbs_sub(r, r, C.n);
  return r;
}

template <int NL>
inline limbs<NL> mont_sub(const limbs<NL>& a, const limbs<NL>& b, const MontCtx<NL>& C) {
  limbs<NL> r;
  if (limbs_sub(r, a, b)) limbs_add(r, r, C.n);
  return r;
}

template <int NL>
inline limbs<NL> mont_neg(const limbs<NL>& a, const MontCtx<NL>& C) {
  if (a.is_zero()) return a;
  limbs<NL> r;
  limbs_sub(r, C.n, a);
  return r;
}

// Active ring, one per limb width per thread.
template <int NL>
inline thread_local const MontCtx<NL>* tls_ring = nullptr;

template <int NL>
inline const MontCtx<NL>& ring() {
  assert(tls_ring<NL> != nullptr && "no active ring for this limb width");
  return *tls_ring<NL>;
}

template <int NL>
struct RingScope {
  const MontCtx<NL>* saved;
  MontCtx<NL> owned;
  explicit RingScope(const MontCtx<NL>& C) : saved(tls_ring<NL>) { tls_ring<NL> = &C; }
  RingScope(uint64_t p, int e) : saved(tls_ring<NL>) {
    owned.init(p, e);
    tls_ring<NL> = &owned;
  }
  ~RingScope() { tls_ring<NL> = saved; }
  RingScope(const RingScope&) = delete;
  RingScope& operator=(const RingScope&) = delete;
};

// Element of Z/p^e in Montgomery form. All operators use the thread's ring.
template <int NL>
struct Zq {
  limbs<NL> v;

  Zq() : v(limbs<NL>::zero()) {}

  static Zq zero() { return Zq(); }
  static Zq one() {
    Zq r;
    r.v = ring<NL>().r1;
    return r;
  }
  static Zq from_u64(uint64_t x) {
    const MontCtx<NL>& C = ring<NL>();
    limbs<NL> raw = limbs<NL>::zero();
    if (C.n_big <= x) raw = limbs_from_bigint<NL>(bigint(x) % C.n_big);
    else raw.w[0] = x;
    Zq r;
    r.v = mont_mul(raw, C.r2, C);
    return r;
  }
  static Zq from_int64(int64_t x) {
    if (x >= 0) return from_u64((uint64_t)x);
    return -from_u64((uint64_t)(-x));
  }
  static Zq from_bigint(const bigint& x) {
    const MontCtx<NL>& C = ring<NL>();
    bigint m = x % C.n_big;
    if (m < 0) m += C.n_big;
    Zq r;
    r.v = mont_mul(limbs_from_bigint<NL>(m), C.r2, C);
    return r;
  }

  // canonical residue in [0, p^e)
  bigint lift() const {
    const MontCtx<NL>& C = ring<NL>();
    limbs<NL> one = limbs<NL>::zero();
    one.w[0] = 1;
    return limbs_to_bigint(mont_mul(v, one, C));
  }
  // representative of smallest absolute value
  bigint lift_balanced() const {
    const MontCtx<NL>& C = ring<NL>();
    bigint t = lift();
    if (2 * t > C.n_big) t -= C.n_big;
    return t;
  }

  bool is_zero() const { return v.is_zero(); }
  bool operator==(const Zq& o) const { return v == o.v; }
  bool operator!=(const Zq& o) const { return !(v == o.v); }

  Zq operator+(const Zq& o) const {
    Zq r;
    r.v = mont_add(v, o.v, ring<NL>());
    return r;
  }
  Zq operator-(const Zq& o) const {
    Zq r;
    r.v = mont_sub(v, o.v, ring<NL>());
    return r;
  }
  Zq operator-() const {
    Zq r;
    r.v = mont_neg(v, ring<NL>());
    return r;
  }
  Zq operator*(const Zq& o) const {
    Zq r;
    r.v = mont_mul(v, o.v, ring<NL>());
    return r;
  }
  Zq& operator+=(const Zq& o) { return *this = *this + o; }
  Zq& operator-=(const Zq& o) { return *this = *this - o; }
  Zq& operator*=(const Zq& o) { return *this = *this * o; }

  // p-adic valuation of the canonical residue; e for zero.
  int val() const {
    const MontCtx<NL>& C = ring<NL>();
    if (is_zero()) return C.e;
    limbs<NL> one = limbs<NL>::zero();
    one.w[0] = 1;
    limbs<NL> t = mont_mul(v, one, C);
    int k = 0;
    for (;;) {
      limbs<NL> q = t;
      if (limbs_divmod_u64(q, C.p) != 0) return k;
      t = q;
      ++k;
      if (t.is_zero()) return C.e;
    }
  }

  bool is_unit() const {
    const MontCtx<NL>& C = ring<NL>();
    limbs<NL> t = v;  // p | x iff p | x*R
    return limbs_divmod_u64(t, C.p) != 0;
  }

  // Exact division by p^j; the result is meaningful modulo p^{e-j} only,
  // the caller tracks the precision drop. Throws if p^j does not divide.
  Zq div_exact_p(int j) const {
    const MontCtx<NL>& C = ring<NL>();
    limbs<NL> one = limbs<NL>::zero();
    one.w[0] = 1;
    limbs<NL> t = mont_mul(v, one, C);
    for (int i = 0; i < j; ++i) {
      if (limbs_divmod_u64(t, C.p) != 0)
        throw std::domain_error("div_exact_p: residue not divisible by p^j");
    }
    Zq r;
    r.v = mont_mul(t, C.r2, C);
    return r;
  }

  Zq pow(bigint exp) const {
    assert(exp >= 0);
    Zq base = *this, r = one();
    while (exp > 0) {
      if ((exp & 1) != 0) r *= base;
      base *= base;
      exp >>= 1;
    }
    return r;
  }

  // Newton lift of the inverse from its value mod p. Unit elements only.
  Zq inv() const {
    const MontCtx<NL>& C = ring<NL>();
    if (!is_unit()) throw std::domain_error("inv: element is not a unit");
    limbs<NL> one_raw = limbs<NL>::zero();
    one_raw.w[0] = 1;
    uint64_t a0 = limbs_divmod_u64_rem(mont_mul(v, one_raw, C), C.p);
    uint64_t i0 = powmod_u64(a0, C.p - 2, C.p);
    Zq x = from_u64(i0);
    Zq two = from_u64(2);
    int prec = 1;
    while (prec < C.e) {
      x = x * (two - *this * x);
      prec *= 2;
    }
    return x;
  }

 private:
  static uint64_t limbs_divmod_u64_rem(limbs<NL> a, uint64_t d) { return limbs_divmod_u64(a, d); }
  static uint64_t powmod_u64(uint64_t b, uint64_t e, uint64_t m) {
    unsigned __int128 r = 1, base = b % m;
    while (e) {
      if (e & 1) r = (r * base) % m;
      base = (base * (unsigned __int128)base) % m;
      e >>= 1;
    }
    return (uint64_t)r;
  }
};

// Smallest limb width whose guard leaves room for p^e.
inline int limbs_needed(uint64_t p, int e) {
  bigint n = 1;
  for (int i = 0; i < e; ++i) n *= p;
  int bits = (int)boost::multiprecision::msb(n) + 1;
  if (bits <= 64) return 1;
  if (bits <= 128) return 2;
  if (bits <= 192) return 3;
  throw std::overflow_error("modulus exceeds 192 bits");
}

}  // namespace opal
