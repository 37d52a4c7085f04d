#include "opal/arith.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace opal {

int64_t gcd64(int64_t a, int64_t b) {
  if (a < 0) a = -a;
  if (b < 0) b = -b;
  while (b) {
    int64_t t = a % b;
    a = b;
    b = t;
  }
  return a;
}

int64_t xgcd64(int64_t a, int64_t b, int64_t& x, int64_t& y) {
  int64_t x0 = 1, y0 = 0, x1 = 0, y1 = 1;
  while (b) {
    int64_t q = a / b;
    int64_t t = a - q * b;
    a = b;
    b = t;
    t = x0 - q * x1;
    x0 = x1;
    x1 = t;
    t = y0 - q * y1;
    y0 = y1;
    y1 = t;
  }
  if (a < 0) {
    a = -a;
    x0 = -x0;
    y0 = -y0;
  }
  x = x0;
  y = y0;
  return a;
}

uint64_t powmod64(uint64_t b, uint64_t e, uint64_t m) {
  unsigned __int128 r = 1, base = b % m;
  while (e) {
    if (e & 1) r = (r * base) % m;
    base = (base * base) % m;
    e >>= 1;
  }
  return (uint64_t)r;
}

uint64_t invmod64(uint64_t a, uint64_t m) {
  int64_t x, y;
  int64_t g = xgcd64((int64_t)(a % m), (int64_t)m, x, y);
  if (g != 1) throw std::domain_error("invmod64: not invertible");
  int64_t r = x % (int64_t)m;
  if (r < 0) r += (int64_t)m;
  return (uint64_t)r;
}

int kronecker64(int64_t a, int64_t n) {
  if (n == 0) return (a == 1 || a == -1) ? 1 : 0;
  if ((a & 1) == 0 && (n & 1) == 0) return 0;
  int result = 1;
  if (n < 0) {
    n = -n;
    if (a < 0) result = -result;
  }
  // pull out powers of two from n, using (a|2) = (2|a)
  int v = 0;
  while ((n & 1) == 0) {
    n >>= 1;
    ++v;
  }
  if (v & 1) {
    int64_t am = ((a % 8) + 8) % 8;
    if (am == 3 || am == 5) result = -result;
  }
  a %= n;
  if (a < 0) a += n;
  while (a != 0) {
    v = 0;
    while ((a & 1) == 0) {
      a >>= 1;
      ++v;
    }
    if (v & 1) {
      int64_t nm = n % 8;
      if (nm == 3 || nm == 5) result = -result;
    }
    // quadratic reciprocity for odd positive a, n
    if ((a % 4) == 3 && (n % 4) == 3) result = -result;
    int64_t t = n % a;
    n = a;
    a = t;
  }
  return n == 1 ? result : 0;
}

bool is_prime_u64(uint64_t n) {
  if (n < 2) return false;
  for (uint64_t p : {2ull, 3ull, 5ull, 7ull, 11ull, 13ull, 17ull, 19ull, 23ull, 29ull, 31ull, 37ull}) {
    if (n % p == 0) return n == p;
  }
  // deterministic Miller-Rabin for 64-bit inputs
  uint64_t d = n - 1;
  int s = 0;
  while ((d & 1) == 0) {
    d >>= 1;
    ++s;
  }
  for (uint64_t a : {2ull, 3ull, 5ull, 7ull, 11ull, 13ull, 17ull, 19ull, 23ull, 29ull, 31ull, 37ull}) {
    uint64_t x = powmod64(a % n, d, n);
    if (x == 1 || x == n - 1) continue;
    bool composite = true;
    for (int i = 1; i < s; ++i) {
      x = (uint64_t)(((unsigned __int128)x * x) % n);
      if (x == n - 1) {
        composite = false;
        break;
      }
    }
    if (composite) return false;
  }
  return true;
}

std::vector<uint32_t> primes_upto(uint32_t n) {
  std::vector<bool> sieve(n + 1, true);
  std::vector<uint32_t> out;
  for (uint32_t i = 2; i <= n; ++i) {
    if (sieve[i]) {
      out.push_back(i);
      for (uint64_t j = (uint64_t)i * i; j <= n; j += i) sieve[j] = false;
    }
  }
  return out;
}

std::vector<std::pair<uint64_t, int>> factor64(uint64_t n) {
  std::vector<std::pair<uint64_t, int>> f;
  for (uint64_t p = 2; p * p <= n; p += (p == 2 ? 1 : 2)) {
    if (n % p == 0) {
      int e = 0;
      while (n % p == 0) {
        n /= p;
        ++e;
      }
      f.push_back({p, e});
    }
  }
  if (n > 1) f.push_back({n, 1});
  return f;
}

std::vector<uint64_t> divisors64(uint64_t n) {
  std::vector<uint64_t> d{1};
  for (auto [p, e] : factor64(n)) {
    size_t sz = d.size();
    uint64_t pk = 1;
    for (int i = 1; i <= e; ++i) {
      pk *= p;
      for (size_t j = 0; j < sz; ++j) d.push_back(d[j] * pk);
    }
  }
  std::sort(d.begin(), d.end());
  return d;
}

int valuation64(uint64_t n, uint64_t p) {
  int v = 0;
  while (n && n % p == 0) {
    n /= p;
    ++v;
  }
  return v;
}

bool is_squarefree64(uint64_t n) {
  if (n == 0) return false;
  for (auto [p, e] : factor64(n))
    if (e > 1) return false;
  return true;
}

bigint pow_big(uint64_t base, int e) {
  bigint r = 1;
  for (int i = 0; i < e; ++i) r *= base;
  return r;
}

std::optional<std::pair<bigint, bigint>> rational_reconstruct_big(const bigint& a, const bigint& m,
                                                                 const bigint& num_bound,
                                                                 const bigint& den_bound) {
  bigint r0 = m, r1 = a % m;
  if (r1 < 0) r1 += m;
  bigint t0 = 0, t1 = 1;
  while (r1 > num_bound) {
    bigint q = r0 / r1;
    bigint r2 = r0 - q * r1;
    r0 = r1;
    r1 = r2;
    bigint t2 = t0 - q * t1;
    t0 = t1;
    t1 = t2;
  }
  bigint n = r1, d = t1;
  if (d < 0) {
    n = -n;
    d = -d;
  }
  if (d == 0 || d > den_bound) return std::nullopt;
  if (boost::multiprecision::gcd(n, d) != 1) return std::nullopt;
  if (boost::multiprecision::gcd(d, m) != 1) return std::nullopt;
  return std::make_pair(n, d);
}

}  // namespace opal
