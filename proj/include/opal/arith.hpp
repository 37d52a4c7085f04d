#pragma once

// Elementary number theory helpers shared across the library.

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "opal/ring.hpp"

namespace opal {

int64_t gcd64(int64_t a, int64_t b);
// g = gcd(a,b) and x,y with a x + b y = g
int64_t xgcd64(int64_t a, int64_t b, int64_t& x, int64_t& y);
uint64_t powmod64(uint64_t b, uint64_t e, uint64_t m);
uint64_t invmod64(uint64_t a, uint64_t m);

// Kronecker symbol (a|n), full generality including negatives and even n.
int kronecker64(int64_t a, int64_t n);

bool is_prime_u64(uint64_t n);
std::vector<uint32_t> primes_upto(uint32_t n);
std::vector<std::pair<uint64_t, int>> factor64(uint64_t n);
std::vector<uint64_t> divisors64(uint64_t n);
int valuation64(uint64_t n, uint64_t p);
bool is_squarefree64(uint64_t n);

bigint pow_big(uint64_t base, int e);

// Unique n/d with |n| <= num_bound, 0 < d <= den_bound, gcd(d, m) = 1 and
// n = a d mod m, provided 2 * num_bound * den_bound < m; found by the
// half-extended Euclid sweep over the continued-fraction convergents.
std::optional<std::pair<bigint, bigint>> rational_reconstruct_big(const bigint& a, const bigint& m,
                                                                 const bigint& num_bound,
                                                                 const bigint& den_bound);

}  // namespace opal
