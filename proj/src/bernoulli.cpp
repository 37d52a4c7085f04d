#include "opal/bernoulli.hpp"

#include <stdexcept>

namespace opal {

using boost::multiprecision::cpp_int;

namespace {

std::vector<cpp_int> binomial_row(int n) {
  std::vector<cpp_int> row(n + 1);
  row[0] = 1;
  for (int i = 1; i <= n; ++i) row[i] = row[i - 1] * (n - i + 1) / i;
  return row;
}

}  // namespace

std::vector<bigrat> bernoulli_list(int n) {
  if (n < 0) throw std::invalid_argument("bernoulli_list: negative index");
  std::vector<bigrat> b(n + 1);
  b[0] = 1;
  for (int m = 1; m <= n; ++m) {
    // sum_{j=0}^{m} C(m+1, j) B_j = 0
    auto row = binomial_row(m + 1);
    bigrat s = 0;
    for (int j = 0; j < m; ++j) s += bigrat(row[j]) * b[j];
    b[m] = -s / (m + 1);
  }
  return b;
}

bigrat bernoulli_chi(int k, int64_t disc) {
  if (k < 0) throw std::invalid_argument("bernoulli_chi: negative weight");
  if (disc == 0) return bernoulli_list(k)[k];
  DirichletChar chi = quadratic_char(disc, (uint64_t)(disc < 0 ? -disc : disc));
  uint64_t f = chi.conductor();
  auto b = bernoulli_list(k);
  auto row = binomial_row(k);
  // B_{k,chi} = f^{k-1} sum_a chi(a) B_k(a/f), with B_k the Bernoulli polynomial
  bigrat total = 0;
  for (uint64_t a = 1; a <= f; ++a) {
    int c = chi.eval((int64_t)a);
    if (c == 0) continue;
    bigrat x((cpp_int)a, (cpp_int)f);
    bigrat poly = 0, xpow = 1;
    for (int i = k; i >= 0; --i) {
      // term C(k, i) B_i x^{k-i}, accumulated with x^{k-i} built up as i descends
      poly += bigrat(row[i]) * b[i] * xpow;
      xpow *= x;
    }
    total += c * poly;
  }
  bigrat scale = 1;
  for (int i = 1; i < k; ++i) scale *= (int64_t)f;
  return scale * total;
}

}  // namespace opal
