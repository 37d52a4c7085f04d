#include "opal/chars.hpp"

#include <stdexcept>

#include "opal/arith.hpp"

namespace opal {

int DirichletChar::eval(int64_t n) const {
  uint64_t nm = (uint64_t)(n % (int64_t)modulus);
  uint64_t a = n < 0 ? (uint64_t)(((n % (int64_t)modulus) + (int64_t)modulus) % (int64_t)modulus)
                     : nm;
  if (modulus > 1 && gcd64(a, modulus) != 1) return 0;
  if (disc == 0) return 1;
  return kronecker64(disc, n);
}

std::string DirichletChar::str() const {
  if (disc == 0) return "trivial";
  return "disc:" + std::to_string(disc);
}

DirichletChar trivial_char(uint64_t modulus) {
  if (modulus == 0) throw std::invalid_argument("character modulus must be positive");
  return DirichletChar{modulus, 0};
}

DirichletChar quadratic_char(int64_t disc, uint64_t modulus) {
  if (modulus == 0) throw std::invalid_argument("character modulus must be positive");
  if (disc == 0) return DirichletChar{modulus, 0};
  uint64_t f = (uint64_t)(disc < 0 ? -disc : disc);
  if (f % 2 == 0 || !is_squarefree64(f))
    throw std::invalid_argument("only odd fundamental discriminants are supported");
  int64_t r = ((disc % 4) + 4) % 4;
  if (r != 1) throw std::invalid_argument("not a fundamental discriminant: " + std::to_string(disc));
  if (modulus % f != 0)
    throw std::invalid_argument("character conductor does not divide the modulus");
  return DirichletChar{modulus, disc};
}

int64_t disc_of_conductor(uint64_t d) {
  if (d == 0 || d % 2 == 0 || !is_squarefree64(d))
    throw std::invalid_argument("conductor must be odd and squarefree");
  return d % 4 == 1 ? (int64_t)d : -(int64_t)d;
}

std::vector<DirichletChar> real_chars_mod(uint64_t N) {
  if (N == 0 || N % 2 == 0 || !is_squarefree64(N))
    throw std::invalid_argument("real character enumeration needs odd squarefree modulus");
  std::vector<DirichletChar> out;
  for (uint64_t d : divisors64(N)) {
    if (d == 1)
      out.push_back(trivial_char(N));
    else
      out.push_back(quadratic_char(disc_of_conductor(d), N));
  }
  return out;
}

}  // namespace opal
