#pragma once

// Dirichlet characters as used throughout: trivial characters and quadratic
// characters attached to a fundamental discriminant. Squarefree odd moduli
// only carry real characters of this shape, which covers every level the
// engine runs at; wider character groups are rejected loudly where they
// would matter (dimension formulas).

#include <cstdint>
#include <string>
#include <vector>

namespace opal {

struct DirichletChar {
  uint64_t modulus = 1;
  int64_t disc = 0;  // 0: trivial; otherwise a fundamental discriminant with |disc| | modulus

  bool is_trivial() const { return disc == 0; }
  uint64_t conductor() const { return disc == 0 ? 1 : (uint64_t)(disc < 0 ? -disc : disc); }
  bool is_odd() const { return disc < 0; }
  // chi(n) in {-1, 0, 1}
  int eval(int64_t n) const;
  // parity matches weight k (chi(-1) = (-1)^k)
  bool parity_matches(int k) const { return is_odd() == (k % 2 != 0); }
  bool operator==(const DirichletChar& o) const { return modulus == o.modulus && disc == o.disc; }

  std::string str() const;
};

DirichletChar trivial_char(uint64_t modulus);
DirichletChar quadratic_char(int64_t disc, uint64_t modulus);

// All real characters modulo a squarefree odd N: one per divisor d of N,
// with the discriminant of conductor d.
std::vector<DirichletChar> real_chars_mod(uint64_t N);

// Fundamental discriminant of the quadratic character of conductor d (odd
// squarefree d): d if d = 1 mod 4, else -d.
int64_t disc_of_conductor(uint64_t d);

}  // namespace opal
