#pragma once

// Newform fixtures: integer q-expansions with a label, level, weight and
// real character, serialized to a line-based text format. Reading and
// writing round-trip byte for byte; coefficient lines run "n a_n" with n
// consecutive from 1.

#include <cstdint>
#include <string>
#include <vector>

#include "opal/chars.hpp"

namespace opal {

struct Newform {
  std::string label;
  uint64_t level = 0;
  int weight = 0;
  DirichletChar character;  // modulus equals level
  std::vector<int64_t> an;  // an[0] = 0 unused, coefficients at 1 .. size()-1

  int qprec() const { return (int)an.size(); }
};

std::string newform_to_string(const Newform& f);
Newform newform_from_string(const std::string& text);

Newform read_newform(const std::string& path);
void write_newform(const std::string& path, const Newform& f);

}  // namespace opal
