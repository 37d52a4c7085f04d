#pragma once

// Exact Bernoulli numbers and their twists by a real Dirichlet character,
// over arbitrary-precision rationals.

#include <boost/multiprecision/cpp_int.hpp>
#include <vector>

#include "opal/chars.hpp"

namespace opal {

using bigrat = boost::multiprecision::cpp_rational;

// B_0 .. B_n with the convention B_1 = -1/2
std::vector<bigrat> bernoulli_list(int n);

// Generalized Bernoulli number B_{k, chi} for the primitive character of
// discriminant disc (disc = 0 meaning the trivial character, where this is
// the plain B_k except B_{1,1} = +1/2 never arises here).
bigrat bernoulli_chi(int k, int64_t disc);

}  // namespace opal
