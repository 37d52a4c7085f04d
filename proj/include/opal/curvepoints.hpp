#pragma once

// Formal p-adic logarithm on elliptic curves, point recovery from a log
// value by torsion translation and rational reconstruction, and small
// integer relation detection. Internally everything runs on the scaled
// short model y^2 = x^3 - 27 c4 x - 54 c6 (an integer model for p >= 5),
// whose invariant differential is 1/6 of the long model's.

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "opal/arith.hpp"
#include "opal/bernoulli.hpp"
#include "opal/ellcurve.hpp"

namespace opal {

struct RatPoint {
  bool infinity = false;
  bigrat x = 0, y = 0;
};

// exact rational point arithmetic on the long Weierstrass model
bool on_curve(const EllCurve& E, const RatPoint& P);
RatPoint curve_neg(const EllCurve& E, const RatPoint& P);
RatPoint curve_add(const EllCurve& E, const RatPoint& P, const RatPoint& Q);
RatPoint curve_mul(const EllCurve& E, int64_t n, const RatPoint& P);

// Logarithm of a rational point against dx/(2y + a1 x + a3), exact as a
// residue mod p^e. The point is pushed into the formal group by an integer
// multiple: the smooth group order mod p times whatever small prime-to-p
// factors clear the remaining denominators; the division back is by a
// p-adic unit, so no precision is lost. Works at good and multiplicative
// primes, p >= 5.
bigint formal_log(const EllCurve& E, const RatPoint& P, uint64_t p, int e);

struct RecoverResult {
  std::vector<RatPoint> points;  // candidates passing the exact curve equation
  std::string note;              // diagnostics when empty
};

// All rational points of bounded height with logarithm lambda mod p^e:
// exponentiates lambda into E_1, translates by the torsion lift of every
// residue class in E(F_p), and rationally reconstructs coordinates.
// Requires good reduction at p. Bounds of 0 mean floor(sqrt(p^e/2)).
RecoverResult recover_point(const EllCurve& E, const bigint& lambda, uint64_t p, int e,
                            const bigint& num_bound = 0, const bigint& den_bound = 0);

// One group-law addition on y^2 = x^3 + A x + B over Z/p^e, inputs and
// output as projective triples of canonical residues: (0:1:0) is the
// identity, affine points are (x:y:1), and a sum inside the formal group
// comes back as (t:-1:w(t)). The chord slope is taken as (y2-y1)/(x2-x1)
// or (x1^2+x1x2+x2^2+A)/(y1+y2), whichever denominator is least divisible
// by p; the two agree on the curve, every division is by a unit after an
// explicit power of p is split off, and valuations are read from residues,
// never from exact comparisons, so the sum is exact at full precision.
std::array<bigint, 3> short_padd_mod(uint64_t p, int e, const bigint& A, const bigint& B,
                                     const std::array<bigint, 3>& P,
                                     const std::array<bigint, 3>& Q);

struct RelationResult {
  bool found = false;
  std::vector<bigint> coeffs;  // c_0 + c_1 t + ... + c_d t^d, primitive, leading > 0
};

// Smallest integer polynomial of degree <= degree satisfied by t mod p^e,
// by lattice reduction on the columns 1, t, ..., t^degree; failure when the
// shortest relation exceeds the height bound.
RelationResult detect_relation(const bigint& t, uint64_t p, int e, int degree,
                               const bigint& height_bound);

}  // namespace opal
