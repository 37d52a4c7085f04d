#pragma once

// Dimensions of spaces of modular forms with character, for squarefree odd
// level and real character. Cusp dimensions come from the standard trace
// style closed formula; Eisenstein dimensions from counting new pairs of
// characters with a level shift. Exactness is asserted throughout (every
// rational intermediate must collapse to an integer).

#include <cstdint>

#include "opal/chars.hpp"

namespace opal {

// dim S_k(N, chi), k >= 2. Throws for k = 1 (not supported) and checks the
// parity chi(-1) = (-1)^k; wrong-parity spaces are zero.
int64_t dim_sk(uint64_t N, const DirichletChar& chi, int k);

// dim Eis_k(N, chi), the Eisenstein complement, k >= 2.
int64_t dim_eis(uint64_t N, const DirichletChar& chi, int k);

// dim M_k(N, chi) for k >= 0 except k = 1, which throws.
int64_t dim_mk(uint64_t N, const DirichletChar& chi, int k);

// [SL_2(Z) : Gamma_0(N)] = N prod (1 + 1/p)
uint64_t psi_index(uint64_t N);

// Sturm bound for M_k(Gamma_0(N), chi): forms agreeing to this many initial
// q-coefficients (a_0 .. a_{bound-1} known, i.e. prec >= bound) are equal.
int64_t sturm_bound(uint64_t N, int k);

}  // namespace opal
