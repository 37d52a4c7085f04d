#pragma once

// Mod-p companions to the q-series layer: dense coefficient rows over a
// small prime, truncated convolution, and an incremental row echelon used
// to certify spanning ranks. Rows are plain residue vectors so searches
// over many candidates stay cheap and exact.

#include <cstdint>
#include <stdexcept>
#include <vector>

#include "opal/qseries.hpp"

namespace opal {

using ModpRow = std::vector<uint32_t>;

// a * b truncated to len coefficients
ModpRow modp_mul(const ModpRow& a, const ModpRow& b, int len, uint64_t p);

// canonical residues mod p of a series prefix
template <int NL>
ModpRow modp_reduce(const QSeries<NL>& f, int len) {
  const MontCtx<NL>& C = ring<NL>();
  if (f.prec() < len) throw std::invalid_argument("modp_reduce: series too short");
  ModpRow r((size_t)len);
  for (int i = 0; i < len; ++i) {
    bigint m = f[i].lift() % C.p;
    r[(size_t)i] = m.convert_to<uint32_t>();
  }
  return r;
}

// Incremental forward elimination over F_p. Every stored row has its
// leading nonzero entry at a distinct pivot column, normalized to 1, so a
// single ascending sweep reduces any vector against the accepted span.
// With track enabled the sweep also remembers how each stored row expands
// over the original absorbed vectors, numbered in acceptance order.
struct ModpEchelon {
  uint64_t p;
  int cols;
  bool track;
  std::vector<ModpRow> rows;
  std::vector<int> pivots;        // pivot column of rows[i]
  std::vector<int> row_of_pivot;  // column -> row index, -1 if free
  std::vector<std::vector<uint32_t>> aux;  // rows[i] over the original vectors

  ModpEchelon(uint64_t p_, int cols_, bool track_ = false);
  int rank() const { return (int)rows.size(); }
  // Reduces v; if a nonzero remainder is left, normalizes and keeps it,
  // returning whether the rank grew.
  bool absorb(ModpRow v);
  // As above; when v lies in the span, combo receives coefficients over
  // the previously accepted originals with v = sum combo[s] * original_s.
  bool absorb(ModpRow v, std::vector<uint32_t>& combo);

 private:
  bool absorb_impl(ModpRow v, std::vector<uint32_t>* combo);
};

}  // namespace opal
