#include "opal/modp.hpp"

#include "opal/arith.hpp"

namespace opal {

ModpRow modp_mul(const ModpRow& a, const ModpRow& b, int len, uint64_t p) {
  if (p < 3 || p >= (1u << 20)) throw std::invalid_argument("modp_mul: prime out of range");
  // len * (p-1)^2 stays far below 2^64, one reduction per output slot
  std::vector<uint64_t> acc((size_t)len, 0);
  int na = std::min<int>(len, (int)a.size());
  int nb = std::min<int>(len, (int)b.size());
  for (int i = 0; i < na; ++i) {
    uint64_t ai = a[(size_t)i];
    if (ai == 0) continue;
    int jmax = std::min(nb, len - i);
    for (int j = 0; j < jmax; ++j) acc[(size_t)(i + j)] += ai * b[(size_t)j];
  }
  ModpRow r((size_t)len);
  for (int i = 0; i < len; ++i) r[(size_t)i] = (uint32_t)(acc[(size_t)i] % p);
  return r;
}

ModpEchelon::ModpEchelon(uint64_t p_, int cols_, bool track_) : p(p_), cols(cols_), track(track_) {
  if (p < 3) throw std::invalid_argument("ModpEchelon: prime out of range");
  if (cols < 1) throw std::invalid_argument("ModpEchelon: need at least one column");
  row_of_pivot.assign((size_t)cols, -1);
}

bool ModpEchelon::absorb(ModpRow v) { return absorb_impl(std::move(v), nullptr); }

bool ModpEchelon::absorb(ModpRow v, std::vector<uint32_t>& combo) {
  if (!track) throw std::logic_error("ModpEchelon: provenance tracking disabled");
  return absorb_impl(std::move(v), &combo);
}

bool ModpEchelon::absorb_impl(ModpRow v, std::vector<uint32_t>* combo) {
  if ((int)v.size() != cols) throw std::invalid_argument("ModpEchelon: column count mismatch");
  // accv accumulates the eliminations applied to v, expanded over the
  // original vectors: current v = input + sum accv[s] * original_s
  std::vector<uint64_t> accv;
  if (track) accv.assign(rows.size(), 0);
  for (int col = 0; col < cols; ++col) {
    uint64_t lead = v[(size_t)col];
    if (lead == 0) continue;
    int r = row_of_pivot[(size_t)col];
    if (r < 0) {
      uint64_t inv = invmod64(lead, p);
      for (int i = col; i < cols; ++i) v[(size_t)i] = (uint32_t)(v[(size_t)i] * inv % p);
      if (track) {
        std::vector<uint32_t> a(rows.size() + 1, 0);
        for (size_t s = 0; s < accv.size(); ++s) a[s] = (uint32_t)(accv[s] * inv % p);
        a[rows.size()] = (uint32_t)(inv % p);
        aux.push_back(std::move(a));
      }
      row_of_pivot[(size_t)col] = (int)rows.size();
      pivots.push_back(col);
      rows.push_back(std::move(v));
      return true;
    }
    const ModpRow& w = rows[(size_t)r];
    uint64_t c = p - lead;
    for (int i = col; i < cols; ++i)
      v[(size_t)i] = (uint32_t)((v[(size_t)i] + c * w[(size_t)i]) % p);
    if (track) {
      const std::vector<uint32_t>& ar = aux[(size_t)r];
      for (size_t s = 0; s < ar.size(); ++s) accv[s] = (accv[s] + c * ar[s]) % p;
    }
  }
  if (combo) {
    combo->assign(rows.size(), 0);
    for (size_t s = 0; s < accv.size(); ++s) (*combo)[s] = (uint32_t)((p - accv[s]) % p);
  }
  return false;
}

}  // namespace opal
