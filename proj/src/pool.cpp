#include "opal/pool.hpp"

#include "opal/arith.hpp"

namespace opal {

namespace {

std::string char_tag(int64_t d) { return d == 0 ? "1" : std::to_string(d); }

std::string shift_tag(uint64_t t) { return t > 1 ? "[" + std::to_string(t) + "]" : ""; }

// product of the real characters with the given fundamental discriminants
int64_t disc_compose(int64_t a, int64_t b) {
  if (a == 0) return b;
  if (b == 0) return a;
  if (a == b) return 0;
  if (gcd64(a < 0 ? -a : a, b < 0 ? -b : b) != 1)
    throw std::logic_error("disc_compose: overlapping conductors");
  return a * b;
}

}  // namespace

std::vector<PoolSeed> pool_candidates(
    uint64_t N, const DirichletChar& chiP, int b, const std::vector<Newform>& extra,
    const std::map<std::pair<int, int64_t>, std::vector<std::string>>& have) {
  if (b < 2) throw std::invalid_argument("pool_candidates: weight below 2");
  std::vector<PoolSeed> out;

  if (b == 2 && chiP.is_trivial()) {
    for (uint64_t t : divisors64(N)) {
      if (t == 1) continue;
      PoolSeed s;
      s.kind = PoolSeed::Kind::eis_two;
      s.b = 2;
      s.t = t;
      s.name = "E2[" + std::to_string(t) + "]";
      out.push_back(std::move(s));
    }
  }

  // Eisenstein pairs: conductors c1 c2 = cond(chi'), coprime, shifted by t
  uint64_t c0 = chiP.conductor();
  for (uint64_t c1 : divisors64(c0)) {
    uint64_t c2 = c0 / c1;
    if (gcd64((int64_t)c1, (int64_t)c2) != 1) continue;
    int64_t d1 = c1 == 1 ? 0 : disc_of_conductor(c1);
    int64_t d2 = c2 == 1 ? 0 : disc_of_conductor(c2);
    if (b == 2 && d1 == 0 && d2 == 0) continue;  // covered by the shifted combinations
    for (uint64_t t : divisors64(N / c0)) {
      PoolSeed s;
      s.kind = PoolSeed::Kind::eis;
      s.b = b;
      s.d1 = d1;
      s.d2 = d2;
      s.t = t;
      s.name = "E" + std::to_string(b) + "(" + char_tag(d1) + "," + char_tag(d2) + ")" +
               shift_tag(t);
      out.push_back(std::move(s));
    }
  }

  // ingested forms of the right weight and character, at every level shift
  for (size_t idx = 0; idx < extra.size(); ++idx) {
    const Newform& f = extra[idx];
    if (f.weight != b) continue;
    if (f.level == 0 || N % f.level != 0) continue;
    if (f.character.disc != chiP.disc) continue;
    for (uint64_t t : divisors64(N / f.level)) {
      PoolSeed s;
      s.kind = PoolSeed::Kind::cusp;
      s.b = b;
      s.t = t;
      s.src = idx;
      s.name = f.label + shift_tag(t);
      out.push_back(std::move(s));
    }
  }

  // products of accepted lower weight elements
  for (int b1 = 1; 2 * b1 <= b; ++b1) {
    int b2 = b - b1;
    for (const auto& [k1, names1] : have) {
      if (k1.first != b1) continue;
      for (const auto& [k2, names2] : have) {
        if (k2.first != b2) continue;
        if (disc_compose(k1.second, k2.second) != chiP.disc) continue;
        if (b1 == b2 && k2 < k1) continue;  // unordered pair of lists
        bool same = b1 == b2 && k1 == k2;
        for (size_t i1 = 0; i1 < names1.size(); ++i1) {
          for (size_t i2 = same ? i1 : 0; i2 < names2.size(); ++i2) {
            PoolSeed s;
            s.kind = PoolSeed::Kind::prod;
            s.b = b;
            s.b1 = b1;
            s.e1 = k1.second;
            s.i1 = i1;
            s.b2 = b2;
            s.e2 = k2.second;
            s.i2 = i2;
            s.name = names1[i1] + "*" + names2[i2];
            out.push_back(std::move(s));
          }
        }
      }
    }
  }
  return out;
}

}  // namespace opal
