#pragma once

// Generator pools: bases of the classical spaces M_b(N, chi') for weights
// 2 <= b <= B, chi' running over the group generated by the nebentypus,
// assembled from Eisenstein series, level shifts, ingested cusp form
// files, and products of lower weight elements. Candidates are tried in a
// fixed deterministic order and certified independent by their rank mod p,
// so a completed list is a basis of the space it sits in; a pool that
// cannot reach the classical dimension reports every deficient (weight,
// character) pair instead of returning a short span. An odd nebentypus
// additionally contributes the weight one Eisenstein series as an
// uncertified product helper stored under weight 1.

#include <algorithm>
#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "opal/arith.hpp"
#include "opal/chars.hpp"
#include "opal/dims.hpp"
#include "opal/eisenstein.hpp"
#include "opal/modp.hpp"
#include "opal/newform.hpp"
#include "opal/qseries.hpp"

namespace opal {

// Replayable recipe for one candidate element. Products reference accepted
// elements of strictly smaller weight by (weight, disc, position), so a
// recipe list fixes the pool contents at any coefficient precision.
struct PoolSeed {
  enum class Kind { eis, eis_two, cusp, prod };
  Kind kind = Kind::eis;
  int b = 0;               // total weight
  int64_t d1 = 0, d2 = 0;  // eis: discriminants of the pair, 0 for trivial
  uint64_t t = 1;          // eis, cusp: level shift; eis_two: the divisor in 24(E2 - t E2(q^t))
  size_t src = 0;          // cusp: index into the ingested list
  int b1 = 0, b2 = 0;      // prod: factor weights
  int64_t e1 = 0, e2 = 0;  // prod: factor discs
  size_t i1 = 0, i2 = 0;   // prod: factor positions
  std::string name;
};

struct PoolDeficit {
  int b = 0;
  int64_t disc = 0;
  int64_t got = 0, want = 0;
};

struct PoolDeficiency : std::runtime_error {
  std::vector<PoolDeficit> items;
  PoolDeficiency(const std::string& msg, std::vector<PoolDeficit> it)
      : std::runtime_error(msg), items(std::move(it)) {}
};

// Candidate recipes for M_b(N, chi'), b >= 2, in the fixed order: Eisenstein
// series (pairs by ascending first conductor, then ascending shift; the
// weight two trivial datum becomes the shifted combinations), ingested forms
// (given order, then ascending shift), then products (ascending lower
// weight, factor lists in key order, positions ascending). `have` maps
// (weight, disc) to the names already accepted at lower weights.
std::vector<PoolSeed> pool_candidates(
    uint64_t N, const DirichletChar& chiP, int b, const std::vector<Newform>& extra,
    const std::map<std::pair<int, int64_t>, std::vector<std::string>>& have);

template <int NL>
struct PoolElem {
  std::string name;
  ModpRow modp;      // reduction mod (p, q^qprec_modp)
  QSeries<NL> full;  // image in Z[[q]] / (p^e, q^qprec_full)
  int ploss = 0;     // coefficients meaningful modulo p^{e - ploss} only
};

template <int NL>
struct GeneratorPool {
  uint64_t N = 0;
  DirichletChar chi;
  int B = 0;
  int qprec_modp = 0;
  int qprec_full = 0;
  std::map<std::pair<int, int64_t>, std::vector<PoolElem<NL>>> lists;

  size_t count(int b, int64_t disc) const {
    auto it = lists.find({b, disc});
    return it == lists.end() ? 0 : it->second.size();
  }
  const PoolElem<NL>& at(int b, int64_t disc, size_t i) const {
    auto it = lists.find({b, disc});
    if (it == lists.end()) throw std::out_of_range("GeneratorPool: no such list");
    return it->second.at(i);
  }
  size_t total() const {
    size_t n = 0;
    for (const auto& [k, v] : lists) n += v.size();
    return n;
  }
  int max_ploss() const {
    int m = 0;
    for (const auto& [k, v] : lists)
      for (const auto& el : v) m = std::max(m, el.ploss);
    return m;
  }
};

template <int NL>
QSeries<NL> pool_expand(const PoolSeed& s, const GeneratorPool<NL>& pool,
                        const std::vector<Newform>& extra, int qprec) {
  switch (s.kind) {
    case PoolSeed::Kind::eis_two:
      return e2_shifted<NL>(s.t, qprec);
    case PoolSeed::Kind::eis: {
      DirichletChar c1 = s.d1 == 0 ? trivial_char(1)
                                   : quadratic_char(s.d1, (uint64_t)(s.d1 < 0 ? -s.d1 : s.d1));
      DirichletChar c2 = s.d2 == 0 ? trivial_char(1)
                                   : quadratic_char(s.d2, (uint64_t)(s.d2 < 0 ? -s.d2 : s.d2));
      int src_prec = (int)((qprec + (int)s.t - 1) / (int)s.t);
      QSeries<NL> f = eisenstein_qexp<NL>(s.b, c1, c2, src_prec);
      return s.t == 1 ? f : frobenius_vp(f, s.t, qprec);
    }
    case PoolSeed::Kind::cusp: {
      const Newform& f = extra.at(s.src);
      int64_t need = (qprec - 1) / (int64_t)s.t;  // largest n with n t < qprec
      if ((int64_t)f.an.size() <= need)
        throw std::runtime_error("pool: fixture " + f.label + " holds " +
                                 std::to_string(f.an.size() ? f.an.size() - 1 : 0) +
                                 " coefficients, needs " + std::to_string(need));
      QSeries<NL> r(qprec);
      for (int64_t n = 1; n <= need; ++n)
        r[(int)(n * (int64_t)s.t)] = Zq<NL>::from_int64(f.an[(size_t)n]);
      return r;
    }
    case PoolSeed::Kind::prod:
      return series_mul(pool.at(s.b1, s.e1, s.i1).full, pool.at(s.b2, s.e2, s.i2).full, qprec);
  }
  throw std::logic_error("pool_expand: unreachable");
}

template <int NL>
GeneratorPool<NL> build_pool(uint64_t N, const DirichletChar& chi, int B, int qprec_modp,
                             int qprec_full, const std::vector<Newform>& extra) {
  const MontCtx<NL>& C = ring<NL>();
  if (chi.modulus != N) throw std::invalid_argument("build_pool: character modulus mismatch");
  if (N % C.p == 0) throw std::invalid_argument("build_pool: p must not divide the tame level");
  if (B < 1) throw std::invalid_argument("build_pool: weight bound must be positive");
  if (qprec_modp < 1 || qprec_modp > qprec_full)
    throw std::invalid_argument("build_pool: need 1 <= qprec_modp <= qprec_full");
  if (B >= 2 && qprec_modp < sturm_bound(N, B))
    throw std::invalid_argument("build_pool: qprec_modp below the Sturm bound at the weight bound");

  GeneratorPool<NL> pool;
  pool.N = N;
  pool.chi = chi;
  pool.B = B;
  pool.qprec_modp = qprec_modp;
  pool.qprec_full = qprec_full;

  if (chi.is_odd()) {
    // weight one helper E_1(1, chi) and its level shifts, kept outside the
    // certified weights: only ever used as a product factor
    std::vector<PoolElem<NL>> helpers;
    for (uint64_t t : divisors64(N / chi.conductor())) {
      PoolSeed s;
      s.kind = PoolSeed::Kind::eis;
      s.b = 1;
      s.d2 = chi.disc;
      s.t = t;
      s.name = "E1(1," + std::to_string(chi.disc) + ")" + (t > 1 ? "[" + std::to_string(t) + "]" : "");
      QSeries<NL> full = pool_expand(s, pool, extra, qprec_full);
      ModpRow row = modp_reduce(full, qprec_modp);
      helpers.push_back(PoolElem<NL>{s.name, std::move(row), std::move(full)});
    }
    pool.lists[{1, chi.disc}] = std::move(helpers);
  }

  std::vector<DirichletChar> charlist = {trivial_char(N)};
  if (!chi.is_trivial()) charlist.push_back(chi);
  std::vector<PoolDeficit> defic;
  for (int b = 2; b <= B; ++b) {
    for (const DirichletChar& chiP : charlist) {
      int64_t d = dim_mk(N, chiP, b);
      if (d == 0) continue;
      std::map<std::pair<int, int64_t>, std::vector<std::string>> have;
      for (const auto& [key, elems] : pool.lists) {
        auto& names = have[key];
        for (const auto& el : elems) names.push_back(el.name);
      }
      ModpEchelon ech(C.p, qprec_modp, true);
      std::vector<PoolElem<NL>> acc;

      // A rejected candidate can still enlarge the lattice: its reduction
      // against the accepted span vanishes mod p up to qprec_modp, and
      // qprec_modp clears the Sturm bound, so the full combination is
      // divisible by p in every coefficient and dividing lands back in
      // M_b(N, chi'). Each division costs one digit of ring precision; a
      // candidate that is Z_p-dependent on the span never terminates (the
      // chain peels one p-adic digit of the coefficients per lap), so the
      // chain gives up once the ring cannot certify another digit.
      auto saturate = [&](const std::string& name, QSeries<NL> full, int ploss,
                          std::vector<uint32_t> combo) {
        int divs = 0;
        for (;;) {
          QSeries<NL> u(qprec_full);
          int worst = ploss;
          for (int i = 0; i < qprec_full; ++i) {
            Zq<NL> x = full[i];
            for (size_t s = 0; s < combo.size(); ++s)
              if (combo[s] != 0) x -= Zq<NL>::from_u64(combo[s]) * acc[s].full[i];
            u[i] = x;
          }
          for (size_t s = 0; s < combo.size(); ++s)
            if (combo[s] != 0) worst = std::max(worst, acc[s].ploss);
          if (worst + 1 >= C.e) return;
          for (int i = 0; i < qprec_full; ++i)
            if (!u[i].is_zero() && u[i].val() < 1)
              throw std::logic_error(
                  "build_pool: saturation combination not divisible by p beyond the certified "
                  "window");
          QSeries<NL> h(qprec_full);
          bool zero_series = true;
          for (int i = 0; i < qprec_full; ++i) {
            h[i] = u[i].div_exact_p(1);
            if (!h[i].is_zero()) zero_series = false;
          }
          ++divs;
          ploss = worst + 1;
          if (zero_series) return;  // exact relation over the ring, a true dud
          ModpRow hrow = modp_reduce(h, qprec_modp);
          bool allzero = true;
          for (uint32_t x : hrow)
            if (x != 0) {
              allzero = false;
              break;
            }
          if (allzero) {
            // still divisible by p: the window vanishes, Sturm extends it
            full = std::move(h);
            combo.assign(acc.size(), 0);
            continue;
          }
          std::vector<uint32_t> next;
          if (ech.absorb(hrow, next)) {
            acc.push_back(PoolElem<NL>{name + std::string((size_t)divs, '\''), std::move(hrow),
                                       std::move(h), ploss});
            return;
          }
          full = std::move(h);
          combo = std::move(next);
        }
      };

      struct Stash {
        std::string name;
        QSeries<NL> full;
        int ploss;
        std::vector<uint32_t> combo;
      };
      std::vector<Stash> stash;       // rejected non-products, kept at full precision
      std::vector<PoolSeed> dudprod;  // rejected products, recomputable from the seed
      for (const PoolSeed& s : pool_candidates(N, chiP, b, extra, have)) {
        if ((int64_t)acc.size() == d) break;
        ModpRow row;
        QSeries<NL> full;
        std::vector<uint32_t> combo;
        if (s.kind == PoolSeed::Kind::prod) {
          // cheap mod-p product first; duds never cost a full multiplication
          row = modp_mul(pool.at(s.b1, s.e1, s.i1).modp, pool.at(s.b2, s.e2, s.i2).modp,
                         qprec_modp, C.p);
          if (!ech.absorb(row, combo)) {
            dudprod.push_back(s);
            continue;
          }
          full = pool_expand(s, pool, extra, qprec_full);
          if (modp_reduce(full, qprec_modp) != row)
            throw std::logic_error("build_pool: mod-p product disagrees with the full product");
          int ploss = std::max(pool.at(s.b1, s.e1, s.i1).ploss, pool.at(s.b2, s.e2, s.i2).ploss);
          acc.push_back(PoolElem<NL>{s.name, std::move(row), std::move(full), ploss});
        } else {
          full = pool_expand(s, pool, extra, qprec_full);
          row = modp_reduce(full, qprec_modp);
          if (!ech.absorb(row, combo)) {
            stash.push_back(Stash{s.name, std::move(full), 0, std::move(combo)});
            continue;
          }
          acc.push_back(PoolElem<NL>{s.name, std::move(row), std::move(full), 0});
        }
      }
      for (Stash& st : stash) {
        if ((int64_t)acc.size() == d) break;
        saturate(st.name, std::move(st.full), st.ploss, std::move(st.combo));
      }
      for (const PoolSeed& s : dudprod) {
        if ((int64_t)acc.size() == d) break;
        // the accepted span only grew since the cheap rejection, so the
        // product is still dependent; recompute it for its saturation try
        QSeries<NL> full = pool_expand(s, pool, extra, qprec_full);
        ModpRow row = modp_reduce(full, qprec_modp);
        if (modp_mul(pool.at(s.b1, s.e1, s.i1).modp, pool.at(s.b2, s.e2, s.i2).modp, qprec_modp,
                     C.p) != row)
          throw std::logic_error("build_pool: mod-p product disagrees with the full product");
        std::vector<uint32_t> combo;
        if (ech.absorb(row, combo)) {
          throw std::logic_error("build_pool: a rejected product became independent");
        }
        int ploss = std::max(pool.at(s.b1, s.e1, s.i1).ploss, pool.at(s.b2, s.e2, s.i2).ploss);
        saturate(s.name, std::move(full), ploss, std::move(combo));
      }
      if ((int64_t)acc.size() < d)
        defic.push_back(PoolDeficit{b, chiP.disc, (int64_t)acc.size(), d});
      if (!acc.empty()) pool.lists[{b, chiP.disc}] = std::move(acc);
    }
  }
  if (!defic.empty()) {
    std::string msg = "generator pool deficient:";
    for (const auto& it : defic)
      msg += " weight " + std::to_string(it.b) + " character " +
             (it.disc == 0 ? std::string("trivial") : "disc:" + std::to_string(it.disc)) +
             " reached rank " + std::to_string(it.got) + " of " + std::to_string(it.want) + ";";
    msg += " supply cusp form files for the listed spaces";
    throw PoolDeficiency(msg, std::move(defic));
  }
  return pool;
}

}  // namespace opal
