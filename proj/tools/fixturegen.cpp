// Generates the newform fixture files consumed by the tests and the CLI:
// weight 2 forms from elliptic curve models (point counting), the two CM
// forms with the quadratic character mod 43, and curve models recovered by
// a small box search pinned down by coefficient prefixes.

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <iostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "opal/arith.hpp"
#include "opal/ellcurve.hpp"
#include "opal/newform.hpp"
#include "opal/sha1.hpp"

using namespace opal;

namespace {

void check_disc_support(const EllCurve& E) {
  int64_t d = E.disc();
  if (d == 0) throw std::runtime_error(E.label + ": singular model");
  uint64_t ad = (uint64_t)(d < 0 ? -d : d);
  for (auto [p, e] : factor64(E.conductor)) {
    (void)e;
    while (ad % p == 0) ad /= p;
  }
  if (ad != 1) throw std::runtime_error(E.label + ": discriminant support exceeds the level");
}

Newform curve_newform(const EllCurve& E, int qprec) {
  check_disc_support(E);
  Newform f;
  f.label = E.label;
  f.level = E.conductor;
  f.weight = 2;
  f.character = trivial_char(E.conductor);
  f.an = curve_an(E, qprec);
  return f;
}

// box search over small Weierstrass models for a curve of the given
// conductor whose newform matches the prime-index prefix
EllCurve find_curve(const std::string& label, uint64_t conductor,
                    const std::vector<std::pair<uint64_t, int64_t>>& prefix) {
  std::vector<EllCurve> hits;
  for (int64_t a1 = 0; a1 <= 1; ++a1)
    for (int64_t a2 = -1; a2 <= 1; ++a2)
      for (int64_t a3 = 0; a3 <= 1; ++a3)
        for (int64_t a4 = -30; a4 <= 30; ++a4)
          for (int64_t a6 = -60; a6 <= 60; ++a6) {
            EllCurve E{label, conductor, a1, a2, a3, a4, a6};
            int64_t d = E.disc();
            if (d == 0) continue;
            uint64_t ad = (uint64_t)(d < 0 ? -d : d);
            for (auto [p, e] : factor64(conductor)) {
              (void)e;
              while (ad % p == 0) ad /= p;
            }
            if (ad != 1) continue;
            bool ok = true;
            for (auto [p, want] : prefix)
              if (curve_ap(E, p) != want) {
                ok = false;
                break;
              }
            if (ok) hits.push_back(E);
          }
  if (hits.empty()) throw std::runtime_error(label + ": no model found in the search box");
  auto ref = curve_an(hits[0], 200);
  for (size_t i = 1; i < hits.size(); ++i)
    if (curve_an(hits[i], 200) != ref)
      throw std::runtime_error(label + ": search box hit two distinct isogeny classes");
  return hits[0];
}

// CM forms for Z[w], w^2 = w - 11: one half the sum of alpha^(k-1) q^(N alpha)
Newform cm_form_43(int weight, int qprec) {
  if (weight != 3 && weight != 5) throw std::invalid_argument("cm_form_43: weight 3 or 5");
  std::vector<int64_t> c0(qprec, 0), c1(qprec, 0);
  int64_t umax = (int64_t)std::sqrt((double)qprec) + 25;
  int64_t vmax = (int64_t)std::sqrt((double)qprec / 11.0) + 2;
  for (int64_t v = -vmax; v <= vmax; ++v)
    for (int64_t u = -umax; u <= umax; ++u) {
      int64_t nrm = u * u + u * v + 11 * v * v;
      if (nrm < 1 || nrm >= qprec) continue;
      int64_t A = u * u - 11 * v * v, B = 2 * u * v + v * v;  // alpha^2
      if (weight == 5) {
        int64_t A4 = A * A - 11 * B * B, B4 = 2 * A * B + B * B;
        A = A4;
        B = B4;
      }
      c0[nrm] += A;
      c1[nrm] += B;
    }
  Newform f;
  f.label = "43w" + std::to_string(weight);
  f.level = 43;
  f.weight = weight;
  f.character = quadratic_char(-43, 43);
  f.an.assign(qprec, 0);
  for (int n = 1; n < qprec; ++n) {
    if (c1[n] != 0 || c0[n] % 2 != 0)
      throw std::runtime_error("cm_form_43: conjugation symmetry broken");
    f.an[n] = c0[n] / 2;
  }
  return f;
}

void emit(const std::string& outdir, const Newform& f) {
  std::string path = outdir + "/" + f.label + ".nf";
  write_newform(path, f);
  std::string text = newform_to_string(f);
  std::cout << "wrote " << path << " qprec=" << f.qprec() << " sha1=" << git_blob_sha1(text)
            << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  std::string outdir = argc > 1 ? argv[1] : "data/newforms";
  std::filesystem::create_directories(outdir);
  try {
    // models with the level as conductor; discriminant support is checked
    std::vector<std::pair<EllCurve, int>> known = {
        {{"57a", 57, 0, -1, 1, -2, 2}, 7000},
        {{"19a", 19, 0, 1, 1, -9, -15}, 7000},
        {{"53a", 53, 1, -1, 1, 0, 0}, 8000},
        {{"43a", 43, 0, 1, 1, 0, 0}, 15300},
        {{"11a", 11, 0, -1, 1, -10, -20}, 2000},
        {{"77a", 77, 0, 0, 1, 2, 0}, 2000},
        {{"469a", 469, 1, 0, 1, -80, -275}, 10000},
        {{"469b", 469, 1, -1, 1, -12, 18}, 10000},
        {{"89a", 89, 1, 1, 1, -1, 0}, 14600},
    };
    for (auto& [E, qprec] : known) emit(outdir, curve_newform(E, qprec));

    EllCurve e57b = find_curve("57b", 57, {{2, 1}, {3, 1}, {5, -2}, {7, 0}});
    emit(outdir, curve_newform(e57b, 7000));
    EllCurve e57c = find_curve("57c", 57, {{2, -2}, {3, 1}, {5, 1}, {7, 3}});
    emit(outdir, curve_newform(e57c, 7000));
    EllCurve e89b = find_curve("89b", 89, {{2, 1}, {3, 2}, {5, -2}, {7, 2}, {11, -4}});
    emit(outdir, curve_newform(e89b, 14600));

    emit(outdir, cm_form_43(3, 15300));
    emit(outdir, cm_form_43(5, 15300));
  } catch (const std::exception& ex) {
    std::cerr << "fixturegen: " << ex.what() << "\n";
    return 1;
  }
  return 0;
}
