#include "opal/newform.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

namespace opal {

std::string newform_to_string(const Newform& f) {
  std::ostringstream out;
  out << "label=" << f.label << "\n";
  out << "level=" << f.level << "\n";
  out << "weight=" << f.weight << "\n";
  out << "char=" << f.character.str() << "\n";
  for (size_t n = 1; n < f.an.size(); ++n) out << n << " " << f.an[n] << "\n";
  return out.str();
}

Newform newform_from_string(const std::string& text) {
  Newform f;
  std::istringstream in(text);
  std::string line;
  bool in_coeffs = false;
  int64_t expect = 1;
  bool saw_label = false, saw_level = false, saw_weight = false, saw_char = false;
  f.an.assign(1, 0);
  while (std::getline(in, line)) {
    if (line.empty()) throw std::runtime_error("newform: blank line");
    auto eq = line.find('=');
    if (!in_coeffs && eq != std::string::npos) {
      std::string key = line.substr(0, eq), val = line.substr(eq + 1);
      if (key == "label") {
        f.label = val;
        saw_label = true;
      } else if (key == "level") {
        f.level = (uint64_t)std::stoull(val);
        saw_level = true;
      } else if (key == "weight") {
        f.weight = std::stoi(val);
        saw_weight = true;
      } else if (key == "char") {
        if (!saw_level) throw std::runtime_error("newform: char before level");
        if (val == "trivial")
          f.character = trivial_char(f.level);
        else if (val.rfind("disc:", 0) == 0)
          f.character = quadratic_char(std::stoll(val.substr(5)), f.level);
        else
          throw std::runtime_error("newform: bad char value " + val);
        saw_char = true;
      } else {
        throw std::runtime_error("newform: unknown key " + key);
      }
      continue;
    }
    if (!in_coeffs) {
      if (!(saw_label && saw_level && saw_weight && saw_char))
        throw std::runtime_error("newform: incomplete header");
      in_coeffs = true;
    }
    std::istringstream ls(line);
    int64_t n, a;
    if (!(ls >> n >> a)) throw std::runtime_error("newform: bad coefficient line: " + line);
    std::string rest;
    if (ls >> rest) throw std::runtime_error("newform: trailing data: " + line);
    if (n != expect) throw std::runtime_error("newform: coefficient index gap at " + line);
    f.an.push_back(a);
    ++expect;
  }
  if (!in_coeffs) throw std::runtime_error("newform: no coefficients");
  if (f.an.size() < 2 || f.an[1] != 1)
    throw std::runtime_error("newform: leading coefficient must be 1");
  return f;
}

Newform read_newform(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("newform: cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return newform_from_string(buf.str());
}

void write_newform(const std::string& path, const Newform& f) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("newform: cannot write " + path);
  out << newform_to_string(f);
}

}  // namespace opal
