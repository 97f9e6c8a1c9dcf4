#include "conewishart/cone_realization.hpp"
#include "conewishart/errors.hpp"

#include <cctype>
#include <regex>

namespace conewishart {
namespace {

Matrix scalar_one() { return Matrix::Ones(1, 1); }

}  // namespace

ConePtr sym_cone(int r) {
  if (r < 1) throw Error(ErrorCode::InvalidArgument, "sym(r) needs r >= 1");
  VSystem vs;
  vs.partition.assign(r, 1);
  for (int l = 1; l < r; ++l)
    for (int k = 0; k < l; ++k) vs.set_block(l, k, {scalar_one()});
  return ConeRealization::build(std::move(vs), "sym(" + std::to_string(r) + ")");
}

ConePtr vinberg_cone() {
  VSystem vs;
  vs.partition = {2, 1, 1};
  Matrix a(1, 2), b(1, 2);
  a << 1, 0;
  b << 0, 1;
  vs.set_block(1, 0, {a});
  vs.set_block(2, 0, {b});
  return ConeRealization::build(std::move(vs), "vinberg");
}

ConePtr dual_vinberg_cone() {
  VSystem vs;
  vs.partition = {1, 1, 1};
  vs.set_block(2, 0, {scalar_one()});
  vs.set_block(2, 1, {scalar_one()});
  return ConeRealization::build(std::move(vs), "dual_vinberg");
}

ConePtr lorentz_cone(int m) {
  if (m < 1) throw Error(ErrorCode::InvalidArgument, "lorentz(m) needs m >= 1");
  VSystem vs;
  vs.partition = {m, 1};
  std::vector<Matrix> basis;
  for (int j = 0; j < m; ++j) {
    Matrix e = Matrix::Zero(1, m);
    e(0, j) = 1.0;
    basis.push_back(e);
  }
  vs.set_block(1, 0, std::move(basis));
  return ConeRealization::build(std::move(vs), "lorentz(" + std::to_string(m) + ")");
}

ConePtr herm2c_cone() {
  VSystem vs = lorentz_cone(2)->vsystem();
  return ConeRealization::build(std::move(vs), "herm2c");
}

ConePtr preset(const std::string& raw) {
  std::string name;
  for (char c : raw)
    if (!std::isspace(static_cast<unsigned char>(c)))
      name.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
  static const std::regex param(R"(^(sym|lorentz)(?:[:(](\d+)\)?)$)");
  std::smatch mt;
  if (std::regex_match(name, mt, param)) {
    const bool paren = name.find('(') != std::string::npos;
    if (paren != (name.back() == ')'))
      throw Error(ErrorCode::UnknownPreset, "unknown preset '" + raw + "'");
    const int v = std::stoi(mt[2].str());
    return mt[1] == "sym" ? sym_cone(v) : lorentz_cone(v);
  }
  if (name == "vinberg") return vinberg_cone();
  if (name == "dual_vinberg" || name == "dualvinberg") return dual_vinberg_cone();
  if (name == "herm2c") return herm2c_cone();
  throw Error(ErrorCode::UnknownPreset, "unknown preset '" + raw + "'");
}

}  // namespace conewishart
