#include "conewishart/io.hpp"

#include "conewishart/errors.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace conewishart {
namespace {

Matrix matrix_from_json(const Json& j, int rows, int cols, const std::string& what) {
  Matrix m(rows, cols);
  if (!j.is_array()) throw Error(ErrorCode::SpecParseError, what + " must be an array");
  if (!j.empty() && j.front().is_array()) {
    if (static_cast<int>(j.size()) != rows)
      throw Error(ErrorCode::SpecParseError, what + " has the wrong number of rows");
    for (int a = 0; a < rows; ++a) {
      if (!j[a].is_array() || static_cast<int>(j[a].size()) != cols)
        throw Error(ErrorCode::SpecParseError, what + " has a malformed row");
      for (int b = 0; b < cols; ++b) m(a, b) = j[a][b].get<double>();
    }
  } else {
    if (static_cast<int>(j.size()) != rows * cols)
      throw Error(ErrorCode::SpecParseError,
                  what + " needs " + std::to_string(rows * cols) + " entries");
    for (int a = 0; a < rows; ++a)
      for (int b = 0; b < cols; ++b) m(a, b) = j[a * cols + b].get<double>();
  }
  return m;
}

Json matrix_json(const Matrix& m) {
  Json rows = Json::array();
  for (Eigen::Index a = 0; a < m.rows(); ++a) {
    Json row = Json::array();
    for (Eigen::Index b = 0; b < m.cols(); ++b) row.push_back(m(a, b));
    rows.push_back(row);
  }
  return rows;
}

Json parse_json_text(const std::string& text, const std::string& where) {
  try {
    return Json::parse(text);
  } catch (const Json::exception& e) {
    throw Error(ErrorCode::SpecParseError, where + ": " + e.what());
  }
}

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IOError, "cannot read '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

Json vector_json(const Vector& v) {
  Json out = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v(i));
  return out;
}

VSystem vsystem_from_json(const Json& j) {
  try {
    if (!j.is_object() || !j.contains("partition"))
      throw Error(ErrorCode::SpecParseError, "cone spec needs a \"partition\" array");
    VSystem vs;
    for (const auto& n : j.at("partition")) {
      const int v = n.get<int>();
      if (v < 1) throw Error(ErrorCode::SpecParseError, "partition entries must be >= 1");
      vs.partition.push_back(v);
    }
    const int r = static_cast<int>(vs.partition.size());
    if (r == 0) throw Error(ErrorCode::SpecParseError, "partition is empty");
    if (j.contains("blocks")) {
      for (const auto& b : j.at("blocks")) {
        const int l = b.at("l").get<int>() - 1;
        const int k = b.at("k").get<int>() - 1;
        if (!(0 <= k && k < l && l < r))
          throw Error(ErrorCode::SpecParseError,
                      "block (" + std::to_string(l + 1) + "," + std::to_string(k + 1) +
                          ") needs 1 <= k < l <= r");
        std::vector<Matrix> basis;
        for (const auto& m : b.at("basis"))
          basis.push_back(matrix_from_json(m, vs.partition[l], vs.partition[k], "basis matrix"));
        vs.set_block(l, k, std::move(basis));
      }
    }
    return vs;
  } catch (const Json::exception& e) {
    throw Error(ErrorCode::SpecParseError, e.what());
  }
}

ConePtr cone_from_json(const Json& j, const std::string& name) {
  return ConeRealization::build(vsystem_from_json(j), name);
}

std::pair<VSystem, std::string> load_vsystem(const std::string& spec) {
  const auto first = spec.find_first_not_of(" \t\n");
  if (first != std::string::npos && spec[first] == '{')
    return {vsystem_from_json(parse_json_text(spec, "inline cone spec")), "custom"};
  std::error_code ec;
  if (std::filesystem::is_regular_file(spec, ec))
    return {vsystem_from_json(parse_json_text(read_file(spec), spec)),
            std::filesystem::path(spec).stem().string()};
  ConePtr c = preset(spec);
  return {c->vsystem(), c->name()};
}

ConePtr load_cone(const std::string& spec) {
  auto [vs, name] = load_vsystem(spec);
  return ConeRealization::build(std::move(vs), name);
}

Json cone_to_json(const ConeRealization& cone) {
  Json j;
  j["partition"] = cone.vsystem().partition;
  Json blocks = Json::array();
  for (int l = 1; l < cone.rank(); ++l)
    for (int k = 0; k < l; ++k) {
      if (cone.block_dim(l, k) == 0) continue;
      Json basis = Json::array();
      for (const auto& b : cone.basis(l, k)) basis.push_back(matrix_json(b));
      blocks.push_back({{"l", l + 1}, {"k", k + 1}, {"basis", basis}});
    }
  j["blocks"] = blocks;
  return j;
}

Json map_to_json(const QuadraticMap& q) {
  Json j;
  j["m"] = q.domain_dim();
  const auto& cod = q.codomain();
  if (cod.is_realized()) {
    j["codomain"] = {{"name", cod.name()}, {"spec", cone_to_json(*cod.cone())}};
  } else {
    j["codomain"] = cod.name();
  }
  Json phi = Json::array();
  for (const auto& s : q.slices()) phi.push_back(matrix_json(s));
  j["phi"] = phi;
  Json meta;
  meta["kind"] = q.meta().kind;
  if (!q.meta().epsilon.empty()) meta["epsilon"] = q.meta().epsilon;
  if (q.meta().basic_weights) meta["basic_weights"] = vector_json(*q.meta().basic_weights);
  j["meta"] = meta;
  return j;
}

QuadraticMap map_from_json(const Json& j) {
  try {
    const int m = j.at("m").get<int>();
    const Json& c = j.at("codomain");
    Codomain cod;
    if (c.is_string()) {
      const std::string name = c.get<std::string>();
      cod = name == "polyhedral4" ? Codomain::generic(polyhedral4_cone())
                                  : Codomain::realized(preset(name));
    } else if (c.is_object() && c.contains("spec")) {
      cod = Codomain::realized(cone_from_json(c.at("spec"), c.value("name", "custom")));
    } else {
      cod = Codomain::realized(cone_from_json(c));
    }
    std::vector<Matrix> slices;
    for (const auto& s : j.at("phi")) slices.push_back(matrix_from_json(s, m, m, "phi slice"));
    MapMeta meta;
    if (j.contains("meta") && j["meta"].contains("kind"))
      meta.kind = j["meta"]["kind"].get<std::string>();
    return QuadraticMap::from_phi_tensor(std::move(slices), std::move(cod), std::move(meta));
  } catch (const Json::exception& e) {
    throw Error(ErrorCode::SpecParseError, e.what());
  }
}

Vector parse_theta(const ConePtr& cone, const std::string& spec) {
  if (spec.empty() || spec == "identity") return -cone->identity_coords();
  if (spec.rfind("raw:", 0) == 0) {
    Vector theta = parse_vector(spec.substr(4));
    if (theta.size() != cone->dim())
      throw Error(ErrorCode::DimensionMismatch,
                  "raw theta needs " + std::to_string(cone->dim()) + " coordinates");
    return theta;
  }
  const Vector v = parse_vector(spec.rfind("tri:", 0) == 0 ? spec.substr(4) : spec);
  const int r = cone->rank();
  if (v.size() != cone->dim())
    throw Error(ErrorCode::DimensionMismatch,
                "triangular theta needs " + std::to_string(cone->dim()) + " values");
  TriangularElement t{cone, v.head(r), v.tail(cone->dim() - r)};
  for (int k = 0; k < r; ++k)
    if (!(t.diag(k) > 0.0))
      throw Error(ErrorCode::InvalidArgument, "diagonal entries of T must be positive");
  return -dual_orbit_point(t).coords;
}

Json gindikin_report(const ConeRealization& cone, const Vector& sigma) {
  Json j;
  j["sigma"] = vector_json(sigma);
  try {
    const GindikinParameter g = gindikin_decompose(cone, sigma);
    j["in_Xi"] = true;
    j["epsilon"] = g.epsilon;
    j["u"] = vector_json(g.u);
    j["singular"] = !g.nonsingular();
  } catch (const NotInXi& e) {
    j["in_Xi"] = false;
    j["epsilon"] = nullptr;
    j["u"] = nullptr;
    j["singular"] = nullptr;
    j["failed_index"] = e.index();
  }
  return j;
}

void write_csv(const SampleBatch& batch, const std::vector<std::string>& columns,
               const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::IOError, "cannot write '" + path + "'");
  for (std::size_t c = 0; c < columns.size(); ++c) out << (c ? "," : "") << columns[c];
  out << '\n';
  char buf[32];
  for (Eigen::Index row = 0; row < batch.draws.rows(); ++row) {
    for (Eigen::Index c = 0; c < batch.draws.cols(); ++c) {
      std::snprintf(buf, sizeof buf, "%.17g", batch.draws(row, c));
      out << (c ? "," : "") << buf;
    }
    out << '\n';
  }
  if (!out) throw Error(ErrorCode::IOError, "write to '" + path + "' failed");
}

void write_json(const Json& j, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::IOError, "cannot write '" + path + "'");
  out << j.dump(2) << '\n';
  if (!out) throw Error(ErrorCode::IOError, "write to '" + path + "' failed");
}

}  // namespace conewishart
