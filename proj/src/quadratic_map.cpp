#include "conewishart/quadratic_map.hpp"

#include "conewishart/errors.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <set>

namespace conewishart {

Codomain Codomain::realized(ConePtr cone) {
  if (!cone) throw Error(ErrorCode::InvalidArgument, "null cone");
  Codomain c;
  c.cone_ = std::move(cone);
  return c;
}

Codomain Codomain::generic(std::shared_ptr<const GenericCone> cone) {
  if (!cone) throw Error(ErrorCode::InvalidArgument, "null cone");
  if (cone->weights.size() != cone->dim)
    throw Error(ErrorCode::DimensionMismatch, "coupling weights have wrong length");
  Codomain c;
  c.generic_ = std::move(cone);
  return c;
}

int Codomain::dim() const {
  if (cone_) return cone_->dim();
  if (generic_) return generic_->dim;
  return 0;
}

const Vector& Codomain::weights() const {
  static const Vector none;
  if (cone_) return cone_->coupling_weights();
  if (generic_) return generic_->weights;
  return none;
}

std::string Codomain::name() const {
  if (cone_) return cone_->name();
  if (generic_) return generic_->name;
  return "none";
}

std::vector<Vector> Codomain::probes(int count) const {
  std::vector<Vector> out;
  if (count <= 0) return out;
  std::mt19937_64 rng(0x9e3779b97f4a7c15ULL);
  if (cone_) {
    out.push_back(cone_->identity_coords());
    while (static_cast<int>(out.size()) < count)
      out.push_back(dual_orbit_point(random_triangular(cone_, rng, 0.5, 0.7)).coords);
    return out;
  }
  if (!generic_) return out;
  const auto& gens = generic_->generators;
  Vector sum = Vector::Zero(generic_->dim);
  for (const auto& g : gens) sum += g;
  out.push_back(sum);
  std::exponential_distribution<double> ex(1.0);
  while (static_cast<int>(out.size()) < count) {
    Vector p = Vector::Zero(generic_->dim);
    for (const auto& g : gens) p += (0.05 + ex(rng)) * g;
    out.push_back(p);
  }
  return out;
}

bool Codomain::dual_member(const Vector& eta) const {
  if (eta.size() != dim()) return false;
  if (cone_) return conewishart::dual_membership({cone_, eta});
  if (generic_ && generic_->dual_member) return generic_->dual_member(eta);
  throw Error(ErrorCode::InvalidArgument,
              "codomain '" + name() + "' has no dual-membership test");
}

bool Codomain::same_as(const Codomain& other) const {
  if (cone_ && other.cone_) return cone_->same_as(*other.cone_);
  if (generic_ && other.generic_)
    return generic_ == other.generic_ ||
           (generic_->name == other.generic_->name && generic_->dim == other.generic_->dim);
  return false;
}

std::shared_ptr<const GenericCone> polyhedral4_cone() {
  static const std::shared_ptr<const GenericCone> cone = [] {
    auto c = std::make_shared<GenericCone>();
    c->name = "polyhedral4";
    c->dim = 3;
    c->weights = Vector::Ones(3);
    c->generators = {Vector::Unit(3, 0), Vector::Unit(3, 1),
                     (Vector(3) << -1, 0, 1).finished(),
                     (Vector(3) << 0, -1, 1).finished()};
    c->dual_member = [](const Vector& e) {
      return e(2) > 0 && e(0) + e(2) > 0 && e(0) + e(1) + e(2) > 0 && e(1) + e(2) > 0;
    };
    return c;
  }();
  return cone;
}

// ---------------------------------------------------------------------------

QuadraticMap QuadraticMap::from_phi_tensor(std::vector<Matrix> slices,
                                           Codomain codomain, MapMeta meta,
                                           int probe_count) {
  if (static_cast<int>(slices.size()) != codomain.dim())
    throw Error(ErrorCode::DimensionMismatch,
                std::to_string(slices.size()) + " slices for a codomain of dimension " +
                    std::to_string(codomain.dim()));
  const Eigen::Index m = slices.front().rows();
  for (std::size_t j = 0; j < slices.size(); ++j) {
    const auto& s = slices[j];
    if (s.rows() != m || s.cols() != m)
      throw Error(ErrorCode::DimensionMismatch, "slices differ in size");
    const double scale = std::max(1.0, max_abs(s));
    if (max_abs(s - s.transpose()) > 1e-12 * scale)
      throw Error(ErrorCode::AsymmetricSlice, "slice " + std::to_string(j + 1) + " is not symmetric");
    slices[j] = symmetrize(s);
  }
  QuadraticMap q;
  q.m_ = static_cast<int>(m);
  q.slices_ = std::move(slices);
  q.codomain_ = std::move(codomain);
  q.meta_ = std::move(meta);
  const auto probes = q.codomain_.probes(probe_count);
  for (std::size_t p = 0; p < probes.size(); ++p) {
    if (!is_positive_definite(q.phi(probes[p]), kPdTol))
      throw Error(ErrorCode::PositivityFailure,
                  "phi(eta) is not positive definite at probe " + std::to_string(p));
  }
  return q;
}

Matrix QuadraticMap::phi(const Vector& eta) const {
  if (eta.size() != static_cast<Eigen::Index>(slices_.size()))
    throw Error(ErrorCode::DimensionMismatch, "dual element has wrong length");
  Matrix out = Matrix::Zero(m_, m_);
  for (std::size_t j = 0; j < slices_.size(); ++j)
    if (eta(j) != 0.0) out += eta(j) * slices_[j];
  return out;
}

Vector QuadraticMap::evaluate(const Vector& x) const {
  if (x.size() != m_)
    throw Error(ErrorCode::DimensionMismatch,
                "expected a vector of length " + std::to_string(m_));
  const Vector& w = codomain_.weights();
  Vector y(slices_.size());
  for (std::size_t j = 0; j < slices_.size(); ++j)
    y(j) = x.dot(slices_[j] * x) / w(j);
  return y;
}

// ---------------------------------------------------------------------------

VirtualQuadraticMap::VirtualQuadraticMap(std::vector<std::pair<QuadraticMap, double>> parts)
    : parts_(std::move(parts)) {
  if (parts_.empty())
    throw Error(ErrorCode::InvalidArgument, "virtual sum needs at least one component");
  for (const auto& [q, s] : parts_) {
    if (!std::isfinite(s)) throw Error(ErrorCode::InvalidArgument, "weights must be finite");
    if (!q.codomain().same_as(parts_.front().first.codomain()))
      throw Error(ErrorCode::CodomainMismatch, "components have different codomains");
  }
}

VirtualQuadraticMap VirtualQuadraticMap::single(QuadraticMap q) {
  return VirtualQuadraticMap({{std::move(q), 1.0}});
}

bool VirtualQuadraticMap::is_true_map() const {
  return parts_.size() == 1 && parts_.front().second == 1.0;
}

std::optional<Vector> VirtualQuadraticMap::basic_weights() const {
  if (!codomain().is_realized()) return std::nullopt;
  Vector total = Vector::Zero(codomain().cone()->rank());
  for (const auto& [q, s] : parts_) {
    if (!q.meta().basic_weights) return std::nullopt;
    total += s * *q.meta().basic_weights;
  }
  return total;
}

std::optional<VirtualQuadraticMap::HomogeneousForm> VirtualQuadraticMap::homogeneous_form() const {
  if (!codomain().is_realized()) return std::nullopt;
  const int n = codomain().dim();
  if (auto bw = basic_weights()) return HomogeneousForm{Matrix::Identity(n, n), *bw, true};
  std::optional<Matrix> g0;
  Vector total = Vector::Zero(codomain().cone()->rank());
  for (const auto& [q, s] : parts_) {
    const auto& meta = q.meta();
    if (!meta.g0 || !meta.base_weights) return std::nullopt;
    if (!g0)
      g0 = *meta.g0;
    else if (max_abs(*g0 - *meta.g0) > 1e-12 * std::max(1.0, max_abs(*g0)))
      return std::nullopt;
    total += s * *meta.base_weights;
  }
  return HomogeneousForm{*g0, total, false};
}

// ---------------------------------------------------------------------------

QuadraticMap basic_map(const ConePtr& cone, int i) {
  if (i < 0 || i >= cone->rank())
    throw Error(ErrorCode::IndexOutOfRange,
                "basic map index " + std::to_string(i + 1) + " out of range");
  const int n = cone->dim();
  std::vector<Matrix> slices;
  slices.reserve(n);
  for (int j = 0; j < n; ++j) slices.push_back(cone->basic_phi(i, Vector::Unit(n, j)));
  MapMeta meta;
  meta.kind = "basic";
  meta.basic_weights = Vector::Unit(cone->rank(), i);
  meta.slots.push_back({i, i, 1});
  for (int l = i + 1; l < cone->rank(); ++l)
    if (cone->block_dim(l, i) > 0) meta.slots.push_back({i, l, cone->block_dim(l, i)});
  return QuadraticMap::from_phi_tensor(std::move(slices), Codomain::realized(cone),
                                       std::move(meta));
}

QuadraticMap direct_sum(const std::vector<QuadraticMap>& maps) {
  if (maps.empty()) throw Error(ErrorCode::InvalidArgument, "direct sum of no maps");
  const Codomain& cod = maps.front().codomain();
  int m = 0;
  for (const auto& q : maps) {
    if (!q.codomain().same_as(cod))
      throw Error(ErrorCode::CodomainMismatch, "direct sum over different codomains");
    m += q.domain_dim();
  }
  const int n = cod.dim();
  std::vector<Matrix> slices(n, Matrix::Zero(m, m));
  MapMeta meta;
  meta.kind = "direct_sum";
  bool have_basic = true;
  Vector bw;
  if (cod.is_realized()) bw = Vector::Zero(cod.cone()->rank());
  int off = 0;
  for (const auto& q : maps) {
    for (int j = 0; j < n; ++j)
      slices[j].block(off, off, q.domain_dim(), q.domain_dim()) = q.slices()[j];
    off += q.domain_dim();
    if (q.meta().basic_weights && bw.size() > 0)
      bw += *q.meta().basic_weights;
    else
      have_basic = false;
    meta.slots.insert(meta.slots.end(), q.meta().slots.begin(), q.meta().slots.end());
  }
  if (have_basic) meta.basic_weights = bw;
  return QuadraticMap::from_phi_tensor(std::move(slices), cod, std::move(meta), 0);
}

QuadraticMap standard_map(const ConePtr& cone, const std::vector<int>& epsilon) {
  if (static_cast<int>(epsilon.size()) != cone->rank())
    throw Error(ErrorCode::DimensionMismatch, "epsilon has wrong length");
  std::vector<QuadraticMap> parts;
  for (int i = 0; i < cone->rank(); ++i) {
    if (epsilon[i] != 0 && epsilon[i] != 1)
      throw Error(ErrorCode::InvalidArgument, "epsilon entries must be 0 or 1");
    if (epsilon[i]) parts.push_back(basic_map(cone, i));
  }
  if (parts.empty()) throw Error(ErrorCode::ZeroEpsilon, "epsilon must be non-zero");
  QuadraticMap q = direct_sum(parts);
  MapMeta meta = q.meta();
  meta.kind = "standard";
  meta.epsilon = epsilon;
  return QuadraticMap::from_phi_tensor(q.slices(), q.codomain(), std::move(meta), 0);
}

QuadraticMap restriction_map(int r, const std::vector<int>& index_set) {
  if (index_set.empty()) throw Error(ErrorCode::EmptyIndexSet, "index set is empty");
  std::set<int> idx(index_set.begin(), index_set.end());
  if (*idx.begin() < 0 || *idx.rbegin() >= r)
    throw Error(ErrorCode::IndexOutOfRange, "index set exceeds 1..r");
  const std::vector<int> sorted(idx.begin(), idx.end());
  const int k = static_cast<int>(sorted.size());
  ConePtr cone = sym_cone(r);
  const int n = cone->dim();
  std::vector<Matrix> slices;
  for (int j = 0; j < n; ++j) {
    const Matrix f = cone->functional_matrix(Vector::Unit(n, j));
    Matrix s(k, k);
    for (int a = 0; a < k; ++a)
      for (int b = 0; b < k; ++b) s(a, b) = f(sorted[a], sorted[b]);
    slices.push_back(s);
  }
  MapMeta meta;
  meta.kind = "restriction";
  const int first = r - k;
  bool trailing = true;
  for (int a = 0; a < k; ++a) trailing = trailing && sorted[a] == first + a;
  if (trailing) {
    meta.basic_weights = Vector::Unit(r, first);
  } else {
    // w0 sends e_{first+a} to e_{I[a]} and the leading block onto the complement.
    Matrix w0 = Matrix::Zero(r, r);
    int c = 0;
    for (int a = 0; a < r; ++a) {
      if (idx.count(a)) continue;
      w0(a, c++) = 1.0;
    }
    for (int a = 0; a < k; ++a) w0(sorted[a], first + a) = 1.0;
    meta.g0 = congruence_matrix(*cone, w0);
    meta.base_weights = Vector::Unit(r, first);
  }
  return QuadraticMap::from_phi_tensor(std::move(slices), Codomain::realized(cone),
                                       std::move(meta));
}

QuadraticMap qrs_map(int r, int s) {
  if (s < 1) throw Error(ErrorCode::InvalidArgument, "q_{r,s} needs s >= 1");
  const QuadraticMap b = basic_map(sym_cone(r), 0);
  QuadraticMap q = direct_sum(std::vector<QuadraticMap>(s, b));
  MapMeta meta = q.meta();
  meta.kind = "q_rs";
  return QuadraticMap::from_phi_tensor(q.slices(), q.codomain(), std::move(meta), 0);
}

VirtualQuadraticMap virtual_sum(std::vector<std::pair<QuadraticMap, double>> parts) {
  return VirtualQuadraticMap(std::move(parts));
}

VirtualQuadraticMap basic_virtual_map(const ConePtr& cone, const Vector& weights) {
  if (weights.size() != cone->rank())
    throw Error(ErrorCode::DimensionMismatch,
                "expected " + std::to_string(cone->rank()) + " weights, got " +
                    std::to_string(weights.size()));
  std::vector<std::pair<QuadraticMap, double>> parts;
  for (int i = 0; i < cone->rank(); ++i) parts.emplace_back(basic_map(cone, i), weights(i));
  return VirtualQuadraticMap(std::move(parts));
}

QuadraticMap polyhedral4_map() {
  const auto cone = polyhedral4_cone();
  const Matrix v = (Matrix(4, 3) << 0, 0, 1, 1, 0, 1, 1, 1, 1, 0, 1, 1).finished();
  std::vector<Matrix> slices;
  for (int j = 0; j < 3; ++j) slices.push_back(v.col(j).asDiagonal().toDenseMatrix());
  MapMeta meta;
  meta.kind = "polyhedral4";
  return QuadraticMap::from_phi_tensor(std::move(slices), Codomain::generic(cone),
                                       std::move(meta));
}

QuadraticMap herm2c_map() {
  std::vector<Matrix> s(4, Matrix::Zero(4, 4));
  s[0](0, 0) = s[0](1, 1) = 1;
  s[1](2, 2) = s[1](3, 3) = 1;
  s[2](0, 2) = s[2](2, 0) = 1;
  s[2](1, 3) = s[2](3, 1) = 1;
  s[3](0, 3) = s[3](3, 0) = 1;
  s[3](1, 2) = s[3](2, 1) = -1;
  MapMeta meta;
  meta.kind = "herm2c";
  return QuadraticMap::from_phi_tensor(std::move(s), Codomain::realized(herm2c_cone()),
                                       std::move(meta));
}

Matrix congruence_matrix(const ConeRealization& cone, const Matrix& t) {
  const int n = cone.dim();
  if (t.rows() != cone.ambient_size() || t.cols() != cone.ambient_size())
    throw Error(ErrorCode::DimensionMismatch, "matrix has wrong size");
  Matrix g(n, n);
  for (int j = 0; j < n; ++j) {
    double res = 0.0;
    const Matrix img = t * cone.to_matrix(Vector::Unit(n, j)) * t.transpose();
    g.col(j) = cone.from_matrix(img, &res);
    if (res > kAxiomTol)
      throw Error(ErrorCode::StructureLeak, "congruence leaves Z_V");
  }
  return g;
}

Vector dual_action(const Matrix& g, const Vector& weights, const Vector& eta) {
  return (g.transpose() * weights.cwiseProduct(eta)).cwiseQuotient(weights);
}

namespace {

void check_invertible(const Matrix& g, int n) {
  if (g.rows() != n || g.cols() != n)
    throw Error(ErrorCode::DimensionMismatch, "transform has wrong size");
  Eigen::FullPivLU<Matrix> lu(g);
  lu.setThreshold(1e-12);
  if (!lu.isInvertible())
    throw Error(ErrorCode::SingularTransform, "transform is not invertible");
}

}  // namespace

QuadraticMap pushforward_map(const Matrix& g, const QuadraticMap& q) {
  const int n = q.codomain_dim();
  check_invertible(g, n);
  const Vector& w = q.codomain().weights();
  // Column j' of M = W⁻¹ Gᵀ W gives the new slice j'.
  const Matrix m = w.cwiseInverse().asDiagonal() * g.transpose() * w.asDiagonal();
  std::vector<Matrix> slices(n, Matrix::Zero(q.domain_dim(), q.domain_dim()));
  for (int jp = 0; jp < n; ++jp)
    for (int j = 0; j < n; ++j)
      if (m(j, jp) != 0.0) slices[jp] += m(j, jp) * q.slices()[j];
  MapMeta meta = q.meta();
  meta.kind = "pushforward";
  if (q.meta().basic_weights) {
    meta.g0 = g;
    meta.base_weights = *q.meta().basic_weights;
  } else if (q.meta().g0) {
    meta.g0 = g * *q.meta().g0;
  }
  meta.basic_weights.reset();
  return QuadraticMap::from_phi_tensor(std::move(slices), q.codomain(), std::move(meta));
}

VirtualQuadraticMap pushforward_map(const Matrix& g, const VirtualQuadraticMap& q) {
  std::vector<std::pair<QuadraticMap, double>> parts;
  for (const auto& [c, s] : q.components()) parts.emplace_back(pushforward_map(g, c), s);
  return VirtualQuadraticMap(std::move(parts));
}

}  // namespace conewishart
