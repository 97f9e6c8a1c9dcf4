#pragma once

// Ω-positive quadratic maps q : R^m -> R^n stored through their φ-tensor:
// slices Φ_j = φ(e_j) on the dual coordinate basis, so that
// φ(η) = Σ_j η_j Φ_j and ⟨q(x), η⟩ = xᵀ φ(η) x.

#include "conewishart/cone_realization.hpp"

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace conewishart {

inline constexpr int kDefaultProbeCount = 64;

// A cone known only through its coupling, a set of interior points of the
// dual cone and an optional exact dual-membership predicate.
struct GenericCone {
  std::string name;
  int dim = 0;
  Vector weights;                 // ⟨y, η⟩ = Σ w_j y_j η_j
  std::vector<Vector> generators; // of the dual cone; probes are positive combinations
  std::function<bool(const Vector&)> dual_member;
};

class Codomain {
 public:
  Codomain() = default;
  static Codomain realized(ConePtr cone);
  static Codomain generic(std::shared_ptr<const GenericCone> cone);

  bool is_realized() const { return static_cast<bool>(cone_); }
  const ConePtr& cone() const { return cone_; }
  const std::shared_ptr<const GenericCone>& generic_cone() const { return generic_; }

  int dim() const;
  const Vector& weights() const;
  std::string name() const;

  // Deterministic interior points of the dual cone.
  std::vector<Vector> probes(int count = kDefaultProbeCount) const;
  bool dual_member(const Vector& eta) const;
  bool same_as(const Codomain& other) const;

 private:
  ConePtr cone_;
  std::shared_ptr<const GenericCone> generic_;
};

// The polyhedral cone in R^3 generated by (0,0,1), (1,0,1), (1,1,1),
// (0,1,1), with coupling y·η.
std::shared_ptr<const GenericCone> polyhedral4_cone();

// One slot of a structured domain: the block X_li of column block i
// (l == i is the scalar x_ii). Indices are 0-based.
struct DomainSlot {
  int i = 0;
  int l = 0;
  int size = 0;
};

struct MapMeta {
  std::string kind = "custom";
  std::vector<int> epsilon;
  std::vector<DomainSlot> slots;
  // q = ⊕_i (q_V^i)^{⊕ s_i} on a realized cone, when known.
  std::optional<Vector> basic_weights;
  // q = g0 ∘ q' with q' a sum of basic maps of weights base_weights;
  // g0 is the coordinate matrix of a linear map of Z_V.
  std::optional<Matrix> g0;
  std::optional<Vector> base_weights;
};

class QuadraticMap {
 public:
  // Throws AsymmetricSlice, DimensionMismatch or PositivityFailure.
  static QuadraticMap from_phi_tensor(std::vector<Matrix> slices, Codomain codomain,
                                      MapMeta meta = {},
                                      int probe_count = kDefaultProbeCount);

  int domain_dim() const { return m_; }
  int codomain_dim() const { return codomain_.dim(); }
  const std::vector<Matrix>& slices() const { return slices_; }
  const Codomain& codomain() const { return codomain_; }
  const MapMeta& meta() const { return meta_; }

  Matrix phi(const Vector& eta) const;
  Vector evaluate(const Vector& x) const;

 private:
  int m_ = 0;
  std::vector<Matrix> slices_;
  Codomain codomain_;
  MapMeta meta_;
};

class VirtualQuadraticMap {
 public:
  VirtualQuadraticMap() = default;
  // Throws CodomainMismatch; needs at least one component.
  explicit VirtualQuadraticMap(std::vector<std::pair<QuadraticMap, double>> parts);
  static VirtualQuadraticMap single(QuadraticMap q);

  const std::vector<std::pair<QuadraticMap, double>>& components() const { return parts_; }
  const Codomain& codomain() const { return parts_.front().first.codomain(); }
  // True when this is one map with weight 1.
  bool is_true_map() const;
  // Σ_j s_j (basic weights of component j), when every component has them.
  std::optional<Vector> basic_weights() const;
  // (g0, s) with q = g0 ∘ ⊕_i (q_V^i)^{⊕ s_i}, when every component shares
  // one g0 (identity included).
  struct HomogeneousForm {
    Matrix g0;
    Vector weights;
    bool identity = true;
  };
  std::optional<HomogeneousForm> homogeneous_form() const;

 private:
  std::vector<std::pair<QuadraticMap, double>> parts_;
};

QuadraticMap basic_map(const ConePtr& cone, int i);
QuadraticMap standard_map(const ConePtr& cone, const std::vector<int>& epsilon);
// q^I on R^I into Sym(r); I holds 0-based indices.
QuadraticMap restriction_map(int r, const std::vector<int>& index_set);
// q_{r,s}(x) = x xᵀ on r×s matrices, flattened column by column.
QuadraticMap qrs_map(int r, int s);
QuadraticMap direct_sum(const std::vector<QuadraticMap>& maps);
VirtualQuadraticMap virtual_sum(std::vector<std::pair<QuadraticMap, double>> parts);

// Basic maps of a realized cone with the given weights.
VirtualQuadraticMap basic_virtual_map(const ConePtr& cone, const Vector& weights);

// x ↦ Σ x_i² v_i over the generators v_i of polyhedral4_cone().
QuadraticMap polyhedral4_map();
// z ↦ z z* on C² ≅ R^4, realized in the herm2c cone.
QuadraticMap herm2c_map();

// Coordinate matrix of y ↦ t y tᵀ on Z_V; throws StructureLeak if the
// image leaves Z_V.
Matrix congruence_matrix(const ConeRealization& cone, const Matrix& t);

// g*η for the coordinate matrix G under the coupling weights W.
Vector dual_action(const Matrix& g, const Vector& weights, const Vector& eta);

// φ_{g∘q}(η) = φ_q(g*η). Throws SingularTransform.
QuadraticMap pushforward_map(const Matrix& g, const QuadraticMap& q);
VirtualQuadraticMap pushforward_map(const Matrix& g, const VirtualQuadraticMap& q);

}  // namespace conewishart
