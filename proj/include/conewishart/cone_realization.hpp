#pragma once

// Matrix-realized homogeneous cones P_V = Z_V ∩ Π_N built from V-systems,
// the triangular group H_V acting by ρ(T)y = T y Tᵀ, and the power
// functions Δ_σ on P_V and Δ*_σ on its dual.
//
// Indices in this API are 0-based: block k ∈ [0, r), off-diagonal block
// (l, k) with l > k. JSON specs and CLI output use 1-based indices.

#include "conewishart/linalg.hpp"

#include <map>
#include <memory>
#include <random>
#include <string>
#include <utility>
#include <vector>

namespace conewishart {

inline constexpr double kAxiomTol = 1e-9;
inline constexpr double kPdTol = 1e-10;

struct VSystem {
  std::vector<int> partition;
  // Orthonormal basis of V_lk ⊂ Mat(n_l, n_k), keyed by 0-based (l, k),
  // l > k. A missing key means V_lk = {0}.
  std::map<std::pair<int, int>, std::vector<Matrix>> blocks;

  void set_block(int l, int k, std::vector<Matrix> basis) {
    blocks[{l, k}] = std::move(basis);
  }
};

struct AxiomCheck {
  std::string rule;  // "orthonormality", "V1", "V2", "V3"
  bool passed = true;
  double max_residual = 0.0;
  // Worst offender, 1-based; j is 0 when the rule involves only (l, k).
  int l = 0, k = 0, j = 0;
};

// Runs every closure check without throwing.
std::vector<AxiomCheck> check_axioms(const VSystem& vs, double tol = kAxiomTol);

class ConeRealization;
using ConePtr = std::shared_ptr<const ConeRealization>;

class ConeRealization {
 public:
  // Validates (V1)-(V3) and orthonormality; throws AxiomViolation.
  static ConePtr build(VSystem vs, std::string name = "custom");

  const std::string& name() const { return name_; }
  const VSystem& vsystem() const { return vs_; }

  int rank() const { return r_; }
  int ambient_size() const { return n_total_; }
  int dim() const { return dim_; }

  int block_size(int k) const { return sizes_[k]; }
  int block_offset(int k) const { return offsets_[k]; }
  int block_dim(int l, int k) const;
  const std::vector<Matrix>& basis(int l, int k) const;
  // Position of the first coefficient of Y_lk in the coordinate vector.
  int coord_offset(int l, int k) const;

  // Diagonal Gram matrix of the coupling in structured coordinates:
  // 1 for the y_kk, 2 for each off-diagonal coefficient.
  const Vector& coupling_weights() const { return weights_; }

  // Rows are m(i) = (0,…,0,1,n_{i+1,i},…,n_{ri}).
  const Matrix& exponent_matrix() const { return exponents_; }
  Vector m_vector(int i) const { return exponents_.row(i).transpose(); }
  Vector d_vector() const;
  // p_k(ε) = Σ_{i<k} ε_i n_{ki}.
  Vector p_vector(const std::vector<int>& eps) const;
  Vector p_full() const { return p_vector(std::vector<int>(r_, 1)); }
  // dim W_V^i = 1 + Σ_{l>i} n_{li}.
  int basic_dim(int i) const;

  std::vector<std::string> coordinate_names() const;
  Vector identity_coords() const;

  // Structured coordinates <-> dense symmetric N×N matrices.
  Matrix to_matrix(const Vector& coords) const;
  Vector from_matrix(const Matrix& y, double* rel_residual = nullptr) const;

  // η̃ with ⟨y, η⟩ = tr(y η̃) for all y ∈ Z_V.
  Matrix functional_matrix(const Vector& eta) const;
  // ζ with ⟨y, ζ⟩ = tr(y S) for all y ∈ Z_V.
  Vector from_functional(const Matrix& s) const;

  // Orthonormal basis of W_V^i as N×n_i matrices: x_ii first, then the
  // V_li bases for l = i+1..r-1.
  const std::vector<Matrix>& basic_domain_basis(int i) const {
    return wbasis_[i];
  }
  // φ_V^i(η), the matrix of x ↦ ⟨x xᵀ, η⟩ on W_V^i.
  Matrix basic_phi(int i, const Vector& eta) const;

  bool same_as(const ConeRealization& other) const;

 private:
  ConeRealization() = default;
  int block_index(int l, int k) const;

  std::string name_;
  VSystem vs_;
  int r_ = 0, n_total_ = 0, dim_ = 0;
  std::vector<int> sizes_, offsets_;
  std::vector<std::vector<Matrix>> bases_;  // by block_index
  std::vector<int> coord_offsets_;          // by block_index
  Vector weights_;
  Matrix exponents_;
  std::vector<std::vector<Matrix>> wbasis_;
};

// An element of Z_V (or, via the coupling, of Z_V^*).
struct ConeElement {
  ConePtr cone;
  Vector coords;

  Matrix matrix() const { return cone->to_matrix(coords); }
};

// An element of H_V: positive scalar diagonal blocks and V-system blocks
// below the diagonal. `off` follows the off-diagonal coordinate layout.
struct TriangularElement {
  ConePtr cone;
  Vector diag;
  Vector off;

  static TriangularElement identity(const ConePtr& cone);
  Matrix matrix() const;
};

ConeElement identity_element(const ConePtr& cone);
ConeElement make_element(const ConePtr& cone, Vector coords);

// Projects a dense lower-triangular matrix onto H_V; throws StructureLeak if
// the residual exceeds tol.
TriangularElement triangular_from_matrix(const ConePtr& cone, const Matrix& t,
                                         double tol = kAxiomTol);
TriangularElement multiply(const TriangularElement& a, const TriangularElement& b);
TriangularElement inverse(const TriangularElement& t);

ConeElement rho_action(const TriangularElement& t, const ConeElement& y);
ConeElement rho_star_action(const TriangularElement& t, const ConeElement& eta);
double coupling(const ConeElement& y, const ConeElement& eta);

// The unique T ∈ H_V with y = T Tᵀ.
TriangularElement structured_cholesky(const ConeElement& y);

// ρ*(T) I_N, an interior point of the dual cone.
ConeElement dual_orbit_point(const TriangularElement& t);
// Inverse of dual_orbit_point by back-substitution; throws NotInDualCone.
TriangularElement triangular_from_dual(const ConeElement& eta);

bool dual_membership(const ConeElement& eta);
bool cone_membership(const ConeElement& y);

double chi(const Vector& sigma, const TriangularElement& t);
double delta(const Vector& sigma, const ConeElement& y);
double delta_star(const Vector& sigma, const ConeElement& eta);

// a with Σ_i a_i m(i) = target (unitriangular solve).
Vector exponent_solve(const ConeRealization& cone, const Vector& target);

Vector reversed(const Vector& v);

// Random element of H_V: t_kk = exp(U(-spread, spread)), off ~ N(0, scale²).
TriangularElement random_triangular(const ConePtr& cone, std::mt19937_64& rng,
                                    double spread = 0.5, double scale = 1.0);

// Presets: "sym:r", "vinberg", "dual_vinberg", "lorentz:m", "herm2c".
// "sym(3)" and "lorentz(2)" spellings are accepted too.
ConePtr preset(const std::string& name);
ConePtr sym_cone(int r);
ConePtr vinberg_cone();
ConePtr dual_vinberg_cone();
ConePtr lorentz_cone(int m);
ConePtr herm2c_cone();

}  // namespace conewishart
