#pragma once

// Wishart laws γ_{q,θ}: closed-form Laplace transforms, moments and
// densities for true and virtual quadratic maps.

#include "conewishart/quadratic_map.hpp"
#include "conewishart/riesz_gindikin.hpp"

#include <optional>
#include <vector>

namespace conewishart {

inline constexpr int kMaxPermutationOrder = 8;

class WishartLaw {
 public:
  // Checks φ_i(-θ) > 0 for every component. On realized cones with a
  // homogeneous form, also resolves σ ∈ Ξ (throws NotInXi) and the
  // triangular T with ρ*(T) I_N = -g0*θ; a caller-supplied T is verified.
  static WishartLaw make(VirtualQuadraticMap q, Vector theta,
                         std::optional<TriangularElement> t = std::nullopt);
  static WishartLaw make(QuadraticMap q, Vector theta) {
    return make(VirtualQuadraticMap::single(std::move(q)), std::move(theta));
  }

  const VirtualQuadraticMap& map() const { return map_; }
  const Vector& theta() const { return theta_; }
  const Codomain& codomain() const { return map_.codomain(); }
  int dim() const { return codomain().dim(); }

  // φ_i(-θ)^{-1} per component.
  const std::vector<Matrix>& covariances() const { return cov_; }

  // Present when the map is g0 ∘ (weighted basic maps) on a realized cone.
  const std::optional<VirtualQuadraticMap::HomogeneousForm>& homogeneous() const { return form_; }
  const std::optional<RieszDescriptor>& riesz() const { return riesz_; }
  // T with ρ*(T) I_N = -g0*θ.
  const std::optional<TriangularElement>& triangular() const { return t_; }

 private:
  VirtualQuadraticMap map_;
  Vector theta_;
  std::vector<Matrix> cov_;
  std::optional<VirtualQuadraticMap::HomogeneousForm> form_;
  std::optional<RieszDescriptor> riesz_;
  std::optional<TriangularElement> t_;
};

// Wraps the basic maps of a realized cone with weights s; θ = -ρ*(T) I_N.
WishartLaw basic_law(const ConePtr& cone, const Vector& weights, const Vector& theta);
Vector theta_from_triangular(const TriangularElement& t);

double wishart_laplace(const WishartLaw& law, const Vector& eta);
double log_wishart_laplace(const WishartLaw& law, const Vector& eta);

double mean_form(const WishartLaw& law, const Vector& eta);
Vector mean_element(const WishartLaw& law);
double covariance_form(const WishartLaw& law, const Vector& eta, const Vector& eta2);
// Covariance of the coordinates of Y.
Matrix covariance_matrix(const WishartLaw& law);

// E Π_j ⟨Y, η_j⟩ by the permutation-cycle sum; N > 8 falls back to the
// univariate formula when all η_j agree, else throws OrderTooLarge.
double moment(const WishartLaw& law, const std::vector<Vector>& etas);
// E ⟨Y, η⟩^N by the composition formula.
double univariate_moment(const WishartLaw& law, const Vector& eta, int n);

// Density with respect to Lebesgue measure in structured coordinates.
// Throws SingularLaw unless σ_i > p_i/2 for all i; NotInCone off P_V.
double density(const WishartLaw& law, const Vector& y);
double log_density(const WishartLaw& law, const Vector& y);

// Law of g Y: map g∘q with parameter (g^{-1})*θ.
WishartLaw pushforward_law(const Matrix& g, const WishartLaw& law);

}  // namespace conewishart
