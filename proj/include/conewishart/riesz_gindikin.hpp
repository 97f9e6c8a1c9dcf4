#pragma once

#include "conewishart/cone_realization.hpp"
#include "conewishart/quadratic_map.hpp"

#include <vector>

namespace conewishart {

inline constexpr double kGindikinTol = 1e-12;

struct GindikinParameter {
  Vector sigma;
  std::vector<int> epsilon;
  Vector u;
  Vector p;  // p(ε)

  bool dirac() const;
  // ε = (1,…,1): the law has a density.
  bool nonsingular() const;
};

struct RieszDescriptor {
  ConePtr cone;
  Vector weights;
  GindikinParameter param;

  double total() const { return param.sigma.sum(); }
};

// σ = Σ s_i m(i) / 2.
Vector sigma_of_weights(const ConeRealization& cone, const Vector& s);

// Ascending recursion: p_k(ε) only involves ε_i with i < k. Throws NotInXi
// with the first failing (1-based) index.
GindikinParameter gindikin_decompose(const ConeRealization& cone, const Vector& sigma);

RieszDescriptor riesz_exists(const ConePtr& cone, const Vector& weights);
// Throws NotBasicVirtualMap unless q is a weighted sum of basic maps.
RieszDescriptor riesz_exists(const VirtualQuadraticMap& q);

// π^{|σ|} Δ*_{-σ*}(-θ). Throws NotInDualCone.
double riesz_laplace(const RieszDescriptor& desc, const Vector& theta);
double log_riesz_laplace(const RieszDescriptor& desc, const Vector& theta);

double gamma_epsilon_u(const ConeRealization& cone, const std::vector<int>& epsilon,
                       const Vector& u);
// Γ_P(σ) = π^{(dim Z - r)/2} Π Γ(σ_k - p_k/2), p = p(1,…,1).
double gamma_cone(const ConeRealization& cone, const Vector& sigma);
double log_gamma_cone(const ConeRealization& cone, const Vector& sigma);

}  // namespace conewishart
