#include "conewishart/riesz_gindikin.hpp"

#include "conewishart/errors.hpp"

#include <cmath>
#include <numbers>

namespace conewishart {

bool GindikinParameter::dirac() const {
  for (int e : epsilon)
    if (e) return false;
  return true;
}

bool GindikinParameter::nonsingular() const {
  for (int e : epsilon)
    if (!e) return false;
  return true;
}

Vector sigma_of_weights(const ConeRealization& cone, const Vector& s) {
  if (s.size() != cone.rank())
    throw Error(ErrorCode::DimensionMismatch,
                "expected " + std::to_string(cone.rank()) + " weights, got " +
                    std::to_string(s.size()));
  return 0.5 * cone.exponent_matrix().transpose() * s;
}

GindikinParameter gindikin_decompose(const ConeRealization& cone, const Vector& sigma) {
  const int r = cone.rank();
  if (sigma.size() != r)
    throw Error(ErrorCode::DimensionMismatch, "sigma has wrong length");
  GindikinParameter g;
  g.sigma = sigma;
  g.epsilon.assign(r, 0);
  g.u = Vector::Zero(r);
  g.p = Vector::Zero(r);
  for (int k = 0; k < r; ++k) {
    double p = 0.0;
    for (int i = 0; i < k; ++i)
      if (g.epsilon[i]) p += cone.block_dim(k, i);
    g.p(k) = p;
    const double diff = sigma(k) - p / 2.0;
    if (std::abs(diff) <= kGindikinTol) continue;
    if (diff < 0.0) throw NotInXi(k + 1, sigma(k), p / 2.0);
    g.epsilon[k] = 1;
    g.u(k) = diff;
  }
  return g;
}

RieszDescriptor riesz_exists(const ConePtr& cone, const Vector& weights) {
  return {cone, weights, gindikin_decompose(*cone, sigma_of_weights(*cone, weights))};
}

RieszDescriptor riesz_exists(const VirtualQuadraticMap& q) {
  const auto bw = q.basic_weights();
  if (!bw)
    throw Error(ErrorCode::NotBasicVirtualMap,
                "map is not a weighted sum of basic maps of a realized cone");
  return riesz_exists(q.codomain().cone(), *bw);
}

double log_riesz_laplace(const RieszDescriptor& desc, const Vector& theta) {
  const auto& cone = *desc.cone;
  if (theta.size() != cone.dim())
    throw Error(ErrorCode::DimensionMismatch, "theta has wrong length");
  const Vector a = exponent_solve(cone, -desc.param.sigma);
  const Vector eta = -theta;
  double lg = desc.total() * std::log(std::numbers::pi);
  for (int i = 0; i < cone.rank(); ++i) {
    const double det = cone.basic_phi(i, eta).determinant();
    if (!(det > 0.0))
      throw Error(ErrorCode::NotInDualCone, "-theta is not in the open dual cone");
    if (a(i) != 0.0) lg += a(i) * std::log(det);
  }
  return lg;
}

double riesz_laplace(const RieszDescriptor& desc, const Vector& theta) {
  return std::exp(log_riesz_laplace(desc, theta));
}

double gamma_epsilon_u(const ConeRealization& cone, const std::vector<int>& epsilon,
                       const Vector& u) {
  const int r = cone.rank();
  if (static_cast<int>(epsilon.size()) != r || u.size() != r)
    throw Error(ErrorCode::DimensionMismatch, "epsilon or u has wrong length");
  double lg = 0.0;
  int dim_w = 0;
  for (int i = 0; i < r; ++i) {
    if (epsilon[i]) {
      if (!(u(i) > 0.0))
        throw Error(ErrorCode::InvalidU, "u_" + std::to_string(i + 1) + " must be positive");
      dim_w += cone.basic_dim(i);
      lg += std::lgamma(u(i)) - std::log(2.0 * std::sqrt(std::numbers::pi));
    } else if (u(i) != 0.0) {
      throw Error(ErrorCode::InvalidU, "u_" + std::to_string(i + 1) + " must be zero");
    }
  }
  lg += 0.5 * dim_w * std::log(std::numbers::pi);
  return std::exp(lg);
}

double log_gamma_cone(const ConeRealization& cone, const Vector& sigma) {
  const int r = cone.rank();
  if (sigma.size() != r)
    throw Error(ErrorCode::DimensionMismatch, "sigma has wrong length");
  const Vector p = cone.p_full();
  double lg = 0.5 * (cone.dim() - r) * std::log(std::numbers::pi);
  for (int k = 0; k < r; ++k) {
    const double a = sigma(k) - p(k) / 2.0;
    if (!(a > kGindikinTol))
      throw Error(ErrorCode::OutOfNonSingularRange,
                  "sigma_" + std::to_string(k + 1) + " must exceed p_" +
                      std::to_string(k + 1) + "/2");
    lg += std::lgamma(a);
  }
  return lg;
}

double gamma_cone(const ConeRealization& cone, const Vector& sigma) {
  return std::exp(log_gamma_cone(cone, sigma));
}

}  // namespace conewishart
