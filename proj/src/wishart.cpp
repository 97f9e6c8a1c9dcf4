#include "conewishart/wishart.hpp"

#include "conewishart/errors.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

namespace conewishart {
namespace {

bool positive_integer(double s) { return s > 0.0 && s == std::round(s); }

// φ_i(-θ)^{-1} φ_i(η) for every component.
std::vector<Matrix> tilted(const WishartLaw& law, const Vector& eta) {
  if (eta.size() != law.dim())
    throw Error(ErrorCode::DimensionMismatch, "dual element has wrong length");
  std::vector<Matrix> out;
  const auto& parts = law.map().components();
  for (std::size_t i = 0; i < parts.size(); ++i)
    out.push_back(law.covariances()[i] * parts[i].first.phi(eta));
  return out;
}

}  // namespace

WishartLaw WishartLaw::make(VirtualQuadraticMap q, Vector theta,
                            std::optional<TriangularElement> t) {
  WishartLaw law;
  law.map_ = std::move(q);
  if (theta.size() != law.dim())
    throw Error(ErrorCode::DimensionMismatch,
                "theta needs " + std::to_string(law.dim()) + " coordinates");
  law.theta_ = std::move(theta);
  for (const auto& [c, s] : law.map_.components()) {
    const Matrix a = c.phi(-law.theta_);
    if (!is_positive_definite(a, kPdTol))
      throw Error(ErrorCode::NotInDualCone, "phi(-theta) is not positive definite");
    law.cov_.push_back(inverse_spd(symmetrize(a)));
  }
  law.form_ = law.map_.homogeneous_form();
  if (law.form_) {
    const ConePtr& cone = law.codomain().cone();
    const Vector base_theta =
        law.form_->identity ? law.theta_
                            : dual_action(law.form_->g0, cone->coupling_weights(), law.theta_);
    law.riesz_ = riesz_exists(cone, law.form_->weights);
    const ConeElement target{cone, -base_theta};
    if (t) {
      if (t->cone != cone && !t->cone->same_as(*cone))
        throw Error(ErrorCode::RealizationMismatch, "T belongs to another realization");
      const Vector fwd = dual_orbit_point(*t).coords;
      if ((fwd - target.coords).norm() > 1e-10 * std::max(1.0, target.coords.norm()))
        throw Error(ErrorCode::InvalidArgument, "supplied T does not satisfy rho*(T)I = -theta");
      law.t_ = std::move(t);
    } else {
      law.t_ = triangular_from_dual(target);
    }
  } else if (!law.map_.is_true_map()) {
    for (const auto& [c, s] : law.map_.components())
      if (!positive_integer(s))
        throw Error(ErrorCode::VirtualMapUnsupported,
                    "virtual map without a basic-map form needs positive integer weights");
  }
  return law;
}

Vector theta_from_triangular(const TriangularElement& t) {
  return -dual_orbit_point(t).coords;
}

WishartLaw basic_law(const ConePtr& cone, const Vector& weights, const Vector& theta) {
  return WishartLaw::make(basic_virtual_map(cone, weights), theta);
}

double log_wishart_laplace(const WishartLaw& law, const Vector& eta) {
  if (eta.size() != law.dim())
    throw Error(ErrorCode::DimensionMismatch, "dual element has wrong length");
  const Vector shifted = -law.theta() - eta;
  const auto& cod = law.codomain();
  const bool exact = cod.is_realized() || (cod.generic_cone() && cod.generic_cone()->dual_member);
  if (exact && !cod.dual_member(shifted))
    throw Error(ErrorCode::OutOfLaplaceDomain, "-theta-eta is not in the dual cone");
  double lg = 0.0;
  const auto& parts = law.map().components();
  for (std::size_t i = 0; i < parts.size(); ++i) {
    const auto& [q, s] = parts[i];
    const Matrix a = symmetrize(q.phi(shifted));
    if (!is_positive_definite(a, kPdTol))
      throw Error(ErrorCode::OutOfLaplaceDomain, "phi(-theta-eta) is not positive definite");
    lg -= 0.5 * s * (log_det_spd(a) - log_det_spd(symmetrize(q.phi(-law.theta()))));
  }
  return lg;
}

double wishart_laplace(const WishartLaw& law, const Vector& eta) {
  return std::exp(log_wishart_laplace(law, eta));
}

double mean_form(const WishartLaw& law, const Vector& eta) {
  const auto a = tilted(law, eta);
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i)
    m += law.map().components()[i].second * a[i].trace();
  return 0.5 * m;
}

Vector mean_element(const WishartLaw& law) {
  const int n = law.dim();
  const Vector& w = law.codomain().weights();
  Vector out(n);
  for (int j = 0; j < n; ++j) out(j) = mean_form(law, Vector::Unit(n, j)) / w(j);
  return out;
}

double covariance_form(const WishartLaw& law, const Vector& eta, const Vector& eta2) {
  const auto a = tilted(law, eta);
  const auto b = tilted(law, eta2);
  double c = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i)
    c += law.map().components()[i].second * (a[i] * b[i]).trace();
  return 0.5 * c;
}

Matrix covariance_matrix(const WishartLaw& law) {
  const int n = law.dim();
  const Vector& w = law.codomain().weights();
  Matrix c(n, n);
  for (int j = 0; j < n; ++j)
    for (int k = j; k < n; ++k) {
      const double v =
          covariance_form(law, Vector::Unit(n, j), Vector::Unit(n, k)) / (w(j) * w(k));
      c(j, k) = v;
      c(k, j) = v;
    }
  return c;
}

double moment(const WishartLaw& law, const std::vector<Vector>& etas) {
  const int n = static_cast<int>(etas.size());
  if (n == 0) return 1.0;
  if (n > kMaxPermutationOrder) {
    bool same = true;
    for (const auto& e : etas) same = same && e == etas.front();
    if (same) return univariate_moment(law, etas.front(), n);
    throw Error(ErrorCode::OrderTooLarge,
                "order " + std::to_string(n) + " exceeds " +
                    std::to_string(kMaxPermutationOrder));
  }
  const auto& parts = law.map().components();
  std::vector<std::vector<Matrix>> a(n);
  for (int j = 0; j < n; ++j) a[j] = tilted(law, etas[j]);

  std::map<std::vector<int>, double> memo;
  auto cycle_value = [&](std::vector<int> cyc) {
    std::rotate(cyc.begin(), std::min_element(cyc.begin(), cyc.end()), cyc.end());
    auto it = memo.find(cyc);
    if (it != memo.end()) return it->second;
    double v = 0.0;
    for (std::size_t i = 0; i < parts.size(); ++i) {
      Matrix prod = a[cyc[0]][i];
      for (std::size_t c = 1; c < cyc.size(); ++c) prod = prod * a[cyc[c]][i];
      v += parts[i].second * prod.trace();
    }
    memo.emplace(cyc, v);
    return v;
  };

  std::vector<int> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  double total = 0.0;
  std::vector<char> seen(n);
  do {
    std::fill(seen.begin(), seen.end(), 0);
    double term = 1.0;
    for (int start = 0; start < n; ++start) {
      if (seen[start]) continue;
      std::vector<int> cyc;
      for (int j = start; !seen[j]; j = perm[j]) {
        seen[j] = 1;
        cyc.push_back(j);
      }
      term *= 0.5 * cycle_value(std::move(cyc));
    }
    total += term;
  } while (std::next_permutation(perm.begin(), perm.end()));
  return total;
}

double univariate_moment(const WishartLaw& law, const Vector& eta, int n) {
  if (n < 0) throw Error(ErrorCode::InvalidArgument, "moment order must be >= 0");
  if (n == 0) return 1.0;
  const auto a = tilted(law, eta);
  const auto& parts = law.map().components();
  // s_half[k] = Σ_i (s_i/2) tr(A_i^k).
  std::vector<double> s_half(n + 1, 0.0);
  for (std::size_t i = 0; i < a.size(); ++i) {
    Matrix pw = a[i];
    for (int k = 1; k <= n; ++k) {
      if (k > 1) pw = pw * a[i];
      s_half[k] += 0.5 * parts[i].second * pw.trace();
    }
  }
  // c[l][m]: sum over compositions of m into l parts of Π S_k / k.
  std::vector<std::vector<double>> c(n + 1, std::vector<double>(n + 1, 0.0));
  c[0][0] = 1.0;
  for (int l = 1; l <= n; ++l)
    for (int m = l; m <= n; ++m)
      for (int k = 1; k <= m - l + 1; ++k) c[l][m] += c[l - 1][m - k] * s_half[k] / k;
  double total = 0.0, l_fact = 1.0;
  for (int l = 1; l <= n; ++l) {
    l_fact *= l;
    total += c[l][n] / l_fact;
  }
  return std::exp(std::lgamma(n + 1.0)) * total;
}

double log_density(const WishartLaw& law, const Vector& y) {
  if (!law.homogeneous() || !law.riesz())
    throw Error(ErrorCode::SingularLaw, "density needs a basic-map form on a realized cone");
  const auto& form = *law.homogeneous();
  const auto& desc = *law.riesz();
  if (!desc.param.nonsingular())
    throw Error(ErrorCode::SingularLaw, "sigma is on a singular stratum");
  const ConePtr& cone = law.codomain().cone();
  if (y.size() != cone->dim())
    throw Error(ErrorCode::DimensionMismatch, "point has wrong length");
  Vector base_y = y;
  Vector base_theta = law.theta();
  double log_jac = 0.0;
  if (!form.identity) {
    Eigen::PartialPivLU<Matrix> lu(form.g0);
    base_y = lu.solve(y);
    base_theta = dual_action(form.g0, cone->coupling_weights(), law.theta());
    log_jac = std::log(std::abs(lu.determinant()));
  }
  const ConeElement ye{cone, base_y};
  if (!cone_membership(ye)) throw Error(ErrorCode::NotInCone, "point is not in the open cone");
  const Vector& sigma = desc.param.sigma;
  const Vector w = cone->coupling_weights();
  double lg = (w.array() * base_y.array() * base_theta.array()).sum();
  for (int i = 0; i < cone->rank(); ++i) {
    const double si = desc.weights(i);
    if (si != 0.0) lg += 0.5 * si * log_det_spd(cone->basic_phi(i, -base_theta));
  }
  const TriangularElement t = structured_cholesky(ye);
  const Vector ex = sigma - cone->d_vector();
  for (int k = 0; k < cone->rank(); ++k) lg += 2.0 * ex(k) * std::log(t.diag(k));
  lg -= log_gamma_cone(*cone, sigma);
  return lg - log_jac;
}

double density(const WishartLaw& law, const Vector& y) {
  return std::exp(log_density(law, y));
}

WishartLaw pushforward_law(const Matrix& g, const WishartLaw& law) {
  VirtualQuadraticMap pushed = pushforward_map(g, law.map());
  const Matrix ginv = Eigen::PartialPivLU<Matrix>(g).inverse();
  return WishartLaw::make(std::move(pushed),
                          dual_action(ginv, law.codomain().weights(), law.theta()));
}

}  // namespace conewishart
