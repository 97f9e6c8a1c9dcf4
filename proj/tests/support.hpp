#pragma once

#include "conewishart/errors.hpp"
#include "conewishart/linalg.hpp"
#include "conewishart/sampling.hpp"
#include "conewishart/wishart.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

namespace cwtest {

using namespace conewishart;

inline Vector random_dual(const ConePtr& cone, std::mt19937_64& rng, double spread = 0.5,
                          double scale = 0.8) {
  return dual_orbit_point(random_triangular(cone, rng, spread, scale)).coords;
}

inline Vector random_point(const ConePtr& cone, std::mt19937_64& rng, double spread = 0.5,
                           double scale = 0.8) {
  return rho_action(random_triangular(cone, rng, spread, scale), identity_element(cone)).coords;
}

inline Vector vec(std::initializer_list<double> xs) {
  Vector v(static_cast<Eigen::Index>(xs.size()));
  Eigen::Index i = 0;
  for (double x : xs) v(i++) = x;
  return v;
}

inline double max_rel(const Vector& a, const Vector& b) {
  REQUIRE(a.size() == b.size());
  const double scale = std::max({1.0, a.cwiseAbs().maxCoeff(), b.cwiseAbs().maxCoeff()});
  return (a - b).cwiseAbs().maxCoeff() / scale;
}

inline double max_rel(const Matrix& a, const Matrix& b) {
  REQUIRE(a.rows() == b.rows());
  REQUIRE(a.cols() == b.cols());
  const double scale = std::max({1.0, max_abs(a), max_abs(b)});
  return max_abs(a - b) / scale;
}

template <class F>
ErrorCode error_code_of(F&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an Error");
  return ErrorCode::InvalidArgument;
}

// Mean of each column and its standard error.
struct ColumnStats {
  Vector mean;
  Vector se;
};

inline ColumnStats column_stats(const Matrix& draws) {
  const double n = static_cast<double>(draws.rows());
  ColumnStats s;
  s.mean = draws.colwise().mean().transpose();
  const Matrix centered = draws.rowwise() - s.mean.transpose();
  s.se = (centered.array().square().colwise().sum() / (n - 1.0) / n).sqrt().transpose();
  return s;
}

// Largest |z| of sample means against `mean`. Columns with no spread must
// match exactly.
inline double mean_z(const Matrix& draws, const Vector& mean) {
  const ColumnStats st = column_stats(draws);
  double z = 0.0;
  for (Eigen::Index j = 0; j < mean.size(); ++j) {
    const double d = std::abs(st.mean(j) - mean(j));
    z = std::max(z, st.se(j) > 0 ? d / st.se(j) : (d < 1e-12 ? 0.0 : HUGE_VAL));
  }
  return z;
}

inline double two_sample_z(const Matrix& a, const Matrix& b) {
  const ColumnStats sa = column_stats(a), sb = column_stats(b);
  double z = 0.0;
  for (Eigen::Index j = 0; j < sa.mean.size(); ++j) {
    const double d = std::abs(sa.mean(j) - sb.mean(j));
    const double se = std::hypot(sa.se(j), sb.se(j));
    z = std::max(z, se > 0 ? d / se : (d < 1e-12 ? 0.0 : HUGE_VAL));
  }
  return z;
}

}  // namespace cwtest
