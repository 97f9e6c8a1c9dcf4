#pragma once

#include <Eigen/Dense>

#include <random>
#include <string>

namespace conewishart {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

// Scale-free definiteness test: smallest eigenvalue > rel_tol * largest.
bool is_positive_definite(const Matrix& a, double rel_tol = 1e-10);

// Symmetric matrix with its strict lower triangle mirrored; used to clean
// round-off before factorizations.
Matrix symmetrize(const Matrix& a);

double max_abs(const Matrix& a);

// log det of a symmetric positive definite matrix; throws NotPD otherwise.
double log_det_spd(const Matrix& a);

// Inverse of a symmetric positive definite matrix; throws NotPD otherwise.
Matrix inverse_spd(const Matrix& a);

// Relative difference |a - b| / max(|a|, |b|, floor).
double rel_diff(double a, double b, double floor = 1e-300);

// Numerical rank with SVD threshold rel_tol * sigma_max.
int numerical_rank(const Matrix& a, double rel_tol = 1e-8);

Vector parse_vector(const std::string& csv);

}  // namespace conewishart
