#include "conewishart/linalg.hpp"

#include "conewishart/errors.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <vector>

namespace conewishart {

const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::AxiomViolation: return "AxiomViolation";
    case ErrorCode::UnknownPreset: return "UnknownPreset";
    case ErrorCode::RealizationMismatch: return "RealizationMismatch";
    case ErrorCode::NotInCone: return "NotInCone";
    case ErrorCode::NotInClosedCone: return "NotInClosedCone";
    case ErrorCode::StructureLeak: return "StructureLeak";
    case ErrorCode::NotInDualCone: return "NotInDualCone";
    case ErrorCode::AsymmetricSlice: return "AsymmetricSlice";
    case ErrorCode::PositivityFailure: return "PositivityFailure";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::IndexOutOfRange: return "IndexOutOfRange";
    case ErrorCode::ZeroEpsilon: return "ZeroEpsilon";
    case ErrorCode::EmptyIndexSet: return "EmptyIndexSet";
    case ErrorCode::CodomainMismatch: return "CodomainMismatch";
    case ErrorCode::SingularTransform: return "SingularTransform";
    case ErrorCode::NotInXi: return "NotInXi";
    case ErrorCode::InvalidU: return "InvalidU";
    case ErrorCode::OutOfNonSingularRange: return "OutOfNonSingularRange";
    case ErrorCode::OutOfLaplaceDomain: return "OutOfLaplaceDomain";
    case ErrorCode::OrderTooLarge: return "OrderTooLarge";
    case ErrorCode::SingularLaw: return "SingularLaw";
    case ErrorCode::MissingTriangularForm: return "MissingTriangularForm";
    case ErrorCode::VirtualMapUnsupported: return "VirtualMapUnsupported";
    case ErrorCode::NotPD: return "NotPD";
    case ErrorCode::NotBasicVirtualMap: return "NotBasicVirtualMap";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::SpecParseError: return "SpecParseError";
    case ErrorCode::IOError: return "IOError";
  }
  return "Unknown";
}

AxiomViolation::AxiomViolation(std::string rule, int l, int k, int j,
                               double residual)
    : Error(ErrorCode::AxiomViolation,
            rule + " fails at (l,k,j)=(" + std::to_string(l) + "," +
                std::to_string(k) + "," + std::to_string(j) +
                "), residual " + std::to_string(residual)),
      rule_(std::move(rule)),
      l_(l),
      k_(k),
      j_(j),
      residual_(residual) {}

NotInXi::NotInXi(int index, double sigma, double half_p)
    : Error(ErrorCode::NotInXi,
            "sigma_" + std::to_string(index) + " = " + std::to_string(sigma) +
                " is neither equal to nor above p/2 = " +
                std::to_string(half_p)),
      index_(index) {}

bool is_positive_definite(const Matrix& a, double rel_tol) {
  if (a.rows() == 0) return true;
  if (!a.allFinite()) return false;
  Eigen::SelfAdjointEigenSolver<Matrix> es(symmetrize(a),
                                           Eigen::EigenvaluesOnly);
  const Vector& ev = es.eigenvalues();
  const double hi = ev.maxCoeff();
  return hi > 0.0 && ev.minCoeff() > rel_tol * hi;
}

Matrix symmetrize(const Matrix& a) { return 0.5 * (a + a.transpose()); }

double max_abs(const Matrix& a) {
  return a.size() == 0 ? 0.0 : a.cwiseAbs().maxCoeff();
}

double log_det_spd(const Matrix& a) {
  Eigen::LLT<Matrix> llt(a);
  if (llt.info() != Eigen::Success)
    throw Error(ErrorCode::NotPD, "matrix is not positive definite");
  const Matrix& l = llt.matrixLLT();
  double s = 0.0;
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    if (!(l(i, i) > 0.0))
      throw Error(ErrorCode::NotPD, "matrix is not positive definite");
    s += std::log(l(i, i));
  }
  return 2.0 * s;
}

Matrix inverse_spd(const Matrix& a) {
  Eigen::LLT<Matrix> llt(a);
  if (llt.info() != Eigen::Success)
    throw Error(ErrorCode::NotPD, "matrix is not positive definite");
  return llt.solve(Matrix::Identity(a.rows(), a.cols()));
}

double rel_diff(double a, double b, double floor) {
  const double scale = std::max({std::abs(a), std::abs(b), floor});
  return std::abs(a - b) / scale;
}

int numerical_rank(const Matrix& a, double rel_tol) {
  if (a.size() == 0) return 0;
  Eigen::JacobiSVD<Matrix> svd(a);
  const Vector& sv = svd.singularValues();
  const double top = sv(0);
  if (top <= 0.0) return 0;
  int rank = 0;
  for (Eigen::Index i = 0; i < sv.size(); ++i)
    if (sv(i) > rel_tol * top) ++rank;
  return rank;
}

Vector parse_vector(const std::string& csv) {
  std::vector<double> vals;
  std::stringstream ss(csv);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto first = item.find_first_not_of(" \t");
    if (first == std::string::npos) continue;
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(item.substr(first), &used);
    } catch (const std::exception&) {
      throw Error(ErrorCode::SpecParseError, "not a number: '" + item + "'");
    }
    if (item.find_first_not_of(" \t", first + used) != std::string::npos)
      throw Error(ErrorCode::SpecParseError, "not a number: '" + item + "'");
    vals.push_back(v);
  }
  return Eigen::Map<Vector>(vals.data(), static_cast<Eigen::Index>(vals.size()));
}

}  // namespace conewishart
