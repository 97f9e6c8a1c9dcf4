#pragma once

#include <stdexcept>
#include <string>

namespace conewishart {

enum class ErrorCode {
  AxiomViolation,
  UnknownPreset,
  RealizationMismatch,
  NotInCone,
  NotInClosedCone,
  StructureLeak,
  NotInDualCone,
  AsymmetricSlice,
  PositivityFailure,
  DimensionMismatch,
  IndexOutOfRange,
  ZeroEpsilon,
  EmptyIndexSet,
  CodomainMismatch,
  SingularTransform,
  NotInXi,
  InvalidU,
  OutOfNonSingularRange,
  OutOfLaplaceDomain,
  OrderTooLarge,
  SingularLaw,
  MissingTriangularForm,
  VirtualMapUnsupported,
  NotPD,
  NotBasicVirtualMap,
  InvalidArgument,
  SpecParseError,
  IOError,
};

const char* to_string(ErrorCode code);

// Base of every error raised by the library. The code identifies the
// failure class; the message carries the details.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what),
        code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

// A V-system closure rule (V1)-(V3) or basis orthonormality failed.
// Indices are 1-based block indices as they appear in the cone spec.
class AxiomViolation : public Error {
 public:
  AxiomViolation(std::string rule, int l, int k, int j, double residual);

  const std::string& rule() const noexcept { return rule_; }
  int l() const noexcept { return l_; }
  int k() const noexcept { return k_; }
  int j() const noexcept { return j_; }
  double residual() const noexcept { return residual_; }

 private:
  std::string rule_;
  int l_, k_, j_;
  double residual_;
};

// sigma does not lie in the Gindikin set; index is the first (1-based)
// coordinate where the recursion failed.
class NotInXi : public Error {
 public:
  NotInXi(int index, double sigma, double half_p);

  int index() const noexcept { return index_; }

 private:
  int index_;
};

}  // namespace conewishart
