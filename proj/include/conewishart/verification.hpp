#pragma once

// The cross-validation battery run by `conewishart verify` and by the
// acceptance binary. One entry per acceptance criterion.

#include "conewishart/wishart.hpp"

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace conewishart {

struct CheckResult {
  int id = 0;
  std::string name;
  bool passed = false;
  std::string detail{};
  double seconds = 0.0;
};

using CovarianceFn = std::function<double(const WishartLaw&, const Vector&, const Vector&)>;

struct BatteryOptions {
  std::uint64_t seed = 20241018;
  // Closed-form covariance used by the checks; tests swap in a broken one.
  CovarianceFn covariance;
};

inline constexpr int kCriterionCount = 9;

CheckResult run_criterion(int id, const BatteryOptions& opts = {});
// Empty ids runs all criteria.
std::vector<CheckResult> run_battery(const BatteryOptions& opts = {},
                                     const std::vector<int>& ids = {});
std::string format_result(const CheckResult& r);

}  // namespace conewishart
