#pragma once

// Bartlett-decomposition and Gaussian samplers for Wishart laws.
//
// Draws are split into streams of kStreamSize; stream s uses its own
// std::mt19937_64 seeded from (seed, s), so batches do not depend on the
// number of worker threads.

#include "conewishart/wishart.hpp"

#include <cstdint>
#include <optional>
#include <vector>

namespace conewishart {

inline constexpr int kStreamSize = 1024;
inline constexpr double kOrbitPivotTol = 1e-8;

struct SampleBatch {
  Codomain codomain;
  Matrix draws;  // one draw per row, structured coordinates
  std::uint64_t seed = 0;
  long count = 0;
  std::optional<GindikinParameter> param;
};

// min(hardware threads, CONEWISHART_THREADS) and at least 1.
int worker_count();

// Y = g0 ρ(T)^{-1} q_V^ε(X^u) / 2. When the map has no basic-map form a
// user g0 may be given: m is fitted from det φ on diagonal probes and the
// relative invariance is checked before use.
SampleBatch bartlett_sample(const WishartLaw& law, std::uint64_t seed, long count,
                            const std::optional<Matrix>& g0 = std::nullopt);

// Y = q(X)/2 with X ~ N(0, φ(-θ)^{-1}). Throws VirtualMapUnsupported.
SampleBatch direct_sample(const WishartLaw& law, std::uint64_t seed, long count);

SampleBatch transform_batch(const Matrix& g, const SampleBatch& batch);

// Basic-map weights s' with g0^{-1} ∘ q ≅ ⊕ (q_V^i)^{⊕ s'_i}; throws
// InvalidArgument when the fit is not integral or not relatively invariant.
Vector fit_base_weights(const QuadraticMap& q, const Matrix& g0);

// ε with ε_k = 0 where the k-th structured pivot vanishes. Throws
// NotInClosedCone.
std::vector<int> orbit_classify(const ConeElement& y, double tol = kOrbitPivotTol);

}  // namespace conewishart
