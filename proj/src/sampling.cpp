#include "conewishart/sampling.hpp"

#include "conewishart/errors.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <functional>
#include <random>
#include <string>
#include <thread>

namespace conewishart {
namespace {

std::mt19937_64 stream_rng(std::uint64_t seed, long stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed & 0xffffffffu),
                    static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream)};
  return std::mt19937_64(seq);
}

// Calls fill(rng, first_row, rows) once per stream, spread over workers.
void run_streams(long count, std::uint64_t seed,
                 const std::function<void(std::mt19937_64&, long, long)>& fill) {
  if (count <= 0) return;
  const long streams = (count + kStreamSize - 1) / kStreamSize;
  const int workers = static_cast<int>(std::min<long>(worker_count(), streams));
  std::atomic<long> next{0};
  auto work = [&] {
    for (long s = next++; s < streams; s = next++) {
      auto rng = stream_rng(seed, s);
      const long first = s * kStreamSize;
      fill(rng, first, std::min<long>(kStreamSize, count - first));
    }
  };
  if (workers <= 1) {
    work();
    return;
  }
  std::vector<std::thread> pool;
  for (int w = 0; w < workers; ++w) pool.emplace_back(work);
  for (auto& t : pool) t.join();
}

Matrix lower_inverse(const Matrix& t) {
  return t.triangularView<Eigen::Lower>().solve(Matrix::Identity(t.rows(), t.cols()));
}

SampleBatch bartlett_core(const ConePtr& cone, const GindikinParameter& param,
                          const TriangularElement& t, const std::optional<Matrix>& g0,
                          std::uint64_t seed, long count) {
  SampleBatch batch;
  batch.codomain = Codomain::realized(cone);
  batch.seed = seed;
  batch.count = count;
  batch.param = param;
  batch.draws = Matrix::Zero(std::max<long>(count, 0), cone->dim());
  if (param.dirac()) return batch;

  const int r = cone->rank();
  const int n = cone->ambient_size();
  const Matrix tinv = lower_inverse(t.matrix());
  run_streams(count, seed, [&](std::mt19937_64& rng, long first, long rows) {
    std::normal_distribution<double> normal(0.0, 1.0);
    Matrix tx(n, n);
    for (long row = first; row < first + rows; ++row) {
      tx.setZero();
      for (int i = 0; i < r; ++i) {
        if (!param.epsilon[i]) continue;
        std::gamma_distribution<double> chi2(param.u(i), 2.0);
        const double xii = std::sqrt(chi2(rng));
        const int oi = cone->block_offset(i), ni = cone->block_size(i);
        tx.block(oi, oi, ni, ni).diagonal().setConstant(xii);
        for (int l = i + 1; l < r; ++l) {
          const auto& basis = cone->basis(l, i);
          auto blk = tx.block(cone->block_offset(l), oi, cone->block_size(l), ni);
          for (const auto& b : basis) blk += normal(rng) * b;
        }
      }
      const Matrix m = tinv * tx;
      Vector y = cone->from_matrix(0.5 * m * m.transpose());
      if (g0) y = *g0 * y;
      batch.draws.row(row) = y.transpose();
    }
  });
  return batch;
}

}  // namespace

int worker_count() {
  int hw = static_cast<int>(std::thread::hardware_concurrency());
  if (hw <= 0) hw = 1;
  if (const char* env = std::getenv("CONEWISHART_THREADS")) {
    char* end = nullptr;
    const long cap = std::strtol(env, &end, 10);
    if (end != env && cap >= 1) hw = static_cast<int>(std::min<long>(hw, cap));
  }
  return std::max(hw, 1);
}

Vector fit_base_weights(const QuadraticMap& q, const Matrix& g0) {
  const Codomain& cod = q.codomain();
  if (!cod.is_realized())
    throw Error(ErrorCode::MissingTriangularForm, "g0 needs a realized codomain");
  const ConePtr& cone = cod.cone();
  const int r = cone->rank();
  const int n = cone->dim();
  if (g0.rows() != n || g0.cols() != n)
    throw Error(ErrorCode::DimensionMismatch, "g0 has wrong size");
  Eigen::FullPivLU<Matrix> lu(g0);
  if (!lu.isInvertible()) throw Error(ErrorCode::SingularTransform, "g0 is not invertible");
  const Matrix ginv = lu.inverse();
  const Vector& w = cone->coupling_weights();
  auto log_det_psi = [&](const Vector& eta) {
    const Matrix a = symmetrize(q.phi(dual_action(ginv, w, eta)));
    if (!is_positive_definite(a, kPdTol))
      throw Error(ErrorCode::InvalidArgument, "g0 does not carry the dual cone onto itself");
    return log_det_spd(a);
  };

  const Vector ones = cone->identity_coords();
  const double base = log_det_psi(ones);
  Vector m(r);
  for (int k = 0; k < r; ++k) {
    Vector e = ones;
    e(k) = std::exp(1.0);
    const double mk = log_det_psi(e) - base;
    if (std::abs(mk - std::round(mk)) > 1e-6)
      throw Error(ErrorCode::InvalidArgument,
                  "fitted multiplier m_" + std::to_string(k + 1) + " = " +
                      std::to_string(mk) + " is not an integer");
    m(k) = std::round(mk);
  }
  const Vector a = exponent_solve(*cone, m);

  double ref = 0.0;
  bool first = true;
  for (const auto& eta : cod.probes(kDefaultProbeCount)) {
    double lg = log_det_psi(eta);
    for (int i = 0; i < r; ++i)
      if (a(i) != 0.0) lg -= a(i) * log_det_spd(cone->basic_phi(i, eta));
    if (first) {
      ref = lg;
      first = false;
    } else if (std::abs(lg - ref) > 1e-8 * std::max(1.0, std::abs(ref))) {
      throw Error(ErrorCode::InvalidArgument,
                  "det phi is not relatively invariant under the given g0");
    }
  }
  return a;
}

SampleBatch bartlett_sample(const WishartLaw& law, std::uint64_t seed, long count,
                            const std::optional<Matrix>& g0) {
  if (count < 0) throw Error(ErrorCode::InvalidArgument, "count must be >= 0");
  if (law.homogeneous() && law.riesz() && law.triangular()) {
    const auto& form = *law.homogeneous();
    std::optional<Matrix> g;
    if (!form.identity) g = form.g0;
    return bartlett_core(law.codomain().cone(), law.riesz()->param, *law.triangular(), g,
                         seed, count);
  }
  if (!g0 || !law.codomain().is_realized() || law.map().components().size() != 1)
    throw Error(ErrorCode::MissingTriangularForm,
                "law has no basic-map form; supply g0 for a homogeneous map");
  const auto& [q, s] = law.map().components().front();
  const ConePtr& cone = law.codomain().cone();
  const Vector weights = s * fit_base_weights(q, *g0);
  const Vector base_theta = dual_action(*g0, cone->coupling_weights(), law.theta());
  const RieszDescriptor desc = riesz_exists(cone, weights);
  const TriangularElement t = triangular_from_dual({cone, -base_theta});
  return bartlett_core(cone, desc.param, t, g0, seed, count);
}

SampleBatch direct_sample(const WishartLaw& law, std::uint64_t seed, long count) {
  if (count < 0) throw Error(ErrorCode::InvalidArgument, "count must be >= 0");
  if (!law.map().is_true_map())
    throw Error(ErrorCode::VirtualMapUnsupported, "direct sampling needs a true map");
  const QuadraticMap& q = law.map().components().front().first;
  const Matrix a = symmetrize(q.phi(-law.theta()));
  Eigen::LLT<Matrix> llt(a);
  if (llt.info() != Eigen::Success)
    throw Error(ErrorCode::NotPD, "phi(-theta) is not positive definite");
  const Matrix lt = llt.matrixU();
  SampleBatch batch;
  batch.codomain = law.codomain();
  batch.seed = seed;
  batch.count = count;
  if (law.riesz()) batch.param = law.riesz()->param;
  batch.draws = Matrix::Zero(count, law.dim());
  const int m = q.domain_dim();
  run_streams(count, seed, [&](std::mt19937_64& rng, long first, long rows) {
    std::normal_distribution<double> normal(0.0, 1.0);
    Vector z(m);
    for (long row = first; row < first + rows; ++row) {
      for (int j = 0; j < m; ++j) z(j) = normal(rng);
      const Vector x = lt.triangularView<Eigen::Upper>().solve(z);
      batch.draws.row(row) = (0.5 * q.evaluate(x)).transpose();
    }
  });
  return batch;
}

SampleBatch transform_batch(const Matrix& g, const SampleBatch& batch) {
  if (g.rows() != batch.draws.cols() || g.cols() != batch.draws.cols())
    throw Error(ErrorCode::DimensionMismatch, "transform has wrong size");
  Eigen::FullPivLU<Matrix> lu(g);
  if (!lu.isInvertible()) throw Error(ErrorCode::SingularTransform, "transform is not invertible");
  SampleBatch out = batch;
  out.draws = batch.draws * g.transpose();
  return out;
}

std::vector<int> orbit_classify(const ConeElement& y, double tol) {
  const auto& cone = *y.cone;
  const int r = cone.rank();
  Matrix s = y.matrix();
  std::vector<int> eps(r, 0);
  const double scale = max_abs(s);
  if (scale == 0.0) return eps;
  Eigen::SelfAdjointEigenSolver<Matrix> es(s, Eigen::EigenvaluesOnly);
  if (es.eigenvalues().minCoeff() < -tol * scale)
    throw Error(ErrorCode::NotInClosedCone, "element is not positive semidefinite");
  for (int k = 0; k < r; ++k) {
    const int off = cone.block_offset(k), nk = cone.block_size(k);
    const double c = s.block(off, off, nk, nk).trace() / nk;
    if (c <= tol * scale) continue;
    eps[k] = 1;
    const int rest = cone.ambient_size() - off - nk;
    if (rest == 0) continue;
    const Matrix b = s.block(off + nk, off, rest, nk);
    s.bottomRightCorner(rest, rest) -= b * b.transpose() / c;
  }
  return eps;
}

}  // namespace conewishart
