#include "support.hpp"

#include <cstdlib>

using namespace cwtest;

namespace {

double mean_z(const SampleBatch& b, const Vector& mean) { return cwtest::mean_z(b.draws, mean); }

class ThreadCap {
 public:
  explicit ThreadCap(const char* value) {
    if (const char* old = std::getenv("CONEWISHART_THREADS")) old_ = old;
    setenv("CONEWISHART_THREADS", value, 1);
  }
  ~ThreadCap() {
    if (old_.empty())
      unsetenv("CONEWISHART_THREADS");
    else
      setenv("CONEWISHART_THREADS", old_.c_str(), 1);
  }

 private:
  std::string old_;
};

}  // namespace

TEST_CASE("dirac law gives zero draws") {
  const ConePtr s3 = sym_cone(3);
  const WishartLaw law = basic_law(s3, Vector::Zero(3), -s3->identity_coords());
  const SampleBatch b = bartlett_sample(law, 1, 500);
  CHECK(b.draws.rows() == 500);
  CHECK(b.draws.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("singular laws have the rank of their orbit") {
  std::mt19937_64 rng(61);
  const ConePtr s3 = sym_cone(3);
  const WishartLaw law = basic_law(s3, vec({1, 0, 0}), -random_dual(s3, rng));
  REQUIRE(law.riesz()->param.epsilon == std::vector<int>{1, 0, 0});
  const SampleBatch b = bartlett_sample(law, 5, 2000);
  for (long i = 0; i < b.draws.rows(); ++i)
    REQUIRE(numerical_rank(s3->to_matrix(b.draws.row(i).transpose())) == 1);

  const ConePtr s4 = sym_cone(4);
  for (int k = 0; k <= 4; ++k) {
    const WishartLaw lk = basic_law(s4, vec({double(k), 0, 0, 0}), -s4->identity_coords());
    const SampleBatch bk = bartlett_sample(lk, 7 + k, 1000);
    for (long i = 0; i < bk.draws.rows(); ++i) {
      const Matrix y = s4->to_matrix(bk.draws.row(i).transpose());
      REQUIRE(numerical_rank(y, 1e-14) == k);
      const Vector ev = Eigen::SelfAdjointEigenSolver<Matrix>(y).eigenvalues();
      REQUIRE(ev.minCoeff() >= -1e-12 * std::max(1.0, ev.cwiseAbs().maxCoeff()));
    }
  }
}

TEST_CASE("bartlett mean on Sym(3)") {
  const ConePtr s3 = sym_cone(3);
  const WishartLaw law = basic_law(s3, vec({5, 0, 0}), -s3->identity_coords());
  const SampleBatch b = bartlett_sample(law, 2024, 100000);
  CHECK(mean_z(b, mean_element(law)) < 3.0);
  CHECK(max_rel(mean_element(law), Vector(2.5 * s3->identity_coords())) < 1e-14);
}

TEST_CASE("direct sampler") {
  const WishartLaw sl = basic_law(sym_cone(1), vec({1}), vec({-1}));
  const SampleBatch b = direct_sample(sl, 9, 100000);
  CHECK(mean_z(b, vec({0.5})) < 3.0);
  CHECK(b.draws.minCoeff() >= 0.0);

  const WishartLaw pl = WishartLaw::make(polyhedral4_map(), vec({-1, -1, -1}));
  const SampleBatch bp = direct_sample(pl, 10, 100000);
  CHECK(mean_z(bp, mean_element(pl)) < 3.0);

  CHECK(error_code_of([] {
          const ConePtr h = herm2c_cone();
          direct_sample(WishartLaw::make(basic_virtual_map(h, vec({2, -2})), -h->identity_coords()),
                        1, 10);
        }) == ErrorCode::VirtualMapUnsupported);
}

TEST_CASE("direct and bartlett samplers agree on q_{3,5}") {
  std::mt19937_64 rng(62);
  const ConePtr s3 = sym_cone(3);
  const WishartLaw law = WishartLaw::make(qrs_map(3, 5), -random_dual(s3, rng));
  const SampleBatch d = direct_sample(law, 11, 50000);
  const SampleBatch b = bartlett_sample(law, 12, 50000);
  CHECK(two_sample_z(d.draws, b.draws) < 4.0);
  CHECK(mean_z(b, mean_element(law)) < 4.0);
}

TEST_CASE("samples are reproducible and independent of the thread count") {
  std::mt19937_64 rng(63);
  const ConePtr v = vinberg_cone();
  const WishartLaw law = basic_law(v, vec({3, 1, 2}), -random_dual(v, rng));
  Matrix one, many;
  {
    ThreadCap cap("1");
    CHECK(worker_count() == 1);
    one = bartlett_sample(law, 99, 5000).draws;
  }
  {
    ThreadCap cap("6");
    many = bartlett_sample(law, 99, 5000).draws;
  }
  CHECK(one == many);
  CHECK_FALSE(one == bartlett_sample(law, 100, 5000).draws);
  CHECK(bartlett_sample(law, 99, 0).draws.rows() == 0);
}

TEST_CASE("transformed batches follow the pushforward law") {
  std::mt19937_64 rng(64);
  const ConePtr v = vinberg_cone();
  const WishartLaw law = basic_law(v, vec({3, 1, 1}), -random_dual(v, rng));
  const SampleBatch same = transform_batch(Matrix::Identity(5, 5), bartlett_sample(law, 3, 100));
  CHECK(same.draws == bartlett_sample(law, 3, 100).draws);

  const Matrix g = congruence_matrix(*v, random_triangular(v, rng).matrix());
  const SampleBatch moved = transform_batch(g, bartlett_sample(law, 4, 40000));
  CHECK(mean_z(moved, mean_element(pushforward_law(g, law))) < 4.0);
}

TEST_CASE("box probabilities under g*theta") {
  // γ_{q, g*θ}(A) = γ_{q, θ}(gA): draws of the first law match g^{-1} applied to the second.
  std::mt19937_64 rng(65);
  const ConePtr s2 = sym_cone(2);
  const Vector s = vec({3, 0});
  const Vector theta = -random_dual(s2, rng);
  const Matrix g = congruence_matrix(*s2, random_triangular(s2, rng).matrix());
  const WishartLaw base = basic_law(s2, s, theta);
  const WishartLaw shifted = basic_law(s2, s, dual_action(g, s2->coupling_weights(), theta));
  const long n = 40000;
  const Matrix a = bartlett_sample(shifted, 21, n).draws;
  const Matrix b = transform_batch(g.inverse(), bartlett_sample(base, 22, n)).draws;
  const Vector med = mean_element(shifted);
  const auto in_box = [&](const Matrix& d, long i) {
    return d(i, 0) < med(0) && d(i, 1) < med(1) && d(i, 2) > 0.0;
  };
  double pa = 0, pb = 0;
  for (long i = 0; i < n; ++i) {
    pa += in_box(a, i);
    pb += in_box(b, i);
  }
  pa /= n;
  pb /= n;
  const double pooled = (pa + pb) / 2;
  CHECK(pooled > 0.05);
  CHECK(std::abs(pa - pb) / std::sqrt(2 * pooled * (1 - pooled) / n) < 4.0);
}

TEST_CASE("orbit_classify") {
  std::mt19937_64 rng(66);
  const ConePtr s4 = sym_cone(4);
  CHECK(orbit_classify(identity_element(s4)) == std::vector<int>{1, 1, 1, 1});
  CHECK(orbit_classify(ConeElement{s4, random_point(s4, rng)}) == std::vector<int>{1, 1, 1, 1});
  CHECK(orbit_classify(ConeElement{s4, Vector::Zero(10)}) == std::vector<int>{0, 0, 0, 0});
  Vector neg = s4->identity_coords();
  neg(2) = -1.0;
  CHECK(error_code_of([&] { orbit_classify(ConeElement{s4, neg}); }) ==
        ErrorCode::NotInClosedCone);

  const std::vector<int> eps{0, 1, 0, 1};
  const WishartLaw law = basic_law(s4, vec({0, 1, 0, 1}), -random_dual(s4, rng));
  REQUIRE(law.riesz()->param.epsilon == eps);
  const SampleBatch b = bartlett_sample(law, 8, 10000);
  long hits = 0;
  for (long i = 0; i < b.draws.rows(); ++i)
    hits += orbit_classify(ConeElement{s4, b.draws.row(i).transpose()}) == eps;
  CHECK(hits >= 9900);
}

TEST_CASE("user-supplied g0 for a homogeneous map") {
  std::mt19937_64 rng(67);
  const QuadraticMap q = restriction_map(3, {0, 2});
  REQUIRE(q.meta().g0.has_value());
  const Vector fitted = fit_base_weights(q, *q.meta().g0);
  CHECK(max_rel(fitted, vec({0, 1, 0})) < 1e-12);

  const ConePtr s3 = sym_cone(3);
  const WishartLaw law = WishartLaw::make(q, -random_dual(s3, rng));
  const SampleBatch bart = bartlett_sample(law, 31, 40000);
  const SampleBatch direct = direct_sample(law, 32, 40000);
  CHECK(two_sample_z(bart.draws, direct.draws) < 4.0);

  CHECK(error_code_of([&] { fit_base_weights(polyhedral4_map(), Matrix::Identity(3, 3)); }) ==
        ErrorCode::MissingTriangularForm);
  // Rescaling y21 alone is not a congruence: det φ is no longer relatively invariant.
  Matrix g0 = Matrix::Identity(6, 6);
  g0(3, 3) = 2.0;
  CHECK(error_code_of([&] { fit_base_weights(basic_map(s3, 0), g0); }) ==
        ErrorCode::InvalidArgument);
}
