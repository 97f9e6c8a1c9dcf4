#include "support.hpp"

#include <numbers>

using namespace cwtest;

namespace {

WishartLaw scalar_law(double s = 1.0, double theta = -1.0) {
  return basic_law(sym_cone(1), vec({s}), vec({theta}));
}

WishartLaw random_law(const ConePtr& c, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(1.0, 4.0);
  Vector s(c->rank());
  for (int k = 0; k < c->rank(); ++k) s(k) = u(rng);
  return basic_law(c, s, -random_dual(c, rng));
}

}  // namespace

TEST_CASE("wishart_laplace") {
  std::mt19937_64 rng(51);
  for (const char* name : {"sym(3)", "vinberg", "herm2c"}) {
    const ConePtr c = preset(name);
    CHECK(wishart_laplace(random_law(c, rng), Vector::Zero(c->dim())) == 1.0);
  }

  const WishartLaw sl = scalar_law();
  for (double t : {0.1, 1.0, 7.0})
    CHECK(rel_diff(wishart_laplace(sl, vec({-t})), 1.0 / std::sqrt(1.0 + t)) < 1e-14);
  CHECK(error_code_of([&] { wishart_laplace(sl, vec({1.5})); }) == ErrorCode::OutOfLaplaceDomain);

  for (const char* name : {"sym(3)", "vinberg", "dual_vinberg", "lorentz(2)"}) {
    const ConePtr c = preset(name);
    for (int it = 0; it < 50; ++it) {
      const WishartLaw law = random_law(c, rng);
      const Vector eta = -0.5 * random_dual(c, rng);
      const RieszDescriptor& d = *law.riesz();
      const double ratio = riesz_laplace(d, law.theta() + eta) / riesz_laplace(d, law.theta());
      CHECK(rel_diff(wishart_laplace(law, eta), ratio) < 1e-12);
    }
  }

  const ConePtr h = herm2c_cone();
  const WishartLaw hv = WishartLaw::make(basic_virtual_map(h, vec({2, -2})), -random_dual(h, rng));
  const Vector eta = -0.4 * random_dual(h, rng);
  const RieszDescriptor dh = riesz_exists(hv.map());
  CHECK(rel_diff(wishart_laplace(hv, eta),
                 riesz_laplace(dh, hv.theta() + eta) / riesz_laplace(dh, hv.theta())) < 1e-12);
}

TEST_CASE("means") {
  std::mt19937_64 rng(52);
  CHECK(mean_form(scalar_law(), vec({1})) == doctest::Approx(0.5));
  CHECK(mean_element(scalar_law())(0) == doctest::Approx(0.5));

  for (int r : {2, 3}) {
    const ConePtr c = sym_cone(r);
    const Vector eta0 = random_dual(c, rng);
    for (int s : {1, 4}) {
      const WishartLaw law = WishartLaw::make(qrs_map(r, s), -eta0);
      const Matrix expect = 0.5 * s * c->to_matrix(eta0).inverse();
      CHECK(max_rel(c->to_matrix(mean_element(law)), expect) < 1e-12);
      CHECK(mean_form(law, Vector::Zero(c->dim())) == 0.0);
    }
  }
}

TEST_CASE("covariances") {
  std::mt19937_64 rng(53);
  CHECK(covariance_form(scalar_law(), vec({1}), vec({1})) == doctest::Approx(0.5));
  for (const char* name : {"sym(3)", "vinberg", "herm2c"}) {
    const ConePtr c = preset(name);
    const WishartLaw law = random_law(c, rng);
    const Vector eta = random_dual(c, rng);
    CHECK(covariance_form(law, eta, Vector::Zero(c->dim())) == 0.0);
    const Matrix cov = covariance_matrix(law);
    CHECK(max_rel(cov, Matrix(cov.transpose())) == 0.0);
    const Vector w = c->coupling_weights();
    for (int a = 0; a < c->dim(); ++a)
      for (int b = 0; b < c->dim(); ++b) {
        const Vector ea = Vector::Unit(c->dim(), a) / w(a);
        const Vector eb = Vector::Unit(c->dim(), b) / w(b);
        CHECK(std::abs(cov(a, b) - covariance_form(law, ea, eb)) <
              1e-12 * std::max(1.0, max_abs(cov)));
      }
  }
}

TEST_CASE("permutation moments") {
  std::mt19937_64 rng(54);
  const WishartLaw sl = scalar_law();
  CHECK(moment(sl, {vec({1})}) == doctest::Approx(0.5));
  CHECK(moment(sl, {vec({1}), vec({1})}) == doctest::Approx(0.75));
  // E(X²/2)^3 = 15/8.
  CHECK(moment(sl, std::vector<Vector>(3, vec({1}))) == doctest::Approx(15.0 / 8.0));

  for (const char* name : {"sym(3)", "vinberg", "lorentz(2)"}) {
    const ConePtr c = preset(name);
    const WishartLaw law = random_law(c, rng);
    const Vector e1 = random_dual(c, rng), e2 = random_dual(c, rng);
    CHECK(rel_diff(moment(law, {e1}), mean_form(law, e1)) < 1e-13);
    CHECK(rel_diff(moment(law, {e1, e2}),
                   mean_form(law, e1) * mean_form(law, e2) + covariance_form(law, e1, e2)) <
          1e-12);
  }

  const ConePtr s3 = sym_cone(3);
  const WishartLaw law = random_law(s3, rng);
  const Vector e = random_dual(s3, rng);
  CHECK(rel_diff(moment(law, std::vector<Vector>(10, e)), univariate_moment(law, e, 10)) < 1e-9);
  std::vector<Vector> mixed(9, e);
  mixed.back() = random_dual(s3, rng);
  CHECK(error_code_of([&] { moment(law, mixed); }) == ErrorCode::OrderTooLarge);
}

TEST_CASE("integer-weight virtual maps reduce to direct sums") {
  std::mt19937_64 rng(55);
  for (const char* name : {"sym(3)", "vinberg", "dual_vinberg", "lorentz(2)", "herm2c"}) {
    const ConePtr c = preset(name);
    for (int it = 0; it < 5; ++it) {
      Vector s(c->rank());
      std::vector<QuadraticMap> copies;
      for (int i = 0; i < c->rank(); ++i) {
        s(i) = 1 + (it + i) % 3;
        for (int k = 0; k < s(i); ++k) copies.push_back(basic_map(c, i));
      }
      const Vector theta = -random_dual(c, rng);
      const WishartLaw lv = basic_law(c, s, theta);
      const WishartLaw lt = WishartLaw::make(direct_sum(copies), theta);
      for (int n = 1; n <= 5; ++n) {
        std::vector<Vector> etas;
        for (int j = 0; j < n; ++j) etas.push_back(random_dual(c, rng));
        CHECK(rel_diff(moment(lv, etas), moment(lt, etas)) < 1e-10);
      }
      const Vector eta = -0.3 * random_dual(c, rng);
      CHECK(rel_diff(wishart_laplace(lv, eta), wishart_laplace(lt, eta)) < 1e-10);
    }
  }
}

TEST_CASE("univariate moments") {
  std::mt19937_64 rng(56);
  const WishartLaw sl = scalar_law();
  CHECK(univariate_moment(sl, vec({1}), 1) == doctest::Approx(0.5));
  CHECK(univariate_moment(sl, vec({1}), 2) == doctest::Approx(0.75));
  for (const char* name : {"sym(2)", "sym(3)", "vinberg", "dual_vinberg", "lorentz(3)", "herm2c"}) {
    const ConePtr c = preset(name);
    for (int it = 0; it < 5; ++it) {
      const WishartLaw law = random_law(c, rng);
      const Vector eta = random_dual(c, rng);
      CHECK(rel_diff(univariate_moment(law, eta, 1), mean_form(law, eta)) < 1e-13);
      for (int n = 2; n <= 6; ++n)
        CHECK(rel_diff(univariate_moment(law, eta, n),
                       moment(law, std::vector<Vector>(n, eta))) < 1e-9);
    }
  }
}

TEST_CASE("densities") {
  std::mt19937_64 rng(57);
  for (double sigma : {0.6, 1.0, 3.2})
    for (double eta : {0.4, 2.0}) {
      const WishartLaw law = scalar_law(2 * sigma, -eta);
      for (double y : {0.1, 1.0, 5.0}) {
        const double pdf =
            std::exp(-y * eta) * std::pow(eta, sigma) * std::pow(y, sigma - 1) / std::tgamma(sigma);
        CHECK(rel_diff(density(law, vec({y})), pdf) < 1e-12);
      }
      if (sigma < 1.0) continue;
      double mass = 0.0;
      const int n = 200000;
      const double top = 80.0 / eta, h = top / n;
      for (int i = 0; i < n; ++i) mass += density(law, vec({(i + 0.5) * h})) * h;
      CHECK(std::abs(mass - 1.0) < 1e-6);
    }

  const ConePtr v = vinberg_cone();
  for (double s : {3.5, 5.0}) {
    for (int it = 0; it < 100; ++it) {
      const Vector eta = random_dual(v, rng);
      const WishartLaw law = basic_law(v, vec({s, 0, 0}), -eta);
      const Vector y = random_point(v, rng);
      const double y11 = y(0), y22 = y(1), y33 = y(2), y21 = y(3), y31 = y(4);
      const double pair = eta.dot(Vector(v->coupling_weights().cwiseProduct(y)));
      const double det1 =
          eta(0) * eta(1) * eta(2) - eta(2) * eta(3) * eta(3) - eta(1) * eta(4) * eta(4);
      const double want = std::exp(-pair) * std::pow(det1, s / 2) /
                          (std::numbers::pi * std::tgamma(s / 2) *
                           std::pow(std::tgamma((s - 1) / 2), 2)) *
                          std::pow(y11, 1 - s / 2) * std::pow(y11 * y22 - y21 * y21, (s - 3) / 2) *
                          std::pow(y11 * y33 - y31 * y31, (s - 3) / 2);
      CHECK(rel_diff(density(law, y), want) < 1e-10);
      CHECK(rel_diff(log_density(law, y), std::log(want)) < 1e-10);
    }
  }

  const WishartLaw law = basic_law(v, vec({4, 0, 0}), -v->identity_coords());
  CHECK(error_code_of([&] { density(law, vec({1, 1, 1, 1, 0})); }) == ErrorCode::NotInCone);
  const WishartLaw singular = basic_law(sym_cone(3), vec({1, 0, 0}), -sym_cone(3)->identity_coords());
  CHECK(error_code_of([&] { density(singular, sym_cone(3)->identity_coords()); }) ==
        ErrorCode::SingularLaw);
}

TEST_CASE("pushforward laws") {
  std::mt19937_64 rng(58);
  const ConePtr v = vinberg_cone();
  const WishartLaw law = random_law(v, rng);
  const WishartLaw same = pushforward_law(Matrix::Identity(5, 5), law);
  CHECK(max_rel(same.theta(), law.theta()) < 1e-15);
  const Vector eta = -0.3 * random_dual(v, rng);
  CHECK(rel_diff(wishart_laplace(same, eta), wishart_laplace(law, eta)) < 1e-13);

  // L_{gY}(η) = L_Y(g*η).
  const Matrix g = congruence_matrix(*v, random_triangular(v, rng).matrix());
  const WishartLaw moved = pushforward_law(g, law);
  const Vector w = v->coupling_weights();
  const Vector g_star_eta = dual_action(g, w, eta);
  CHECK(rel_diff(wishart_laplace(moved, eta), wishart_laplace(law, g_star_eta)) < 1e-12);
  CHECK(max_rel(mean_element(moved), Vector(g * mean_element(law))) < 1e-12);
}
