#include "conewishart/verification.hpp"

#include "conewishart/errors.hpp"
#include "conewishart/sampling.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <random>
#include <sstream>

namespace conewishart {
namespace {

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

double cov_of(const BatteryOptions& o, const WishartLaw& law, const Vector& a, const Vector& b) {
  return o.covariance ? o.covariance(law, a, b) : covariance_form(law, a, b);
}

// Closed-form covariance of the coordinates through the chosen form.
Matrix coord_covariance(const BatteryOptions& o, const WishartLaw& law) {
  const int n = law.dim();
  const Vector& w = law.codomain().weights();
  Matrix c(n, n);
  for (int j = 0; j < n; ++j)
    for (int k = 0; k < n; ++k)
      c(j, k) = cov_of(o, law, Vector::Unit(n, j), Vector::Unit(n, k)) / (w(j) * w(k));
  return c;
}

struct Moments {
  Vector mean;
  Vector mean_se;
  Matrix cov;
  Matrix cov_se;
};

Moments sample_moments(const Matrix& x) {
  const double n = static_cast<double>(x.rows());
  Moments m;
  m.mean = x.colwise().mean().transpose();
  const Matrix c = x.rowwise() - m.mean.transpose();
  m.cov = (c.transpose() * c) / (n - 1.0);
  m.mean_se = (m.cov.diagonal() / n).cwiseSqrt();
  const int d = static_cast<int>(x.cols());
  m.cov_se.resize(d, d);
  for (int j = 0; j < d; ++j)
    for (int k = 0; k < d; ++k) {
      const Vector p = c.col(j).cwiseProduct(c.col(k));
      const double pm = p.mean();
      m.cov_se(j, k) = std::sqrt((p.array() - pm).square().sum() / (n - 1.0) / n);
    }
  return m;
}

std::vector<ConePtr> law_presets() {
  return {sym_cone(2), sym_cone(3), vinberg_cone(), dual_vinberg_cone(),
          lorentz_cone(2), lorentz_cone(3), herm2c_cone()};
}

Vector random_weights(const ConePtr& cone, std::mt19937_64& rng, double lo, double hi) {
  std::uniform_real_distribution<double> u(lo, hi);
  Vector s(cone->rank());
  for (auto& v : s) v = u(rng);
  return s;
}

Vector random_theta(const ConePtr& cone, std::mt19937_64& rng) {
  return theta_from_triangular(random_triangular(cone, rng, 0.4, 0.5));
}

Vector random_dual(const ConePtr& cone, std::mt19937_64& rng) {
  return dual_orbit_point(random_triangular(cone, rng, 0.4, 0.5)).coords;
}

// --------------------------------------------------------------------------

CheckResult gindikin_pattern(const BatteryOptions&) {
  CheckResult res{1, "Gindikin criterion on Sym(r), r = 2..5", false, {}, 0.0};
  int mismatches = 0, cases = 0;
  std::string first;
  for (int r = 2; r <= 5; ++r) {
    const ConePtr cone = sym_cone(r);
    for (int step = 0; step <= 24; ++step) {
      const double s = 0.25 * step;
      Vector w = Vector::Zero(r);
      w(0) = s;
      bool accepted = true;
      try {
        riesz_exists(cone, w);
      } catch (const NotInXi&) {
        accepted = false;
      }
      const bool integral = step % 4 == 0;
      const bool expected = (integral && s <= r - 1) || s > r - 1;
      ++cases;
      if (accepted != expected) {
        if (!mismatches) first = "r=" + std::to_string(r) + " s=" + fmt("%g", s);
        ++mismatches;
      }
    }
  }
  res.passed = mismatches == 0;
  res.detail = std::to_string(cases) + " cases, " + std::to_string(mismatches) + " mismatches" +
               (mismatches ? " (first " + first + ")" : "");
  return res;
}

CheckResult herm2c_laplace(const BatteryOptions& o) {
  CheckResult res{2, "Riesz Laplace identity on herm2c, weights (2,-2)", false, {}, 0.0};
  std::mt19937_64 rng(o.seed + 2);
  const ConePtr cone = herm2c_cone();
  const RieszDescriptor desc = riesz_exists(cone, (Vector(2) << 2, -2).finished());
  const QuadraticMap q = herm2c_map();
  double worst_poly = 0.0, worst_phi = 0.0;
  for (int it = 0; it < 1000; ++it) {
    const Vector eta = random_dual(cone, rng);
    const double got = riesz_laplace(desc, -eta);
    const double poly = eta(0) * eta(1) - eta(2) * eta(2) - eta(3) * eta(3);
    const double want = std::numbers::pi * std::numbers::pi / poly;
    const double via_phi =
        std::numbers::pi * std::numbers::pi / std::sqrt(q.phi(eta).determinant());
    worst_poly = std::max(worst_poly, rel_diff(got, want));
    worst_phi = std::max(worst_phi, rel_diff(got, via_phi));
  }
  res.passed = worst_poly < 1e-10 && worst_phi < 1e-10;
  res.detail = "max rel err " + fmt("%.2e", worst_poly) + " vs polynomial, " +
               fmt("%.2e", worst_phi) + " vs det phi_q (tol 1e-10, 1000 points)";
  return res;
}

CheckResult moment_formulas(const BatteryOptions& o) {
  CheckResult res{3, "Moment formula cross-checks", false, {}, 0.0};
  std::mt19937_64 rng(o.seed + 3);
  const auto cones = law_presets();

  double worst_a = 0.0;
  for (int it = 0; it < 100; ++it) {
    const ConePtr cone = cones[it % cones.size()];
    const WishartLaw law = basic_law(cone, random_weights(cone, rng, 1.0, 4.0), random_theta(cone, rng));
    const Vector eta = random_dual(cone, rng);
    for (int n = 1; n <= 6; ++n)
      worst_a = std::max(worst_a, rel_diff(moment(law, std::vector<Vector>(n, eta)),
                                           univariate_moment(law, eta, n)));
  }

  double worst_b = 0.0;
  std::uniform_int_distribution<int> small(1, 3);
  for (int it = 0; it < 21; ++it) {
    const ConePtr cone = cones[it % cones.size()];
    Vector w(cone->rank());
    std::vector<QuadraticMap> copies;
    for (int i = 0; i < cone->rank(); ++i) {
      w(i) = small(rng);
      for (int c = 0; c < w(i); ++c) copies.push_back(basic_map(cone, i));
    }
    const Vector theta = random_theta(cone, rng);
    const WishartLaw virt = basic_law(cone, w, theta);
    const WishartLaw conc = WishartLaw::make(direct_sum(copies), theta);
    std::vector<Vector> etas;
    for (int j = 0; j < 4; ++j) etas.push_back(random_dual(cone, rng));
    auto track = [&](double a, double b) { worst_b = std::max(worst_b, rel_diff(a, b)); };
    for (const auto& e : etas) {
      track(wishart_laplace(virt, -0.5 * e), wishart_laplace(conc, -0.5 * e));
      track(mean_form(virt, e), mean_form(conc, e));
      track(univariate_moment(virt, e, 5), univariate_moment(conc, e, 5));
    }
    track(covariance_form(virt, etas[0], etas[1]), covariance_form(conc, etas[0], etas[1]));
    track(moment(virt, etas), moment(conc, etas));
  }

  double worst_c = 0.0;
  const double h = 1e-4;
  std::normal_distribution<double> normal(0.0, 0.5);
  for (int it = 0; it < 21; ++it) {
    const ConePtr cone = cones[it % cones.size()];
    const Vector w = cone->name() == "herm2c" ? (Vector(2) << 2, -2).finished()
                                              : random_weights(cone, rng, 1.0, 4.0);
    const WishartLaw law = basic_law(cone, w, random_theta(cone, rng));
    Vector a(cone->dim()), b(cone->dim());
    for (auto& v : a) v = normal(rng);
    for (auto& v : b) v = normal(rng);
    auto ll = [&](const Vector& e) { return log_wishart_laplace(law, e); };
    const double fd_mean = (ll(h * a) - ll(-h * a)) / (2 * h);
    const double fd_cov =
        (ll(h * a + h * b) - ll(h * a - h * b) - ll(-h * a + h * b) + ll(-h * a - h * b)) /
        (4 * h * h);
    const double m = mean_form(law, a);
    const double c = cov_of(o, law, a, b);
    worst_c = std::max(worst_c, std::abs(fd_mean - m) / std::max(1.0, std::abs(m)));
    worst_c = std::max(worst_c, std::abs(fd_cov - c) / std::max(1.0, std::abs(c)));
  }

  const bool pa = worst_a < 1e-9, pb = worst_b < 1e-10, pc = worst_c < 1e-6;
  res.passed = pa && pb && pc;
  res.detail = std::string("(a) ") + (pa ? "ok " : "FAIL ") + fmt("%.2e", worst_a) +
               " (tol 1e-9); (b) " + (pb ? "ok " : "FAIL ") + fmt("%.2e", worst_b) +
               " (tol 1e-10); (c) " + (pc ? "ok " : "FAIL ") + fmt("%.2e", worst_c) +
               " (tol 1e-6)";
  return res;
}

CheckResult monte_carlo(const BatteryOptions& o) {
  CheckResult res{4, "Monte Carlo validation on Sym(3), s = 5, theta = -I", false, {}, 0.0};
  const ConePtr cone = sym_cone(3);
  const WishartLaw law = basic_law(cone, (Vector(3) << 5, 0, 0).finished(), -cone->identity_coords());
  const long n = 100000;
  const SampleBatch batch = bartlett_sample(law, o.seed + 4, n);
  const Moments sm = sample_moments(batch.draws);
  const Vector mu = mean_element(law);
  const Matrix cov = coord_covariance(o, law);

  Vector want_mu = Vector::Zero(6);
  want_mu.head(3).setConstant(2.5);
  const bool mu_formula = (mu - want_mu).norm() < 1e-12;

  double z_mean = 0.0;
  for (int j = 0; j < 6; ++j)
    z_mean = std::max(z_mean, std::abs(sm.mean(j) - want_mu(j)) / std::sqrt(cov(j, j) / n));
  double z_cov = 0.0;
  for (int j = 0; j < 6; ++j)
    for (int k = j; k < 6; ++k)
      z_cov = std::max(z_cov, std::abs(sm.cov(j, k) - cov(j, k)) / sm.cov_se(j, k));

  const Vector etas[5] = {
      (Vector(6) << 0.2, 0.2, 0.2, 0, 0, 0).finished(),
      (Vector(6) << -0.3, -0.3, -0.3, 0, 0, 0).finished(),
      (Vector(6) << 0.1, 0.15, 0.05, 0.05, 0, -0.05).finished(),
      (Vector(6) << -0.2, 0.1, 0.2, 0.1, -0.1, 0).finished(),
      (Vector(6) << 0.15, 0, -0.1, 0, 0.05, 0).finished()};
  const Vector w = cone->coupling_weights();
  double z_mgf = 0.0;
  for (const auto& eta : etas) {
    const Vector e = (batch.draws * w.cwiseProduct(eta)).array().exp();
    const double em = e.mean();
    const double se = std::sqrt((e.array() - em).square().sum() / (n - 1.0) / n);
    z_mgf = std::max(z_mgf, std::abs(em - wishart_laplace(law, eta)) / se);
  }
  res.passed = mu_formula && z_mean <= 3.0 && z_cov <= 4.0 && z_mgf <= 3.0;
  res.detail = std::string(mu_formula ? "" : "mean_element != 5/2 I; ") + "max |z| mean " +
               fmt("%.2f", z_mean) + " (<= 3), covariance " + fmt("%.2f", z_cov) +
               " (<= 4), MGF " + fmt("%.2f", z_mgf) + " (<= 3); 1e5 draws";
  return res;
}

CheckResult two_samplers(const BatteryOptions& o) {
  CheckResult res{5, "Direct vs Bartlett sampler for q_{3,5}", false, {}, 0.0};
  const ConePtr cone = sym_cone(3);
  const WishartLaw law = WishartLaw::make(qrs_map(3, 5), -cone->identity_coords());
  const long n = 100000;
  const Moments a = sample_moments(direct_sample(law, o.seed + 5, n).draws);
  const Moments b = sample_moments(bartlett_sample(law, o.seed + 55, n).draws);
  double z_mean = 0.0, z_cov = 0.0;
  for (int j = 0; j < 6; ++j) {
    z_mean = std::max(z_mean, std::abs(a.mean(j) - b.mean(j)) /
                                  std::hypot(a.mean_se(j), b.mean_se(j)));
    for (int k = j; k < 6; ++k)
      z_cov = std::max(z_cov, std::abs(a.cov(j, k) - b.cov(j, k)) /
                                  std::hypot(a.cov_se(j, k), b.cov_se(j, k)));
  }
  res.passed = z_mean <= 4.0 && z_cov <= 4.0;
  res.detail = "max joint |z| mean " + fmt("%.2f", z_mean) + ", covariance " +
               fmt("%.2f", z_cov) + " (<= 4); 1e5 draws each";
  return res;
}

CheckResult singular_support(const BatteryOptions& o) {
  CheckResult res{6, "Singular support on Sym(4), epsilon = (0,1,0,1)", false, {}, 0.0};
  std::mt19937_64 rng(o.seed + 6);
  const ConePtr cone = sym_cone(4);
  const std::vector<int> eps{0, 1, 0, 1};
  Vector u = Vector::Zero(4);
  u(1) = u(3) = 0.5;
  const Vector sigma = u + cone->p_vector(eps) / 2.0;
  const Vector s = 2.0 * exponent_solve(*cone, sigma);
  const WishartLaw law = basic_law(cone, s, random_theta(cone, rng));
  const bool decomposed = law.riesz()->param.epsilon == eps;
  const long n = 10000;
  const SampleBatch batch = bartlett_sample(law, o.seed + 66, n);
  long psd = 0, rank2 = 0, below = 0, classified = 0;
  for (long i = 0; i < n; ++i) {
    const ConeElement y{cone, batch.draws.row(i).transpose()};
    const Matrix m = y.matrix();
    Eigen::SelfAdjointEigenSolver<Matrix> es(m, Eigen::EigenvaluesOnly);
    const Vector ev = es.eigenvalues();
    if (ev.minCoeff() >= -1e-8 * ev.cwiseAbs().maxCoeff()) ++psd;
    const int rk = numerical_rank(m, 1e-8);
    if (rk == 2) ++rank2;
    if (rk < 2) ++below;
    if (orbit_classify(y) == eps) ++classified;
  }
  res.passed = decomposed && psd == n && rank2 == n && classified >= 0.99 * n;
  res.detail = "weights (" + fmt("%g", s(0)) + "," + fmt("%g", s(1)) + "," + fmt("%g", s(2)) +
               "," + fmt("%g", s(3)) + "); PSD " + std::to_string(psd) + "/" +
               std::to_string(n) + ", rank 2 " + std::to_string(rank2) + "/" +
               std::to_string(n) + " (" + std::to_string(below) + " below, " +
               std::to_string(n - rank2 - below) + " above), orbit (0,1,0,1) " + std::to_string(classified) + "/" +
               std::to_string(n);
  return res;
}

CheckResult densities(const BatteryOptions& o) {
  CheckResult res{7, "Density correctness", false, {}, 0.0};
  std::mt19937_64 rng(o.seed + 7);

  double worst_a = 0.0;
  const ConePtr half_line = sym_cone(1);
  for (double sig : {0.7, 1.0, 2.5, 4.0})
    for (double eta : {0.5, 1.0, 3.0}) {
      const WishartLaw law = basic_law(half_line, Vector::Constant(1, 2 * sig), Vector::Constant(1, -eta));
      for (double y : {0.05, 0.3, 1.0, 2.2, 7.5}) {
        const double pdf = std::exp(-y * eta) * std::pow(eta, sig) * std::pow(y, sig - 1) /
                           std::tgamma(sig);
        worst_a = std::max(worst_a, rel_diff(density(law, Vector::Constant(1, y)), pdf));
      }
    }

  double worst_b = 0.0;
  const ConePtr vin = vinberg_cone();
  const double s = 4.0;
  for (int it = 0; it < 1000; ++it) {
    const Vector eta = random_dual(vin, rng);
    const WishartLaw law = basic_law(vin, (Vector(3) << s, 0, 0).finished(), -eta);
    const Vector y = rho_action(random_triangular(vin, rng, 0.5, 0.8), identity_element(vin)).coords;
    const double y11 = y(0), y22 = y(1), y33 = y(2), y21 = y(3), y31 = y(4);
    const double e11 = eta(0), e22 = eta(1), e33 = eta(2), e21 = eta(3), e31 = eta(4);
    const double pair = y11 * e11 + y22 * e22 + y33 * e33 + 2 * y21 * e21 + 2 * y31 * e31;
    const double det1 = e11 * e22 * e33 - e33 * e21 * e21 - e22 * e31 * e31;
    const double want = std::exp(-pair) * std::pow(det1, s / 2) /
                        (std::numbers::pi * std::tgamma(s / 2) * std::pow(std::tgamma((s - 1) / 2), 2)) *
                        std::pow(y11, 1 - s / 2) * std::pow(y11 * y22 - y21 * y21, (s - 3) / 2) *
                        std::pow(y11 * y33 - y31 * y31, (s - 3) / 2);
    worst_b = std::max(worst_b, rel_diff(density(law, y), want));
  }

  // Importance sampling: y11, y22 ~ Exp(lambda), y21 uniform on the
  // admissible interval.
  const ConePtr lor = lorentz_cone(1);
  const WishartLaw law = basic_law(lor, (Vector(2) << 4, 0).finished(), -lor->identity_coords());
  const double lambda = 0.5;
  const long n = 400000;
  std::exponential_distribution<double> ex(lambda);
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  double sum = 0.0, sum2 = 0.0;
  for (long i = 0; i < n; ++i) {
    const double a = ex(rng), b = ex(rng);
    const double half = std::sqrt(a * b);
    const double c = half * unif(rng);
    const double q = lambda * lambda * std::exp(-lambda * (a + b)) / (2 * half);
    double f = 0.0;
    if (a * b - c * c > 1e-300) {
      try {
        f = density(law, (Vector(3) << a, b, c).finished());
      } catch (const Error&) {
        f = 0.0;
      }
    }
    const double ratio = f / q;
    sum += ratio;
    sum2 += ratio * ratio;
  }
  const double mass = sum / n;
  const double se = std::sqrt((sum2 / n - mass * mass) / n);

  const bool pa = worst_a < 1e-12, pb = worst_b < 1e-10, pc = std::abs(mass - 1.0) <= 0.01;
  res.passed = pa && pb && pc;
  res.detail = std::string("(a) ") + (pa ? "ok " : "FAIL ") + fmt("%.2e", worst_a) +
               " (tol 1e-12); (b) " + (pb ? "ok " : "FAIL ") + fmt("%.2e", worst_b) +
               " (tol 1e-10); (c) " + (pc ? "ok " : "FAIL ") + "mass " + fmt("%.4f", mass) +
               " +- " + fmt("%.4f", se) + " (1 +- 0.01)";
  return res;
}

CheckResult equivariance(const BatteryOptions& o) {
  CheckResult res{8, "Equivariance under rho(T) on the Vinberg cone", false, {}, 0.0};
  std::mt19937_64 rng(o.seed + 8);
  const ConePtr cone = vinberg_cone();
  const WishartLaw law = basic_law(cone, (Vector(3) << 3, 1, 1).finished(), random_theta(cone, rng));
  const long n = 20000;
  const SampleBatch base = bartlett_sample(law, o.seed + 88, n);
  double z_max = 0.0;
  for (int it = 0; it < 20; ++it) {
    const TriangularElement t = random_triangular(cone, rng, 0.4, 0.6);
    const Matrix g = congruence_matrix(*cone, t.matrix());
    const WishartLaw pushed = pushforward_law(g, law);
    const Moments sm = sample_moments(transform_batch(g, base).draws);
    const Vector mu = mean_element(pushed);
    const Matrix cov = coord_covariance(o, pushed);
    for (int j = 0; j < cone->dim(); ++j) {
      z_max = std::max(z_max, std::abs(sm.mean(j) - mu(j)) / std::sqrt(cov(j, j) / n));
      z_max = std::max(z_max, std::abs(sm.cov(j, j) - cov(j, j)) / sm.cov_se(j, j));
    }
  }
  res.passed = z_max <= 4.0;
  res.detail = "max |z| over means and variances " + fmt("%.2f", z_max) +
               " (<= 4); 20 transforms, 2e4 draws";
  return res;
}

CheckResult structural(const BatteryOptions& o) {
  CheckResult res{9, "Structural oracles", false, {}, 0.0};
  std::mt19937_64 rng(o.seed + 9);
  std::vector<ConePtr> cones;
  for (int r = 1; r <= 5; ++r) cones.push_back(sym_cone(r));
  for (int m = 1; m <= 4; ++m) cones.push_back(lorentz_cone(m));
  cones.push_back(vinberg_cone());
  cones.push_back(dual_vinberg_cone());
  cones.push_back(herm2c_cone());

  int axiom_failures = 0;
  for (const auto& c : cones)
    for (const auto& chk : check_axioms(c->vsystem()))
      if (!chk.passed) ++axiom_failures;

  double worst_rt = 0.0, worst_ds = 0.0;
  std::uniform_real_distribution<double> sig(-2.0, 2.0);
  for (int it = 0; it < 1000; ++it) {
    const ConePtr c = cones[it % cones.size()];
    const ConeElement y = rho_action(random_triangular(c, rng, 0.6, 1.0), identity_element(c));
    const ConeElement back = rho_action(structured_cholesky(y), identity_element(c));
    worst_rt = std::max(worst_rt, (back.coords - y.coords).norm() / y.coords.norm());

    const TriangularElement t = random_triangular(c, rng, 0.6, 1.0);
    Vector sigma(c->rank());
    for (auto& v : sigma) v = sig(rng);
    worst_ds = std::max(worst_ds, rel_diff(delta_star(sigma, dual_orbit_point(t)),
                                           chi(reversed(sigma), t)));
  }
  res.passed = axiom_failures == 0 && worst_rt < 1e-10 && worst_ds < 1e-10;
  res.detail = std::to_string(axiom_failures) + " axiom failures over " +
               std::to_string(cones.size()) + " presets; Cholesky round trip " +
               fmt("%.2e", worst_rt) + ", delta_star " + fmt("%.2e", worst_ds) + " (tol 1e-10)";
  return res;
}

}  // namespace

CheckResult run_criterion(int id, const BatteryOptions& opts) {
  using Fn = CheckResult (*)(const BatteryOptions&);
  static const Fn table[kCriterionCount] = {gindikin_pattern, herm2c_laplace, moment_formulas,
                                            monte_carlo,      two_samplers,   singular_support,
                                            densities,        equivariance,   structural};
  static const char* const names[kCriterionCount] = {
      "Gindikin criterion on Sym(r)", "Riesz Laplace identity on herm2c",
      "Moment formula cross-checks", "Monte Carlo validation on Sym(3)",
      "Direct vs Bartlett sampler", "Singular support on Sym(4)", "Density correctness",
      "Equivariance under rho(T)", "Structural oracles"};
  if (id < 1 || id > kCriterionCount)
    throw Error(ErrorCode::IndexOutOfRange, "no criterion " + std::to_string(id));
  const auto start = std::chrono::steady_clock::now();
  CheckResult r;
  try {
    r = table[id - 1](opts);
  } catch (const std::exception& e) {
    r.id = id;
    r.name = names[id - 1];
    r.passed = false;
    r.detail = std::string("exception: ") + e.what();
  }
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return r;
}

std::vector<CheckResult> run_battery(const BatteryOptions& opts, const std::vector<int>& ids) {
  std::vector<CheckResult> out;
  if (ids.empty()) {
    for (int id = 1; id <= kCriterionCount; ++id) out.push_back(run_criterion(id, opts));
  } else {
    for (int id : ids) out.push_back(run_criterion(id, opts));
  }
  return out;
}

std::string format_result(const CheckResult& r) {
  std::ostringstream os;
  os << (r.passed ? "[PASS] " : "[FAIL] ") << r.id << ". " << r.name << ": " << r.detail
     << " (" << fmt("%.2f", r.seconds) << " s)";
  return os.str();
}

}  // namespace conewishart
