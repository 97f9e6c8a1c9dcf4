#include "support.hpp"

using namespace cwtest;

namespace {

// Coordinate matrix of y ↦ ρ(T)y, built column by column.
Matrix rho_matrix(const TriangularElement& t) {
  const int n = t.cone->dim();
  Matrix r(n, n);
  for (int j = 0; j < n; ++j)
    r.col(j) = rho_action(t, ConeElement{t.cone, Vector::Unit(n, j)}).coords;
  return r;
}

}  // namespace

TEST_CASE("realization: sym and vinberg dimensions") {
  VSystem sym;
  sym.partition = {1, 1, 1};
  for (int l = 1; l < 3; ++l)
    for (int k = 0; k < l; ++k) sym.set_block(l, k, {Matrix::Ones(1, 1)});
  const ConePtr c = ConeRealization::build(sym);
  CHECK(c->rank() == 3);
  CHECK(c->dim() == 6);
  CHECK(c->same_as(*sym_cone(3)));

  const ConePtr v = vinberg_cone();
  CHECK(v->dim() == 5);
  CHECK(v->ambient_size() == 4);
  CHECK(v->block_dim(2, 1) == 0);
}

TEST_CASE("realization: broken closure rule is rejected") {
  VSystem vs;
  vs.partition = {1, 2};
  Matrix a(2, 1);
  a << std::sqrt(2.0), 0.0;
  vs.set_block(1, 0, {a});
  bool v3_failed = false;
  for (const auto& c : check_axioms(vs))
    if (c.rule == "V3") v3_failed = !c.passed;
  CHECK(v3_failed);
  CHECK_THROWS_AS(ConeRealization::build(vs), AxiomViolation);
}

TEST_CASE("presets") {
  const ConePtr l2 = preset("lorentz(2)");
  CHECK(l2->rank() == 2);
  CHECK(l2->block_size(0) == 2);
  CHECK(l2->block_size(1) == 1);
  CHECK(l2->dim() == 4);

  const ConePtr dv = preset("dual_vinberg");
  CHECK(dv->rank() == 3);
  CHECK(dv->block_dim(1, 0) == 0);
  CHECK(dv->block_dim(2, 0) == 1);
  CHECK(dv->block_dim(2, 1) == 1);

  const ConePtr half = preset("sym(1)");
  CHECK(half->ambient_size() == 1);
  CHECK(half->dim() == 1);

  CHECK(preset("SYM(3)")->same_as(*sym_cone(3)));
  CHECK(preset("lorentz:2")->same_as(*lorentz_cone(2)));
  CHECK(error_code_of([] { preset("nonsense"); }) == ErrorCode::UnknownPreset);

  for (const char* name : {"sym(1)", "sym(4)", "vinberg", "dual_vinberg", "lorentz(1)",
                           "lorentz(3)", "herm2c"})
    for (const auto& c : check_axioms(preset(name)->vsystem())) CHECK(c.passed);
}

TEST_CASE("rho_action") {
  std::mt19937_64 rng(11);
  const ConePtr s2 = sym_cone(2);
  const Vector y = vec({1.0, 3.0, 2.0});
  CHECK(max_rel(rho_action(TriangularElement::identity(s2), ConeElement{s2, y}).coords, y) == 0.0);

  const TriangularElement t{s2, vec({2.0, 1.0}), vec({1.0})};
  const Matrix expect = (Matrix(2, 2) << 4, 2, 2, 2).finished();
  CHECK(max_rel(rho_action(t, identity_element(s2)).matrix(), expect) < 1e-15);

  const ConePtr v = vinberg_cone();
  for (int it = 0; it < 50; ++it) {
    const TriangularElement tv = random_triangular(v, rng);
    const ConeElement out = rho_action(tv, identity_element(v));
    const Matrix dense = tv.matrix() * tv.matrix().transpose();
    CHECK(max_rel(out.matrix(), dense) < 1e-13);
    for (int k = 0; k < 3; ++k) CHECK(out.coords(k) > 0.0);
  }
}

TEST_CASE("rho_star_action") {
  std::mt19937_64 rng(12);
  const ConePtr s2 = sym_cone(2);
  const ConeElement eye = identity_element(s2);
  CHECK(max_rel(rho_star_action(TriangularElement::identity(s2), eye).coords, eye.coords) == 0.0);

  const TriangularElement t{s2, vec({2.0, 1.0}), vec({1.0})};
  const Vector direct = rho_star_action(t, eye).coords;
  CHECK(max_rel(direct, vec({5.0, 1.0, 1.0})) < 1e-15);
  const Vector w = s2->coupling_weights();
  const Matrix adj = w.cwiseInverse().asDiagonal() * rho_matrix(t).transpose() * w.asDiagonal();
  CHECK(max_rel(direct, adj * eye.coords) < 1e-14);

  for (const char* name : {"sym(3)", "vinberg", "lorentz(2)", "dual_vinberg"}) {
    const ConePtr c = preset(name);
    for (int it = 0; it < 100; ++it) {
      const TriangularElement g = random_triangular(c, rng);
      const ConeElement y{c, random_point(c, rng)};
      const ConeElement eta{c, random_dual(c, rng)};
      const double lhs = coupling(rho_action(g, y), eta);
      const double rhs = coupling(y, rho_star_action(g, eta));
      CHECK(rel_diff(lhs, rhs) < 1e-12);
    }
  }
}

TEST_CASE("coupling") {
  for (const char* name : {"sym(3)", "vinberg", "lorentz(2)"}) {
    const ConePtr c = preset(name);
    CHECK(coupling(identity_element(c), identity_element(c)) == doctest::Approx(c->rank()));
  }
  const ConePtr s2 = sym_cone(2);
  CHECK(coupling(ConeElement{s2, vec({1, 3, 2})}, identity_element(s2)) == doctest::Approx(4.0));

  const ConePtr l2 = lorentz_cone(2);
  const Vector y = vec({1.5, 0.7, 0.2, -0.4});
  const ConeElement ye{l2, y};
  const double paired = coupling(ye, ye);
  const Matrix ym = ye.matrix();
  const double dense = (ym * ym).trace();
  CHECK(std::abs(paired - dense) > 1.0);
  CHECK(dense - paired == doctest::Approx(y(0) * y(0)));
  CHECK(paired == doctest::Approx((ym * l2->functional_matrix(y)).trace()));
}

TEST_CASE("structured_cholesky") {
  const ConePtr v = vinberg_cone();
  const TriangularElement id = structured_cholesky(identity_element(v));
  CHECK(max_rel(id.diag, Vector::Ones(3)) < 1e-15);
  CHECK(id.off.cwiseAbs().maxCoeff() < 1e-15);

  // Coordinate order y11, y22, y33, y21, y31.
  const ConeElement y{v, vec({4, 2, 1, 2, 0})};
  const TriangularElement t = structured_cholesky(y);
  CHECK(max_rel(t.diag, vec({2, 1, 1})) < 1e-14);
  CHECK(max_rel(t.off, vec({1, 0})) < 1e-14);
  CHECK(max_rel(Matrix(t.matrix() * t.matrix().transpose()), y.matrix()) < 1e-14);

  const ConeElement bad{sym_cone(2), vec({1, 1, 2})};
  CHECK(error_code_of([&] { structured_cholesky(bad); }) == ErrorCode::NotInCone);
}

TEST_CASE("dual_orbit_point and dual_membership") {
  std::mt19937_64 rng(13);
  const ConePtr v = vinberg_cone();
  CHECK(max_rel(dual_orbit_point(TriangularElement::identity(v)).coords, v->identity_coords()) ==
        0.0);
  const TriangularElement diag{v, vec({1.3, 0.6, 2.1}), Vector::Zero(2)};
  CHECK(max_rel(dual_orbit_point(diag).coords,
                rho_star_action(diag, identity_element(v)).coords) < 1e-15);

  CHECK(dual_membership(identity_element(v)));
  // η11, η22, η33, η21, η31
  CHECK(dual_membership(ConeElement{v, vec({1, 1, 1, 0.5, 0})}));
  CHECK_FALSE(dual_membership(ConeElement{v, vec({1, -1, 1, 0.5, 0})}));

  for (const char* name : {"sym(4)", "vinberg", "dual_vinberg", "lorentz(3)", "herm2c"}) {
    const ConePtr c = preset(name);
    for (int it = 0; it < 1000; ++it)
      REQUIRE(dual_membership(dual_orbit_point(random_triangular(c, rng, 0.8, 1.0))));
  }
}

TEST_CASE("vinberg dual inequalities match the polynomial signs") {
  std::mt19937_64 rng(14);
  std::uniform_real_distribution<double> u(-1.0, 2.0);
  const ConePtr v = vinberg_cone();
  int inside = 0;
  for (int it = 0; it < 2000; ++it) {
    const Vector e = vec({u(rng), u(rng), u(rng), u(rng), u(rng)});
    const double poly = e(0) * e(1) * e(2) - e(2) * e(3) * e(3) - e(1) * e(4) * e(4);
    const bool expect = poly > 0 && e(1) > 0 && e(2) > 0;
    inside += expect;
    CHECK(dual_membership(ConeElement{v, e}) == expect);
  }
  CHECK(inside > 100);
}

TEST_CASE("triangular_from_dual inverts dual_orbit_point") {
  std::mt19937_64 rng(15);
  for (const char* name : {"sym(3)", "vinberg", "dual_vinberg", "lorentz(2)"}) {
    const ConePtr c = preset(name);
    for (int it = 0; it < 200; ++it) {
      const TriangularElement t = random_triangular(c, rng, 0.7, 1.0);
      const TriangularElement back = triangular_from_dual(dual_orbit_point(t));
      CHECK(max_rel(back.diag, t.diag) < 1e-10);
      CHECK(max_rel(back.off, t.off) < 1e-10);
    }
  }
  const ConePtr s2 = sym_cone(2);
  CHECK(error_code_of([&] { triangular_from_dual(ConeElement{s2, vec({1, -1, 0})}); }) ==
        ErrorCode::NotInDualCone);
}

TEST_CASE("chi") {
  std::mt19937_64 rng(16);
  const ConePtr s2 = sym_cone(2);
  const TriangularElement t{s2, vec({2, 3}), vec({0.4})};
  CHECK(chi(Vector::Zero(2), t) == 1.0);
  CHECK(chi(vec({1.7, -0.3}), TriangularElement::identity(s2)) == 1.0);
  CHECK(chi(vec({1.0, 0.5}), t) == doctest::Approx(12.0));

  const ConePtr v = vinberg_cone();
  for (int it = 0; it < 200; ++it) {
    const TriangularElement a = random_triangular(v, rng), b = random_triangular(v, rng);
    const Vector sigma = vec({0.3, -1.2, 2.5});
    CHECK(rel_diff(chi(sigma, multiply(a, b)), chi(sigma, a) * chi(sigma, b)) < 1e-12);
    const TriangularElement ab = multiply(a, b);
    for (int i = 0; i < 3; ++i) {
      const auto det_at = [&](const TriangularElement& g) {
        return v->basic_phi(i, dual_orbit_point(g).coords).determinant();
      };
      CHECK(rel_diff(det_at(ab), det_at(a) * det_at(b)) < 1e-10);
    }
  }
}

TEST_CASE("delta") {
  std::mt19937_64 rng(17);
  const ConePtr v = vinberg_cone();
  CHECK(delta(vec({0.4, 1.1, -0.2}), identity_element(v)) == doctest::Approx(1.0));
  const ConeElement y{v, vec({4, 2, 1, 2, 0})};
  CHECK(delta(vec({1, 1, 1}), y) == doctest::Approx(4.0));

  for (int it = 0; it < 200; ++it) {
    const ConeElement p{v, random_point(v, rng)};
    const Vector s = vec({0.7, 1.3, -0.4});
    const double y11 = p.coords(0), y22 = p.coords(1), y33 = p.coords(2), y21 = p.coords(3),
                 y31 = p.coords(4);
    const double closed = std::pow(y11, s(0) - s(1) - s(2)) *
                          std::pow(y11 * y22 - y21 * y21, s(1)) *
                          std::pow(y11 * y33 - y31 * y31, s(2));
    CHECK(rel_diff(delta(s, p), closed) < 1e-10);
  }
}

TEST_CASE("invariant measure: |det rho(T)| = chi(d, T)") {
  std::mt19937_64 rng(18);
  for (const char* name : {"sym(3)", "vinberg", "dual_vinberg", "lorentz(3)", "herm2c"}) {
    const ConePtr c = preset(name);
    for (int it = 0; it < 50; ++it) {
      const TriangularElement t = random_triangular(c, rng, 0.6, 0.9);
      const double jac = std::abs(rho_matrix(t).determinant());
      CHECK(rel_diff(jac, chi(c->d_vector(), t)) < 1e-10);
      const ConeElement y{c, random_point(c, rng)};
      const Vector d = c->d_vector();
      CHECK(rel_diff(delta(-d, rho_action(t, y)) * jac, delta(-d, y)) < 1e-10);
    }
  }
}

TEST_CASE("delta_star") {
  std::mt19937_64 rng(19);
  const ConePtr v = vinberg_cone();
  CHECK(delta_star(vec({2.0, -1.0, 0.5}), identity_element(v)) == doctest::Approx(1.0));
  for (int it = 0; it < 100; ++it) {
    const Vector eta = random_dual(v, rng);
    CHECK(rel_diff(delta_star(vec({1, 0, 0}), ConeElement{v, eta}), eta(2)) < 1e-12);
  }
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  for (const char* name : {"sym(4)", "vinberg", "dual_vinberg", "lorentz(2)"}) {
    const ConePtr c = preset(name);
    for (int it = 0; it < 1000; ++it) {
      Vector sigma(c->rank());
      for (int k = 0; k < c->rank(); ++k) sigma(k) = u(rng);
      const TriangularElement t = random_triangular(c, rng);
      REQUIRE(rel_diff(delta_star(sigma, dual_orbit_point(t)), chi(reversed(sigma), t)) < 1e-10);
    }
  }
}

TEST_CASE("exponent_solve is an exact unitriangular solve") {
  std::mt19937_64 rng(20);
  std::normal_distribution<double> g;
  for (const char* name : {"sym(5)", "vinberg", "herm2c", "dual_vinberg"}) {
    const ConePtr c = preset(name);
    const Matrix& m = c->exponent_matrix();
    CHECK(max_rel(Matrix(m.diagonal()), Matrix(Vector::Ones(c->rank()))) == 0.0);
    for (int it = 0; it < 20; ++it) {
      Vector target(c->rank());
      for (int k = 0; k < c->rank(); ++k) target(k) = g(rng);
      CHECK(max_rel(Vector(m.transpose() * exponent_solve(*c, target)), target) < 1e-13);
    }
  }
}

TEST_CASE("cholesky round trip") {
  std::mt19937_64 rng(21);
  for (const char* name : {"sym(4)", "vinberg", "dual_vinberg", "lorentz(3)", "herm2c"}) {
    const ConePtr c = preset(name);
    for (int it = 0; it < 300; ++it) {
      const ConeElement y{c, random_point(c, rng, 0.8, 1.0)};
      CHECK(cone_membership(y));
      const ConeElement back = rho_action(structured_cholesky(y), identity_element(c));
      CHECK(max_rel(back.coords, y.coords) < 1e-10);
    }
  }
}

TEST_CASE("basic-map determinant law") {
  std::mt19937_64 rng(22);
  for (const char* name : {"sym(3)", "vinberg", "dual_vinberg", "lorentz(2)", "herm2c"}) {
    const ConePtr c = preset(name);
    for (int i = 0; i < c->rank(); ++i)
      CHECK(max_rel(c->basic_phi(i, c->identity_coords()),
                    Matrix(Matrix::Identity(c->basic_dim(i), c->basic_dim(i)))) < 1e-15);
    for (int it = 0; it < 1000; ++it) {
      const TriangularElement t = random_triangular(c, rng);
      const Vector eta = dual_orbit_point(t).coords;
      for (int i = 0; i < c->rank(); ++i)
        REQUIRE(rel_diff(c->basic_phi(i, eta).determinant(), chi(c->m_vector(i), t)) < 1e-10);
    }
  }
}
