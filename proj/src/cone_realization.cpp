#include "conewishart/cone_realization.hpp"

#include "conewishart/errors.hpp"

#include <algorithm>
#include <cmath>

namespace conewishart {
namespace {

// Residual of projecting p onto span(basis) under (A|B) = tr(A Bᵀ)/rows,
// relative to |p|.
double projection_residual(const Matrix& p, const std::vector<Matrix>& basis) {
  const double norm = p.norm();
  if (norm == 0.0) return 0.0;
  Matrix rest = p;
  const double n_rows = static_cast<double>(p.rows());
  for (const auto& b : basis) {
    const double c = (b.cwiseProduct(p)).sum() / n_rows;
    rest -= c * b;
  }
  return rest.norm() / norm;
}

const std::vector<Matrix>& empty_basis() {
  static const std::vector<Matrix> none;
  return none;
}

const std::vector<Matrix>& lookup(const VSystem& vs, int l, int k) {
  auto it = vs.blocks.find({l, k});
  return it == vs.blocks.end() ? empty_basis() : it->second;
}

void record(AxiomCheck& check, double residual, double tol, int l, int k,
            int j) {
  if (residual > check.max_residual) {
    check.max_residual = residual;
    check.l = l + 1;
    check.k = k + 1;
    check.j = j < 0 ? 0 : j + 1;
  }
  if (residual > tol) check.passed = false;
}

}  // namespace

std::vector<AxiomCheck> check_axioms(const VSystem& vs, double tol) {
  const int r = static_cast<int>(vs.partition.size());
  for (int n : vs.partition)
    if (n < 1)
      throw Error(ErrorCode::InvalidArgument, "partition entries must be >= 1");
  for (const auto& [key, basis] : vs.blocks) {
    const auto [l, k] = key;
    if (!(0 <= k && k < l && l < r))
      throw Error(ErrorCode::IndexOutOfRange,
                  "block (" + std::to_string(l + 1) + "," +
                      std::to_string(k + 1) + ") is not below the diagonal");
    for (const auto& b : basis)
      if (b.rows() != vs.partition[l] || b.cols() != vs.partition[k])
        throw Error(ErrorCode::DimensionMismatch,
                    "basis matrix of V_" + std::to_string(l + 1) +
                        std::to_string(k + 1) + " has the wrong shape");
  }

  AxiomCheck ortho{"orthonormality"}, v1{"V1"}, v2{"V2"}, v3{"V3"};

  for (const auto& [key, basis] : vs.blocks) {
    const auto [l, k] = key;
    const double nl = vs.partition[l];
    for (std::size_t a = 0; a < basis.size(); ++a) {
      for (std::size_t b = a; b < basis.size(); ++b) {
        const double g = basis[a].cwiseProduct(basis[b]).sum() / nl;
        record(ortho, std::abs(g - (a == b ? 1.0 : 0.0)), tol, l, k, -1);

        // (V3) polarized: B_a B_bᵀ + B_b B_aᵀ must be a multiple of I.
        const Matrix c = basis[a] * basis[b].transpose() +
                         basis[b] * basis[a].transpose();
        const double cn = c.norm();
        if (cn > 0.0) {
          const Matrix off = c - (c.trace() / nl) * Matrix::Identity(c.rows(), c.cols());
          record(v3, off.norm() / cn, tol, l, k, -1);
        }
      }
    }
  }

  for (int j = 0; j < r; ++j) {
    for (int k = j + 1; k < r; ++k) {
      for (int l = k + 1; l < r; ++l) {
        const auto& vlk = lookup(vs, l, k);
        const auto& vkj = lookup(vs, k, j);
        const auto& vlj = lookup(vs, l, j);
        for (const auto& a : vlk)
          for (const auto& b : vkj)
            record(v1, projection_residual(a * b, vlj), tol, l, k, j);
        for (const auto& a : vlj)
          for (const auto& b : vkj)
            record(v2, projection_residual(a * b.transpose(), vlk), tol, l, k, j);
      }
    }
  }
  return {ortho, v1, v2, v3};
}

ConePtr ConeRealization::build(VSystem vs, std::string name) {
  if (vs.partition.empty())
    throw Error(ErrorCode::InvalidArgument, "partition must be non-empty");
  for (const auto& check : check_axioms(vs)) {
    if (!check.passed)
      throw AxiomViolation(check.rule, check.l, check.k, check.j,
                           check.max_residual);
  }
  // Drop empty bases so that lookups treat them as {0}.
  for (auto it = vs.blocks.begin(); it != vs.blocks.end();) {
    if (it->second.empty())
      it = vs.blocks.erase(it);
    else
      ++it;
  }

  std::shared_ptr<ConeRealization> c(new ConeRealization());
  c->name_ = std::move(name);
  c->r_ = static_cast<int>(vs.partition.size());
  c->sizes_ = vs.partition;
  c->offsets_.resize(c->r_);
  int off = 0;
  for (int k = 0; k < c->r_; ++k) {
    c->offsets_[k] = off;
    off += c->sizes_[k];
  }
  c->n_total_ = off;

  const int r = c->r_;
  const int nblocks = r * (r - 1) / 2;
  c->bases_.resize(nblocks);
  c->coord_offsets_.resize(nblocks);
  int pos = r;
  for (int l = 1; l < r; ++l) {
    for (int k = 0; k < l; ++k) {
      const int idx = c->block_index(l, k);
      c->bases_[idx] = lookup(vs, l, k);
      c->coord_offsets_[idx] = pos;
      pos += static_cast<int>(c->bases_[idx].size());
    }
  }
  c->dim_ = pos;
  c->weights_ = Vector::Constant(c->dim_, 2.0);
  c->weights_.head(r).setOnes();

  c->exponents_ = Matrix::Zero(r, r);
  for (int i = 0; i < r; ++i) {
    c->exponents_(i, i) = 1.0;
    for (int l = i + 1; l < r; ++l) c->exponents_(i, l) = c->block_dim(l, i);
  }

  c->wbasis_.resize(r);
  const int n = c->n_total_;
  for (int i = 0; i < r; ++i) {
    const int ni = c->sizes_[i];
    Matrix e0 = Matrix::Zero(n, ni);
    e0.block(c->offsets_[i], 0, ni, ni).setIdentity();
    c->wbasis_[i].push_back(std::move(e0));
    for (int l = i + 1; l < r; ++l) {
      for (const auto& b : c->basis(l, i)) {
        Matrix e = Matrix::Zero(n, ni);
        e.block(c->offsets_[l], 0, c->sizes_[l], ni) = b;
        c->wbasis_[i].push_back(std::move(e));
      }
    }
  }
  c->vs_ = std::move(vs);
  return c;
}

int ConeRealization::block_index(int l, int k) const {
  return l * (l - 1) / 2 + k;
}

int ConeRealization::block_dim(int l, int k) const {
  return static_cast<int>(basis(l, k).size());
}

const std::vector<Matrix>& ConeRealization::basis(int l, int k) const {
  if (!(0 <= k && k < l && l < r_))
    throw Error(ErrorCode::IndexOutOfRange, "block index out of range");
  return bases_[block_index(l, k)];
}

int ConeRealization::coord_offset(int l, int k) const {
  if (!(0 <= k && k < l && l < r_))
    throw Error(ErrorCode::IndexOutOfRange, "block index out of range");
  return coord_offsets_[block_index(l, k)];
}

Vector ConeRealization::d_vector() const {
  Vector d(r_);
  for (int k = 0; k < r_; ++k) {
    double s = 0.0;
    for (int l = k + 1; l < r_; ++l) s += block_dim(l, k);
    for (int i = 0; i < k; ++i) s += block_dim(k, i);
    d(k) = 1.0 + s / 2.0;
  }
  return d;
}

Vector ConeRealization::p_vector(const std::vector<int>& eps) const {
  if (static_cast<int>(eps.size()) != r_)
    throw Error(ErrorCode::DimensionMismatch, "epsilon has wrong length");
  Vector p = Vector::Zero(r_);
  for (int k = 0; k < r_; ++k)
    for (int i = 0; i < k; ++i)
      if (eps[i]) p(k) += block_dim(k, i);
  return p;
}

int ConeRealization::basic_dim(int i) const {
  return static_cast<int>(wbasis_.at(i).size());
}

std::vector<std::string> ConeRealization::coordinate_names() const {
  std::vector<std::string> names;
  for (int k = 0; k < r_; ++k)
    names.push_back("y" + std::to_string(k + 1) + std::to_string(k + 1));
  for (int l = 1; l < r_; ++l) {
    for (int k = 0; k < l; ++k) {
      const int nb = block_dim(l, k);
      const std::string stem = "y" + std::to_string(l + 1) + std::to_string(k + 1);
      for (int a = 0; a < nb; ++a)
        names.push_back(nb == 1 ? stem : stem + "_" + std::to_string(a + 1));
    }
  }
  return names;
}

Vector ConeRealization::identity_coords() const {
  Vector v = Vector::Zero(dim_);
  v.head(r_).setOnes();
  return v;
}

Matrix ConeRealization::to_matrix(const Vector& coords) const {
  if (coords.size() != dim_)
    throw Error(ErrorCode::DimensionMismatch, "coordinate vector has wrong length");
  Matrix y = Matrix::Zero(n_total_, n_total_);
  for (int k = 0; k < r_; ++k)
    y.block(offsets_[k], offsets_[k], sizes_[k], sizes_[k]).diagonal().setConstant(coords(k));
  for (int l = 1; l < r_; ++l) {
    for (int k = 0; k < l; ++k) {
      const auto& b = bases_[block_index(l, k)];
      if (b.empty()) continue;
      Matrix blk = Matrix::Zero(sizes_[l], sizes_[k]);
      const int off = coord_offsets_[block_index(l, k)];
      for (std::size_t a = 0; a < b.size(); ++a) blk += coords(off + a) * b[a];
      y.block(offsets_[l], offsets_[k], sizes_[l], sizes_[k]) = blk;
      y.block(offsets_[k], offsets_[l], sizes_[k], sizes_[l]) = blk.transpose();
    }
  }
  return y;
}

Vector ConeRealization::from_matrix(const Matrix& y, double* rel_residual) const {
  if (y.rows() != n_total_ || y.cols() != n_total_)
    throw Error(ErrorCode::DimensionMismatch, "matrix has wrong size");
  const Matrix ys = symmetrize(y);
  Vector c(dim_);
  for (int k = 0; k < r_; ++k)
    c(k) = ys.block(offsets_[k], offsets_[k], sizes_[k], sizes_[k]).trace() / sizes_[k];
  for (int l = 1; l < r_; ++l) {
    for (int k = 0; k < l; ++k) {
      const auto& b = bases_[block_index(l, k)];
      const int off = coord_offsets_[block_index(l, k)];
      const auto blk = ys.block(offsets_[l], offsets_[k], sizes_[l], sizes_[k]);
      for (std::size_t a = 0; a < b.size(); ++a)
        c(off + a) = b[a].cwiseProduct(blk).sum() / sizes_[l];
    }
  }
  if (rel_residual) {
    const double yn = y.norm();
    *rel_residual = yn == 0.0 ? 0.0 : (y - to_matrix(c)).norm() / yn;
  }
  return c;
}

Matrix ConeRealization::functional_matrix(const Vector& eta) const {
  if (eta.size() != dim_)
    throw Error(ErrorCode::DimensionMismatch, "coordinate vector has wrong length");
  Matrix m = Matrix::Zero(n_total_, n_total_);
  for (int k = 0; k < r_; ++k)
    m.block(offsets_[k], offsets_[k], sizes_[k], sizes_[k]).diagonal().setConstant(eta(k) / sizes_[k]);
  for (int l = 1; l < r_; ++l) {
    for (int k = 0; k < l; ++k) {
      const auto& b = bases_[block_index(l, k)];
      if (b.empty()) continue;
      Matrix blk = Matrix::Zero(sizes_[l], sizes_[k]);
      const int off = coord_offsets_[block_index(l, k)];
      for (std::size_t a = 0; a < b.size(); ++a) blk += eta(off + a) * b[a];
      blk /= sizes_[l];
      m.block(offsets_[l], offsets_[k], sizes_[l], sizes_[k]) = blk;
      m.block(offsets_[k], offsets_[l], sizes_[k], sizes_[l]) = blk.transpose();
    }
  }
  return m;
}

Vector ConeRealization::from_functional(const Matrix& s) const {
  if (s.rows() != n_total_ || s.cols() != n_total_)
    throw Error(ErrorCode::DimensionMismatch, "matrix has wrong size");
  const Matrix ss = symmetrize(s);
  Vector z(dim_);
  for (int k = 0; k < r_; ++k)
    z(k) = ss.block(offsets_[k], offsets_[k], sizes_[k], sizes_[k]).trace();
  for (int l = 1; l < r_; ++l) {
    for (int k = 0; k < l; ++k) {
      const auto& b = bases_[block_index(l, k)];
      const int off = coord_offsets_[block_index(l, k)];
      const auto blk = ss.block(offsets_[l], offsets_[k], sizes_[l], sizes_[k]);
      for (std::size_t a = 0; a < b.size(); ++a)
        z(off + a) = b[a].cwiseProduct(blk).sum();
    }
  }
  return z;
}

Matrix ConeRealization::basic_phi(int i, const Vector& eta) const {
  if (i < 0 || i >= r_)
    throw Error(ErrorCode::IndexOutOfRange, "basic map index out of range");
  const Matrix f = functional_matrix(eta);
  const auto& w = wbasis_[i];
  const int m = static_cast<int>(w.size());
  std::vector<Matrix> fw;
  fw.reserve(m);
  for (const auto& e : w) fw.push_back(f * e);
  Matrix phi(m, m);
  for (int a = 0; a < m; ++a)
    for (int b = a; b < m; ++b) {
      const double v = w[a].cwiseProduct(fw[b]).sum();
      phi(a, b) = v;
      phi(b, a) = v;
    }
  return phi;
}

bool ConeRealization::same_as(const ConeRealization& other) const {
  if (this == &other) return true;
  if (sizes_ != other.sizes_ || dim_ != other.dim_) return false;
  for (std::size_t b = 0; b < bases_.size(); ++b) {
    if (bases_[b].size() != other.bases_[b].size()) return false;
    for (std::size_t a = 0; a < bases_[b].size(); ++a)
      if (max_abs(bases_[b][a] - other.bases_[b][a]) > 1e-12) return false;
  }
  return true;
}

// ---------------------------------------------------------------------------

TriangularElement TriangularElement::identity(const ConePtr& cone) {
  return {cone, Vector::Ones(cone->rank()),
          Vector::Zero(cone->dim() - cone->rank())};
}

Matrix TriangularElement::matrix() const {
  const auto& c = *cone;
  const int r = c.rank();
  Matrix t = Matrix::Zero(c.ambient_size(), c.ambient_size());
  for (int k = 0; k < r; ++k)
    t.block(c.block_offset(k), c.block_offset(k), c.block_size(k), c.block_size(k))
        .diagonal()
        .setConstant(diag(k));
  for (int l = 1; l < r; ++l) {
    for (int k = 0; k < l; ++k) {
      const auto& b = c.basis(l, k);
      const int base = c.coord_offset(l, k) - r;
      for (std::size_t a = 0; a < b.size(); ++a)
        t.block(c.block_offset(l), c.block_offset(k), c.block_size(l), c.block_size(k)) +=
            this->off(base + static_cast<int>(a)) * b[a];
    }
  }
  return t;
}

ConeElement identity_element(const ConePtr& cone) {
  return {cone, cone->identity_coords()};
}

ConeElement make_element(const ConePtr& cone, Vector coords) {
  if (coords.size() != cone->dim())
    throw Error(ErrorCode::DimensionMismatch,
                "expected " + std::to_string(cone->dim()) + " coordinates, got " +
                    std::to_string(coords.size()));
  return {cone, std::move(coords)};
}

namespace {

void require_same(const ConePtr& a, const ConePtr& b) {
  if (!a || !b || !(a == b || a->same_as(*b)))
    throw Error(ErrorCode::RealizationMismatch,
                "operands belong to different realizations");
}

}  // namespace

TriangularElement triangular_from_matrix(const ConePtr& cone, const Matrix& t,
                                         double tol) {
  const auto& c = *cone;
  const int r = c.rank();
  const int n = c.ambient_size();
  if (t.rows() != n || t.cols() != n)
    throw Error(ErrorCode::DimensionMismatch, "matrix has wrong size");
  TriangularElement out{cone, Vector(r), Vector::Zero(c.dim() - r)};
  Matrix rebuilt = Matrix::Zero(n, n);
  for (int k = 0; k < r; ++k) {
    const auto blk = t.block(c.block_offset(k), c.block_offset(k), c.block_size(k), c.block_size(k));
    out.diag(k) = blk.trace() / c.block_size(k);
  }
  for (int l = 1; l < r; ++l) {
    for (int k = 0; k < l; ++k) {
      const auto& b = c.basis(l, k);
      const int off = c.coord_offset(l, k) - r;
      const auto blk = t.block(c.block_offset(l), c.block_offset(k), c.block_size(l), c.block_size(k));
      for (std::size_t a = 0; a < b.size(); ++a)
        out.off(off + a) = b[a].cwiseProduct(blk).sum() / c.block_size(l);
    }
  }
  rebuilt = out.matrix();
  const double scale = std::max(t.norm(), 1e-300);
  const double res = (t - rebuilt).norm() / scale;
  if (res > tol)
    throw Error(ErrorCode::StructureLeak,
                "triangular factor leaves H_V (relative residual " +
                    std::to_string(res) + ")");
  for (int k = 0; k < r; ++k)
    if (!(out.diag(k) > 0.0))
      throw Error(ErrorCode::StructureLeak, "non-positive diagonal block");
  return out;
}

TriangularElement multiply(const TriangularElement& a, const TriangularElement& b) {
  require_same(a.cone, b.cone);
  return triangular_from_matrix(a.cone, a.matrix() * b.matrix());
}

TriangularElement inverse(const TriangularElement& t) {
  const Matrix m = t.matrix();
  const Matrix inv = m.triangularView<Eigen::Lower>().solve(
      Matrix::Identity(m.rows(), m.cols()));
  return triangular_from_matrix(t.cone, inv);
}

ConeElement rho_action(const TriangularElement& t, const ConeElement& y) {
  require_same(t.cone, y.cone);
  const Matrix tm = t.matrix();
  const Matrix img = tm * y.matrix() * tm.transpose();
  double res = 0.0;
  Vector c = y.cone->from_matrix(img, &res);
  if (res > kAxiomTol)
    throw Error(ErrorCode::StructureLeak,
                "rho(T)y left Z_V (relative residual " + std::to_string(res) + ")");
  return {y.cone, std::move(c)};
}

ConeElement rho_star_action(const TriangularElement& t, const ConeElement& eta) {
  require_same(t.cone, eta.cone);
  const Matrix tm = t.matrix();
  const Matrix s = tm.transpose() * eta.cone->functional_matrix(eta.coords) * tm;
  return {eta.cone, eta.cone->from_functional(s)};
}

double coupling(const ConeElement& y, const ConeElement& eta) {
  require_same(y.cone, eta.cone);
  return (y.coords.array() * eta.coords.array() *
          y.cone->coupling_weights().array())
      .sum();
}

TriangularElement structured_cholesky(const ConeElement& y) {
  const Matrix m = y.matrix();
  if (!is_positive_definite(m, kPdTol))
    throw Error(ErrorCode::NotInCone, "element is not positive definite");
  Eigen::LLT<Matrix> llt(m);
  if (llt.info() != Eigen::Success)
    throw Error(ErrorCode::NotInCone, "Cholesky factorization failed");
  const Matrix l = llt.matrixL();
  return triangular_from_matrix(y.cone, l);
}

ConeElement dual_orbit_point(const TriangularElement& t) {
  return rho_star_action(t, identity_element(t.cone));
}

TriangularElement triangular_from_dual(const ConeElement& eta) {
  const auto& c = *eta.cone;
  const int r = c.rank();
  // Dense blocks of T, filled bottom row first.
  std::vector<std::vector<Matrix>> blk(r, std::vector<Matrix>(r));
  TriangularElement t{eta.cone, Vector(r), Vector::Zero(c.dim() - r)};
  const double scale = std::max(eta.coords.head(r).cwiseAbs().maxCoeff(), 1e-300);

  for (int l = r - 1; l >= 0; --l) {
    double tl2 = eta.coords(l);
    for (int j = l + 1; j < r; ++j) {
      const int off = c.coord_offset(j, l) - r;
      tl2 -= t.off.segment(off, c.block_dim(j, l)).squaredNorm();
    }
    if (!(tl2 > kPdTol * scale))
      throw Error(ErrorCode::NotInDualCone,
                  "element is not in the open dual cone (block " +
                      std::to_string(l + 1) + ")");
    const double tll = std::sqrt(tl2);
    t.diag(l) = tll;
    for (int k = 0; k < l; ++k) {
      const auto& b = c.basis(l, k);
      const int off = c.coord_offset(l, k);
      Matrix tlk = Matrix::Zero(c.block_size(l), c.block_size(k));
      for (std::size_t a = 0; a < b.size(); ++a) {
        double z = eta.coords(off + a);
        for (int j = l + 1; j < r; ++j) {
          if (blk[j][k].size() == 0 || blk[j][l].size() == 0) continue;
          z -= b[a].cwiseProduct(blk[j][l].transpose() * blk[j][k]).sum() /
               c.block_size(j);
        }
        const double coeff = z / tll;
        t.off(off - r + a) = coeff;
        tlk += coeff * b[a];
      }
      if (!b.empty()) blk[l][k] = std::move(tlk);
    }
  }

  const Vector fwd = dual_orbit_point(t).coords;
  const double err = (fwd - eta.coords).norm() / std::max(eta.coords.norm(), 1e-300);
  if (err > 1e-10)
    throw Error(ErrorCode::NotInDualCone,
                "forward-map check failed (relative error " + std::to_string(err) + ")");
  return t;
}

bool dual_membership(const ConeElement& eta) {
  const auto& c = *eta.cone;
  for (int i = 0; i < c.rank(); ++i) {
    const Matrix phi = c.basic_phi(i, eta.coords);
    if (!(phi.determinant() > 0.0)) return false;
  }
  return true;
}

bool cone_membership(const ConeElement& y) {
  return is_positive_definite(y.matrix(), kPdTol);
}

double chi(const Vector& sigma, const TriangularElement& t) {
  if (sigma.size() != t.diag.size())
    throw Error(ErrorCode::DimensionMismatch, "sigma has wrong length");
  double lg = 0.0;
  for (Eigen::Index k = 0; k < sigma.size(); ++k) {
    if (sigma(k) == 0.0) continue;
    lg += 2.0 * sigma(k) * std::log(t.diag(k));
  }
  return std::exp(lg);
}

double delta(const Vector& sigma, const ConeElement& y) {
  return chi(sigma, structured_cholesky(y));
}

Vector reversed(const Vector& v) { return v.reverse(); }

Vector exponent_solve(const ConeRealization& cone, const Vector& target) {
  const int r = cone.rank();
  if (target.size() != r)
    throw Error(ErrorCode::DimensionMismatch, "exponent target has wrong length");
  // Σ_i a_i m(i)_k = a_k + Σ_{i<k} a_i n_ki.
  Vector a(r);
  for (int k = 0; k < r; ++k) {
    double s = target(k);
    for (int i = 0; i < k; ++i) s -= a(i) * cone.exponent_matrix()(i, k);
    a(k) = s;
  }
  return a;
}

double delta_star(const Vector& sigma, const ConeElement& eta) {
  const auto& c = *eta.cone;
  const int r = c.rank();
  if (sigma.size() != r)
    throw Error(ErrorCode::DimensionMismatch, "sigma has wrong length");
  const Vector a = exponent_solve(c, reversed(sigma));
  double lg = 0.0;
  for (int i = 0; i < r; ++i) {
    const double det = c.basic_phi(i, eta.coords).determinant();
    if (!(det > 0.0))
      throw Error(ErrorCode::NotInDualCone,
                  "det phi_V^" + std::to_string(i + 1) + " is not positive");
    if (a(i) != 0.0) lg += a(i) * std::log(det);
  }
  return std::exp(lg);
}

TriangularElement random_triangular(const ConePtr& cone, std::mt19937_64& rng,
                                    double spread, double scale) {
  std::uniform_real_distribution<double> unif(-spread, spread);
  std::normal_distribution<double> normal(0.0, scale);
  TriangularElement t = TriangularElement::identity(cone);
  for (Eigen::Index k = 0; k < t.diag.size(); ++k) t.diag(k) = std::exp(unif(rng));
  for (Eigen::Index a = 0; a < t.off.size(); ++a) t.off(a) = normal(rng);
  return t;
}

}  // namespace conewishart
