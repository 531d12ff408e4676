#include "qcoarse/matcore.hpp"

#include <unsupported/Eigen/KroneckerProduct>

#include <algorithm>
#include <cmath>
#include <limits>

namespace qcoarse {

void require_same_ambient(Eigen::Index a, Eigen::Index b, const char* what) {
  if (a != b) {
    throw DimensionError(std::string(what) + ": ambient dimension mismatch (" +
                         std::to_string(a) + " vs " + std::to_string(b) + ")");
  }
}

double ToleranceConfig::rank_cutoff(double sigma_max, Eigen::Index rows,
                                    Eigen::Index cols) const {
  const double rel = sigma_max * static_cast<double>(std::max(rows, cols)) *
                     std::numeric_limits<double>::epsilon() * rank_rtol;
  // An all-noise matrix must still come out as rank zero.
  return std::max(rel, zero_atol);
}

void ToleranceConfig::validate() const {
  if (!(zero_atol > 0.0) || !(rank_rtol > 0.0)) {
    throw std::invalid_argument("tolerances must be positive");
  }
}

Complex hs_inner(const Matrix& a, const Matrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw DimensionError("hs_inner: shape mismatch");
  }
  // tr(b^* a) = sum conj(b_ij) a_ij
  return (b.array().conjugate() * a.array()).sum();
}

double frobenius(const Matrix& a) { return a.norm(); }

Vector vec(const Matrix& a) {
  return Eigen::Map<const Vector>(a.data(), a.size());
}

Matrix unvec(const Vector& v, Eigen::Index n) {
  if (v.size() != n * n) throw DimensionError("unvec: expected n^2 entries");
  return Eigen::Map<const Matrix>(v.data(), n, n);
}

namespace {

// BDCSVD in Eigen 3.4 can return NaN or unsorted values when many singular
// values coincide (circulant powers hit this), so its output is checked.
bool sane(const Eigen::VectorXd& s) {
  for (Eigen::Index i = 0; i < s.size(); ++i) {
    if (!std::isfinite(s(i)) || s(i) < 0.0) return false;
    if (i > 0 && s(i) > s(i - 1) * (1.0 + 1e-12) + 1e-300) return false;
  }
  return true;
}

Eigen::Index count_above(const Eigen::VectorXd& s, double cut) {
  Eigen::Index r = 0;
  while (r < s.size() && s(r) > cut) ++r;
  return r;
}

Matrix jacobi_range(const Matrix& a, Eigen::Index rows, Eigen::Index cols,
                    const ToleranceConfig& tol) {
  Eigen::JacobiSVD<Matrix> svd(a, Eigen::ComputeThinU);
  const auto& s = svd.singularValues();
  const Eigen::Index r = count_above(s, tol.rank_cutoff(s(0), rows, cols));
  if (r == rows) return Matrix::Identity(rows, rows);
  return svd.matrixU().leftCols(r);
}

// Thin U restricted to singular values above the cutoff. A full-rank result
// skips U entirely: any orthonormal basis of C^rows will do.
Matrix range_of(const Matrix& a, Eigen::Index rows, Eigen::Index cols, const ToleranceConfig& tol) {
  Eigen::BDCSVD<Matrix> values(a);
  const Eigen::VectorXd s = values.singularValues();
  if (!sane(s)) return jacobi_range(a, rows, cols, tol);
  const double cut = tol.rank_cutoff(s(0), rows, cols);
  const Eigen::Index r = count_above(s, cut);
  if (r == rows) return Matrix::Identity(rows, rows);
  Eigen::BDCSVD<Matrix> svd(a, Eigen::ComputeThinU);
  if (!sane(svd.singularValues())) return jacobi_range(a, rows, cols, tol);
  Matrix u = svd.matrixU().leftCols(r);
  // The discarded part of a is at most sqrt(min(m,k)) * cut in norm.
  const double slack = std::sqrt(static_cast<double>(s.size())) * cut + 1e-10 * s(0);
  const bool orthonormal = (u.adjoint() * u - Matrix::Identity(r, r)).norm() <= 1e-8;
  if (!orthonormal || (a - u * (u.adjoint() * a)).norm() > slack) {
    return jacobi_range(a, rows, cols, tol);
  }
  return u;
}

}  // namespace

Matrix orthonormal_range(const Matrix& cols, const ToleranceConfig& tol) {
  if (cols.cols() == 0 || cols.rows() == 0) return Matrix(cols.rows(), 0);
  if (cols.cols() > 2 * cols.rows()) {
    // Wide input: cols^* = QR, so cols = R^* Q^* has the range and singular
    // values of the square factor R^*.
    Eigen::HouseholderQR<Matrix> qr(cols.adjoint());
    const Matrix rt =
        qr.matrixQR().topRows(cols.rows()).triangularView<Eigen::Upper>().toDenseMatrix().adjoint();
    return range_of(rt, cols.rows(), cols.cols(), tol);
  }
  return range_of(cols, cols.rows(), cols.cols(), tol);
}

// ---------------------------------------------------------------------------
// OperatorSubspace

double OperatorSubspace::membership_residual(const Matrix& a) const {
  require_same_ambient(a.rows(), n_, "membership_residual");
  Vector x = vec(a);
  if (stacked_.cols() > 0) x -= stacked_ * (stacked_.adjoint() * x);
  return x.norm();
}

bool OperatorSubspace::contains(const Matrix& a, const ToleranceConfig& tol) const {
  return membership_residual(a) <= tol.zero_atol * std::max(1.0, a.norm());
}

void OperatorSubspace::compute_flags(const ToleranceConfig& tol) {
  if (n_ > 0 && static_cast<Eigen::Index>(basis_.size()) == n_ * n_) {
    self_adjoint_ = true;
    contains_identity_ = true;
    return;
  }
  Matrix adj(n_ * n_, static_cast<Eigen::Index>(basis_.size()));
  for (std::size_t j = 0; j < basis_.size(); ++j) {
    adj.col(static_cast<Eigen::Index>(j)) = vec(basis_[j].adjoint());
  }
  if (stacked_.cols() > 0) adj -= stacked_ * (stacked_.adjoint() * adj);
  self_adjoint_ = adj.cols() == 0 || adj.colwise().norm().maxCoeff() <= tol.zero_atol;
  const Matrix id = Matrix::Identity(n_, n_) / std::sqrt(static_cast<double>(n_));
  contains_identity_ = n_ > 0 && membership_residual(id) <= tol.zero_atol;
}

OperatorSubspace OperatorSubspace::identity_span(Eigen::Index n, const ToleranceConfig& tol) {
  const Matrix id = Matrix::Identity(n, n);
  return subspace_from_spanning(std::span<const Matrix>(&id, 1), tol);
}

OperatorSubspace OperatorSubspace::full(Eigen::Index n, const ToleranceConfig& tol) {
  return subspace_from_columns(n, Matrix::Identity(n * n, n * n), tol);
}

OperatorSubspace subspace_from_columns(Eigen::Index n, const Matrix& vectorized,
                                       const ToleranceConfig& tol) {
  if (vectorized.rows() != n * n) {
    throw DimensionError("subspace_from_columns: expected n^2 rows");
  }
  OperatorSubspace s;
  s.n_ = n;
  s.stacked_ = orthonormal_range(vectorized, tol);
  s.basis_.reserve(static_cast<std::size_t>(s.stacked_.cols()));
  for (Eigen::Index j = 0; j < s.stacked_.cols(); ++j) {
    s.basis_.push_back(unvec(s.stacked_.col(j), n));
  }
  s.compute_flags(tol);
  return s;
}

OperatorSubspace subspace_from_spanning(std::span<const Matrix> mats,
                                        const ToleranceConfig& tol) {
  if (mats.empty()) throw std::invalid_argument("subspace_from_spanning: empty input");
  const Eigen::Index n = mats.front().rows();
  Matrix cols(n * n, static_cast<Eigen::Index>(mats.size()));
  for (std::size_t j = 0; j < mats.size(); ++j) {
    if (mats[j].rows() != n || mats[j].cols() != n) {
      throw DimensionError("subspace_from_spanning: all matrices must be n x n");
    }
    cols.col(static_cast<Eigen::Index>(j)) = vec(mats[j]);
  }
  return subspace_from_columns(n, cols, tol);
}

OperatorSubspace subspace_product(const OperatorSubspace& u, const OperatorSubspace& v,
                                  const ToleranceConfig& tol) {
  require_same_ambient(u.ambient_dim(), v.ambient_dim(), "subspace_product");
  const Eigen::Index n = u.ambient_dim();
  Matrix cols(n * n, static_cast<Eigen::Index>(u.dim() * v.dim()));
  Eigen::Index j = 0;
  for (const auto& a : u.basis()) {
    for (const auto& b : v.basis()) {
      const Matrix ab = a * b;
      cols.col(j++) = vec(ab);
    }
  }
  return subspace_from_columns(n, cols, tol);
}

PowerSequence subspace_power(const OperatorSubspace& v, std::size_t m,
                             const ToleranceConfig& tol) {
  PowerSequence seq;
  seq.powers.push_back(OperatorSubspace::identity_span(v.ambient_dim(), tol));
  const auto full_dim = static_cast<std::size_t>(v.ambient_dim() * v.ambient_dim());
  while (seq.powers.size() <= m) {
    if (seq.powers.back().dim() == full_dim && v.contains_identity()) {
      seq.stabilization_index = seq.powers.size() - 1;
      seq.stabilized = true;
      break;
    }
    OperatorSubspace next = subspace_product(seq.powers.back(), v, tol);
    const bool same = next.dim() == seq.powers.back().dim();
    seq.powers.push_back(std::move(next));
    if (same && v.contains_identity()) {
      seq.stabilization_index = seq.powers.size() - 2;
      seq.stabilized = true;
      break;
    }
  }
  return seq;
}

// ---------------------------------------------------------------------------
// Projection

Projection Projection::onto(const Matrix& vectors, const ToleranceConfig& tol) {
  return Projection(orthonormal_range(vectors, tol));
}

Projection Projection::from_orthonormal(Matrix range_basis, const ToleranceConfig& tol) {
  const Eigen::Index k = range_basis.cols();
  const Matrix gram = range_basis.adjoint() * range_basis;
  if ((gram - Matrix::Identity(k, k)).norm() > tol.zero_atol * std::max<double>(1.0, k)) {
    throw std::invalid_argument("Projection: range basis columns are not orthonormal");
  }
  return Projection(std::move(range_basis));
}

Projection Projection::zero(Eigen::Index n) { return Projection(Matrix(n, 0)); }

Projection Projection::identity(Eigen::Index n) { return Projection(Matrix::Identity(n, n)); }

Projection Projection::basis_vector(Eigen::Index n, Eigen::Index i) {
  Matrix r = Matrix::Zero(n, 1);
  r(i, 0) = 1.0;
  return Projection(std::move(r));
}

Projection Projection::diagonal(Eigen::Index n, std::span<const std::size_t> indices) {
  Matrix r = Matrix::Zero(n, static_cast<Eigen::Index>(indices.size()));
  for (std::size_t j = 0; j < indices.size(); ++j) {
    if (static_cast<Eigen::Index>(indices[j]) >= n) {
      throw std::out_of_range("Projection::diagonal: index out of range");
    }
    r(static_cast<Eigen::Index>(indices[j]), static_cast<Eigen::Index>(j)) = 1.0;
  }
  return Projection(std::move(r));
}

Matrix Projection::matrix() const { return range_ * range_.adjoint(); }

Projection Projection::complement(const ToleranceConfig&) const {
  const Eigen::Index n = ambient_dim();
  const Eigen::Index k = rank();
  if (k == 0) return identity(n);
  if (k == n) return zero(n);
  Eigen::HouseholderQR<Matrix> qr(range_);
  Matrix q = qr.householderQ() * Matrix::Identity(n, n);
  return Projection(q.rightCols(n - k));
}

bool Projection::is_diagonal(const ToleranceConfig& tol,
                             std::vector<std::size_t>* support) const {
  const Matrix p = matrix();
  Matrix off = p;
  off.diagonal().setZero();
  if (off.norm() > tol.zero_atol) return false;
  std::vector<std::size_t> s;
  for (Eigen::Index i = 0; i < p.rows(); ++i) {
    const double d = p(i, i).real();
    if (std::abs(d - 1.0) <= tol.zero_atol) {
      s.push_back(static_cast<std::size_t>(i));
    } else if (std::abs(d) > tol.zero_atol) {
      return false;
    }
  }
  if (support) *support = std::move(s);
  return true;
}

Projection image_range_projection(const OperatorSubspace& v, const Projection& p,
                                  const ToleranceConfig& tol) {
  require_same_ambient(v.ambient_dim(), p.ambient_dim(), "image_range_projection");
  const Eigen::Index n = p.ambient_dim();
  const Eigen::Index k = p.rank();
  Matrix cols(n, static_cast<Eigen::Index>(v.dim()) * k);
  Eigen::Index j = 0;
  for (const auto& a : v.basis()) {
    cols.middleCols(j, k) = a * p.range_basis();
    j += k;
  }
  return Projection::onto(cols, tol);
}

OperatorSubspace commutant(std::span<const Matrix> mats, const ToleranceConfig& tol) {
  if (mats.empty()) throw std::invalid_argument("commutant: empty input");
  const Eigen::Index n = mats.front().rows();
  const Eigen::Index n2 = n * n;
  const Matrix id = Matrix::Identity(n, n);
  // Null space of the stacked maps X -> XA - AX equals the null space of
  // sum_A L_A^* L_A with L_A = A^T (x) I - I (x) A.
  Matrix gram = Matrix::Zero(n2, n2);
  for (const auto& a : mats) {
    if (a.rows() != n || a.cols() != n) throw DimensionError("commutant: shape mismatch");
    const Matrix abar = a.conjugate();
    const Matrix at = a.transpose();
    gram += Eigen::kroneckerProduct(Matrix(abar * at), id).eval();
    gram += Eigen::kroneckerProduct(id, Matrix(a.adjoint() * a)).eval();
    gram -= Eigen::kroneckerProduct(abar, a).eval();
    gram -= Eigen::kroneckerProduct(at, Matrix(a.adjoint())).eval();
  }
  Eigen::SelfAdjointEigenSolver<Matrix> es(gram);
  const auto& lambda = es.eigenvalues();  // ascending
  const double lmax = std::max(0.0, lambda(n2 - 1));
  const double cut = std::max(lmax * static_cast<double>(n2) *
                                  std::numeric_limits<double>::epsilon() * tol.rank_rtol,
                              tol.zero_atol * tol.zero_atol);
  Eigen::Index null_dim = 0;
  while (null_dim < n2 && lambda(null_dim) <= cut) ++null_dim;
  return subspace_from_columns(n, es.eigenvectors().leftCols(null_dim), tol);
}

Projection proj_join(std::span<const Projection> ps, Eigen::Index n,
                     const ToleranceConfig& tol) {
  Eigen::Index total = 0;
  for (const auto& p : ps) {
    require_same_ambient(p.ambient_dim(), n, "proj_join");
    total += p.rank();
  }
  if (total == 0) return Projection::zero(n);
  Matrix cols(n, total);
  Eigen::Index j = 0;
  for (const auto& p : ps) {
    cols.middleCols(j, p.rank()) = p.range_basis();
    j += p.rank();
  }
  return Projection::onto(cols, tol);
}

Projection proj_meet(std::span<const Projection> ps, Eigen::Index n,
                     const ToleranceConfig& tol) {
  std::vector<Projection> complements;
  complements.reserve(ps.size());
  for (const auto& p : ps) {
    require_same_ambient(p.ambient_dim(), n, "proj_meet");
    complements.push_back(p.complement(tol));
  }
  return proj_join(complements, n, tol).complement(tol);
}

bool proj_product_nonzero(const Projection& p, const Projection& q,
                          const ToleranceConfig& tol) {
  require_same_ambient(p.ambient_dim(), q.ambient_dim(), "proj_product_nonzero");
  if (p.is_zero() || q.is_zero()) return false;
  // ||PQ||_F = ||Rp^* Rq||_F for isometric range bases.
  return (p.range_basis().adjoint() * q.range_basis()).norm() > tol.zero_atol;
}

bool proj_leq(const Projection& p, const Projection& q, const ToleranceConfig& tol) {
  require_same_ambient(p.ambient_dim(), q.ambient_dim(), "proj_leq");
  if (p.is_zero()) return true;
  const Matrix& rp = p.range_basis();
  const Matrix& rq = q.range_basis();
  const Matrix residual = rp - rq * (rq.adjoint() * rp);
  return residual.norm() <= tol.zero_atol;
}

}  // namespace qcoarse
