#pragma once

// Dense complex linear algebra on M_n with a single tolerance policy.
//
// Vectorization is column-stacking throughout, so vec(A X B) = (B^T (x) A) vec(X).
// Eigen matrices are column-major, which makes vec() a plain reinterpretation.

#include <Eigen/Dense>

#include <complex>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace qcoarse {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;

/// Raised for shape and ambient-dimension mismatches.
class DimensionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct ToleranceConfig {
  double zero_atol = 1e-9;
  double rank_rtol = 100.0;

  /// Singular values at or below this count as zero for an m x k matrix.
  double rank_cutoff(double sigma_max, Eigen::Index rows, Eigen::Index cols) const;
  void validate() const;
};

Complex hs_inner(const Matrix& a, const Matrix& b);
double frobenius(const Matrix& a);

Vector vec(const Matrix& a);
Matrix unvec(const Vector& v, Eigen::Index n);

/// Orthonormal basis (as columns) of the column span of `cols`, with rank
/// fixed by the tolerance cutoff.
Matrix orthonormal_range(const Matrix& cols, const ToleranceConfig& tol);

class OperatorSubspace {
 public:
  OperatorSubspace() = default;

  Eigen::Index ambient_dim() const { return n_; }
  std::size_t dim() const { return basis_.size(); }
  const std::vector<Matrix>& basis() const { return basis_; }
  bool self_adjoint() const { return self_adjoint_; }
  bool contains_identity() const { return contains_identity_; }

  /// Basis vectorized into an n^2 x dim matrix with orthonormal columns.
  const Matrix& stacked() const { return stacked_; }

  /// Frobenius norm of the component of `a` orthogonal to the subspace.
  double membership_residual(const Matrix& a) const;
  bool contains(const Matrix& a, const ToleranceConfig& tol) const;

  static OperatorSubspace identity_span(Eigen::Index n, const ToleranceConfig& tol = {});
  static OperatorSubspace full(Eigen::Index n, const ToleranceConfig& tol = {});

  friend OperatorSubspace subspace_from_spanning(std::span<const Matrix>,
                                                 const ToleranceConfig&);
  friend OperatorSubspace subspace_from_columns(Eigen::Index, const Matrix&,
                                                const ToleranceConfig&);

 private:
  void compute_flags(const ToleranceConfig& tol);

  Eigen::Index n_ = 0;
  std::vector<Matrix> basis_;
  Matrix stacked_;
  bool self_adjoint_ = false;
  bool contains_identity_ = false;
};

OperatorSubspace subspace_from_spanning(std::span<const Matrix> mats,
                                        const ToleranceConfig& tol = {});
/// Same as subspace_from_spanning, for spanning vectors already stacked as
/// columns of an n^2 x k matrix.
OperatorSubspace subspace_from_columns(Eigen::Index n, const Matrix& vectorized,
                                       const ToleranceConfig& tol = {});
OperatorSubspace subspace_product(const OperatorSubspace& u, const OperatorSubspace& v,
                                  const ToleranceConfig& tol = {});

struct PowerSequence {
  std::vector<OperatorSubspace> powers;  // powers[m] = v^m
  // min m with dim v^{m+1} == dim v^m; only meaningful when `stabilized`.
  std::size_t stabilization_index = 0;
  bool stabilized = false;
};

/// v^0, ..., v^m, stopping early once the dimension stabilizes. Stabilization
/// is detected only when v contains the identity, so that powers are nested.
PowerSequence subspace_power(const OperatorSubspace& v, std::size_t m,
                             const ToleranceConfig& tol = {});

class Projection {
 public:
  Projection() = default;
  /// Projection onto the column span of `vectors` (need not be orthonormal).
  static Projection onto(const Matrix& vectors, const ToleranceConfig& tol = {});
  /// `range_basis` must already have orthonormal columns.
  static Projection from_orthonormal(Matrix range_basis, const ToleranceConfig& tol = {});
  static Projection zero(Eigen::Index n);
  static Projection identity(Eigen::Index n);
  static Projection basis_vector(Eigen::Index n, Eigen::Index i);
  static Projection diagonal(Eigen::Index n, std::span<const std::size_t> indices);

  Eigen::Index ambient_dim() const { return range_.rows(); }
  Eigen::Index rank() const { return range_.cols(); }
  bool is_zero() const { return range_.cols() == 0; }
  const Matrix& range_basis() const { return range_; }
  Matrix matrix() const;
  Projection complement(const ToleranceConfig& tol = {}) const;

  /// Is the induced matrix diagonal? If so, the support indices.
  bool is_diagonal(const ToleranceConfig& tol, std::vector<std::size_t>* support = nullptr) const;

 private:
  explicit Projection(Matrix range) : range_(std::move(range)) {}
  Matrix range_;
};

Projection image_range_projection(const OperatorSubspace& v, const Projection& p,
                                  const ToleranceConfig& tol = {});

OperatorSubspace commutant(std::span<const Matrix> mats, const ToleranceConfig& tol = {});

Projection proj_join(std::span<const Projection> ps, Eigen::Index n,
                     const ToleranceConfig& tol = {});
Projection proj_meet(std::span<const Projection> ps, Eigen::Index n,
                     const ToleranceConfig& tol = {});
bool proj_product_nonzero(const Projection& p, const Projection& q,
                          const ToleranceConfig& tol = {});
/// Is range(p) contained in range(q)?
bool proj_leq(const Projection& p, const Projection& q, const ToleranceConfig& tol = {});

void require_same_ambient(Eigen::Index a, Eigen::Index b, const char* what);

}  // namespace qcoarse
