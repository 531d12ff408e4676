#include "qcoarse/random.hpp"

#include <cmath>

namespace qcoarse {

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

std::size_t Rng::index(std::size_t lo, std::size_t hi) {
  std::uniform_int_distribution<std::size_t> dist(lo, hi);
  return dist(engine_);
}

Matrix ginibre(Eigen::Index rows, Eigen::Index cols, Rng& rng) {
  Matrix g(rows, cols);
  const double s = 1.0 / std::sqrt(2.0);
  // Fill column by column so the draw order is fixed.
  for (Eigen::Index j = 0; j < cols; ++j) {
    for (Eigen::Index i = 0; i < rows; ++i) {
      const double re = rng.normal();
      const double im = rng.normal();
      g(i, j) = Complex(s * re, s * im);
    }
  }
  return g;
}

Matrix haar_unitary(Eigen::Index n, Rng& rng) {
  const Matrix z = ginibre(n, n, rng);
  Eigen::HouseholderQR<Matrix> qr(z);
  Matrix q = qr.householderQ() * Matrix::Identity(n, n);
  const Matrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (Eigen::Index j = 0; j < n; ++j) {
    const Complex d = r(j, j);
    const double mag = std::abs(d);
    if (mag > 0.0) q.col(j) *= d / mag;
  }
  return q;
}

Vector random_unit_vector(Eigen::Index n, Rng& rng) {
  Vector v = ginibre(n, 1, rng).col(0);
  return v / v.norm();
}

Projection random_projection(Eigen::Index n, Eigen::Index k, Rng& rng) {
  const Matrix u = haar_unitary(n, rng);
  return Projection::from_orthonormal(u.leftCols(k));
}

}  // namespace qcoarse
