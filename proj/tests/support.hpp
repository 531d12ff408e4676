#pragma once

// Independent reference computations and generators shared by the unit tests
// and the acceptance binary. Nothing here calls into the library's numerics
// for the quantity it is meant to check.

#include "qcoarse/asdim.hpp"
#include "qcoarse/expander.hpp"
#include "qcoarse/moduli.hpp"
#include "qcoarse/qmetric.hpp"
#include "qcoarse/random.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

namespace qcoarse::testing {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

// Gap oracle: restrict Phi to an orthonormal basis of the traceless matrices
// and take the largest eigenvalue of T^* T.
inline double gap_oracle(const KrausSet& k) {
  const Eigen::Index n = k.n();
  std::vector<Matrix> basis;
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      if (i == j) continue;
      Matrix e = Matrix::Zero(n, n);
      e(i, j) = 1.0;
      basis.push_back(e);
    }
  }
  // diag(1,..,1,-l,0,..)/sqrt(l(l+1)) for l = 1..n-1
  for (Eigen::Index l = 1; l < n; ++l) {
    Matrix h = Matrix::Zero(n, n);
    for (Eigen::Index i = 0; i < l; ++i) h(i, i) = 1.0;
    h(l, l) = -static_cast<double>(l);
    basis.push_back(h / std::sqrt(static_cast<double>(l * (l + 1))));
  }
  const auto dim = static_cast<Eigen::Index>(basis.size());
  Matrix t(dim, dim);
  for (Eigen::Index b = 0; b < dim; ++b) {
    Matrix img = Matrix::Zero(n, n);
    for (const Matrix& op : k.ops()) img += op * basis[b] * op.adjoint();
    for (Eigen::Index a = 0; a < dim; ++a) t(a, b) = (basis[a].adjoint() * img).trace();
  }
  if (dim == 0) return 1.0;
  Eigen::SelfAdjointEigenSolver<Matrix> es(t.adjoint() * t);
  const double top = std::max(0.0, es.eigenvalues().maxCoeff());
  return 1.0 - std::sqrt(top);
}

// Random mixed-unitary channel: Kraus ops sqrt(p_i) U_i.
inline KrausSet random_mixed_unitary(Eigen::Index n, std::size_t count, Rng& rng) {
  std::vector<double> w(count);
  double total = 0.0;
  for (double& x : w) {
    x = 0.05 + rng.uniform();
    total += x;
  }
  std::vector<Matrix> ops;
  for (std::size_t i = 0; i < count; ++i) ops.push_back(std::sqrt(w[i] / total) * haar_unitary(n, rng));
  return KrausSet(std::move(ops));
}

inline Matrix shift(Eigen::Index n, Eigen::Index by) {
  Matrix s = Matrix::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) s(((i + by) % n + n) % n, i) = 1.0;
  return s;
}

// Channel whose quantum graph is the cycle: {I, S, S^*} / sqrt(3).
inline KrausSet cycle_channel(Eigen::Index n) {
  const double c = 1.0 / std::sqrt(3.0);
  return KrausSet({c * Matrix::Identity(n, n), c * shift(n, 1), c * shift(n, -1)});
}

inline Matrix block_diag(const Matrix& a, const Matrix& b) {
  Matrix m = Matrix::Zero(a.rows() + b.rows(), a.cols() + b.cols());
  m.topLeftCorner(a.rows(), a.cols()) = a;
  m.bottomRightCorner(b.rows(), b.cols()) = b;
  return m;
}

// Projection onto a random subspace of span{e_i : i in support}.
inline Projection localized_projection(Eigen::Index n, const Subset& support, Eigen::Index rank,
                                       Rng& rng) {
  const auto s = static_cast<Eigen::Index>(support.size());
  const Matrix g = ginibre(s, std::min(rank, s), rng);
  Matrix v = Matrix::Zero(n, g.cols());
  for (Eigen::Index i = 0; i < s; ++i) v.row(static_cast<Eigen::Index>(support[i])) = g.row(i);
  return Projection::onto(v);
}

inline Subset random_nonempty_subset(std::size_t n, Rng& rng) {
  Subset s;
  while (s.empty()) {
    for (std::size_t i = 0; i < n; ++i) {
      if (rng.uniform() < 0.4) s.push_back(i);
    }
  }
  return s;
}

inline std::vector<std::string> labels(std::size_t n) {
  std::vector<std::string> out;
  for (std::size_t i = 0; i < n; ++i) out.push_back("x" + std::to_string(i));
  return out;
}

// Shortest paths of a random weighted graph; unreachable pairs stay +inf.
inline FiniteMetricSpace random_metric_space(std::size_t n, Rng& rng, bool integer_weights,
                                             double edge_prob = 0.5) {
  Eigen::MatrixXd d = Eigen::MatrixXd::Constant(static_cast<Eigen::Index>(n),
                                                static_cast<Eigen::Index>(n), kInf);
  for (std::size_t i = 0; i < n; ++i) d(i, i) = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      if (rng.uniform() >= edge_prob) continue;
      const double w = integer_weights ? static_cast<double>(rng.index(1, 3))
                                       : 0.25 * static_cast<double>(rng.index(1, 12));
      d(i, j) = d(j, i) = w;
    }
  }
  for (std::size_t k = 0; k < n; ++k) {
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) d(i, j) = std::min(d(i, j), d(i, k) + d(k, j));
    }
  }
  return FiniteMetricSpace(labels(n), d);
}

// Euclidean points in [0, side]^dims.
inline FiniteMetricSpace random_point_cloud(std::size_t n, std::size_t dims, double side,
                                            Rng& rng) {
  std::vector<std::vector<double>> pts(n, std::vector<double>(dims));
  for (auto& p : pts) {
    for (double& c : p) c = side * rng.uniform();
  }
  Eigen::MatrixXd d = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n),
                                            static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      double s = 0.0;
      for (std::size_t c = 0; c < dims; ++c) s += (pts[i][c] - pts[j][c]) * (pts[i][c] - pts[j][c]);
      d(i, j) = d(j, i) = std::sqrt(s);
    }
  }
  return FiniteMetricSpace(labels(n), d);
}

// Points on a line with gaps drawn from [lo, hi].
inline FiniteMetricSpace random_chain(std::size_t n, double lo, double hi, Rng& rng) {
  std::vector<double> pos(n, 0.0);
  for (std::size_t i = 1; i < n; ++i) pos[i] = pos[i - 1] + lo + (hi - lo) * rng.uniform();
  Eigen::MatrixXd d(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) d(i, j) = std::abs(pos[i] - pos[j]);
  }
  return FiniteMetricSpace(labels(n), d);
}

// Set formulas on a finite metric space.
inline double set_dist(const FiniteMetricSpace& x, const Subset& s, const Subset& t) {
  if (s.empty() || t.empty()) return kInf;
  double best = kInf;
  for (auto a : s) {
    for (auto b : t) best = std::min(best, x(a, b));
  }
  return best;
}

inline double set_diam(const FiniteMetricSpace& x, const Subset& s) {
  double best = 0.0;
  for (auto a : s) {
    for (auto b : s) best = std::max(best, x(a, b));
  }
  return best;
}

inline Subset set_nbhd(const FiniteMetricSpace& x, const Subset& s, double eps) {
  Subset out;
  for (std::size_t p = 0; p < x.size(); ++p) {
    if (set_dist(x, {p}, s) < eps) out.push_back(p);
  }
  return out;
}

inline bool intersects(const Subset& a, const Subset& b) {
  for (auto x : a) {
    if (std::binary_search(b.begin(), b.end(), x)) return true;
  }
  return false;
}

inline bool subset_of(const Subset& a, const Subset& b) {
  return std::includes(b.begin(), b.end(), a.begin(), a.end());
}

inline double as_double(const ExtendedDistance& d) { return d.as_double(); }

// Reference moduli of the inverse-image map at threshold t.
inline double omega_tilde_ref(const PointMap& f, const FiniteMetricSpace& x,
                              const FiniteMetricSpace& y, double t) {
  double best = kInf;
  for (std::size_t a = 0; a < x.size(); ++a) {
    for (std::size_t b = 0; b < x.size(); ++b) {
      if (y(f.map[a], f.map[b]) >= t) best = std::min(best, x(a, b));
    }
  }
  return best;
}

inline double rho_tilde_ref(const PointMap& f, const FiniteMetricSpace& x,
                            const FiniteMetricSpace& y, double t) {
  double best = 0.0;
  for (std::size_t a = 0; a < x.size(); ++a) {
    for (std::size_t b = 0; b < x.size(); ++b) {
      if (y(f.map[a], f.map[b]) <= t) best = std::max(best, x(a, b));
    }
  }
  return best;
}

}  // namespace qcoarse::testing
