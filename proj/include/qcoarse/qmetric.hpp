#pragma once

// Quantum metrics on M_n: the quantum graph metric of a CPTP map given by Kraus
// operators, and the canonical metric of a finite classical metric space, with
// distance, neighborhood and diameter computations for projections.

#include "qcoarse/matcore.hpp"

#include <cstdint>
#include <limits>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

namespace qcoarse {

/// A distance in [0, +inf]. Infinity is a separate state, never a large float.
class ExtendedDistance {
 public:
  constexpr ExtendedDistance() = default;
  static constexpr ExtendedDistance of(double v) { return ExtendedDistance(true, v); }
  static constexpr ExtendedDistance infinite() { return ExtendedDistance(false, 0.0); }
  /// Maps IEEE infinity onto the infinite state.
  static ExtendedDistance from_double(double v);

  constexpr bool finite() const { return finite_; }
  constexpr double value() const { return value_; }
  double as_double() const {
    return finite_ ? value_ : std::numeric_limits<double>::infinity();
  }

  friend bool operator==(const ExtendedDistance& a, const ExtendedDistance& b) {
    return a.finite_ == b.finite_ && (!a.finite_ || a.value_ == b.value_);
  }
  friend bool operator<(const ExtendedDistance& a, const ExtendedDistance& b) {
    if (!a.finite_) return false;
    if (!b.finite_) return true;
    return a.value_ < b.value_;
  }
  friend bool operator<=(const ExtendedDistance& a, const ExtendedDistance& b) {
    return !(b < a);
  }
  friend ExtendedDistance max(const ExtendedDistance& a, const ExtendedDistance& b) {
    return a < b ? b : a;
  }
  std::string to_string() const;

 private:
  constexpr ExtendedDistance(bool f, double v) : finite_(f), value_(v) {}
  bool finite_ = true;
  double value_ = 0.0;
};

/// Sorted, duplicate-free point indices.
using Subset = std::vector<std::size_t>;

Subset normalize_subset(Subset s);

// ---------------------------------------------------------------------------
// Kraus sets and the quantum graph metric

class KrausSet {
 public:
  KrausSet() = default;
  explicit KrausSet(std::vector<Matrix> ops, const ToleranceConfig& tol = {});

  Eigen::Index n() const { return n_; }
  const std::vector<Matrix>& ops() const { return ops_; }
  bool trace_preserving() const { return tp_residual_ <= zero_atol_; }
  bool unital() const { return unital_residual_ <= zero_atol_; }
  /// ||sum K_i^* K_i - I||_F
  double tp_residual() const { return tp_residual_; }
  /// ||sum K_i K_i^* - I||_F
  double unital_residual() const { return unital_residual_; }

  /// X -> sum K_i X K_i^*
  Matrix apply(const Matrix& x) const;
  /// X -> sum K_i^* X K_i
  Matrix apply_adjoint(const Matrix& x) const;

 private:
  Eigen::Index n_ = 0;
  std::vector<Matrix> ops_;
  double tp_residual_ = 0.0;
  double unital_residual_ = 0.0;
  double zero_atol_ = 1e-9;
};

/// V_0 = C I, V_1 = span{K_j^* K_i}, V_t = V_1^floor(t). Powers of V_1 are
/// computed on demand and memoized; copies share the cache.
class GraphQuantumMetric {
 public:
  GraphQuantumMetric(KrausSet kraus, const ToleranceConfig& tol = {});

  const KrausSet& kraus() const { return kraus_; }
  const OperatorSubspace& v1() const { return v1_; }
  const ToleranceConfig& tolerance() const { return tol_; }
  Eigen::Index n() const { return kraus_.n(); }

  /// V_1^m, clamped to the stable power once dimensions stop growing.
  const OperatorSubspace& power(std::size_t m) const;
  /// Computes powers up to stabilization if needed.
  std::size_t stabilization_index() const;
  std::vector<std::size_t> power_dims() const;
  /// Does some power of V_1 fill M_n?
  bool powers_fill_matrix_algebra() const;

  /// Range projection of V_1^m applied to range(p), by iterating V_1.
  Projection expand(const Projection& p, std::size_t m) const;

 private:
  struct Cache {
    std::mutex mu;
    std::vector<std::unique_ptr<OperatorSubspace>> powers;
    std::optional<std::size_t> stable;
  };
  const OperatorSubspace& ensure_power(std::size_t m) const;

  KrausSet kraus_;
  OperatorSubspace v1_;
  ToleranceConfig tol_;
  std::shared_ptr<Cache> cache_;
};

GraphQuantumMetric graph_metric(const KrausSet& kraus, const ToleranceConfig& tol = {});

// ---------------------------------------------------------------------------
// Classical metric spaces

class FiniteMetricSpace {
 public:
  FiniteMetricSpace() = default;
  /// Validates symmetry, zero diagonal, positivity off the diagonal and the
  /// triangle inequality over all triples. Entries may be +inf.
  FiniteMetricSpace(std::vector<std::string> labels, Eigen::MatrixXd d);

  std::size_t size() const { return labels_.size(); }
  const std::vector<std::string>& labels() const { return labels_; }
  const Eigen::MatrixXd& d() const { return d_; }
  double operator()(std::size_t x, std::size_t y) const {
    return d_(static_cast<Eigen::Index>(x), static_cast<Eigen::Index>(y));
  }
  /// Distinct finite distances, ascending (including 0).
  std::vector<double> realized_distances() const;

  static FiniteMetricSpace path(std::size_t n);
  static FiniteMetricSpace from_graph(std::size_t n,
                                      const std::vector<std::pair<std::size_t, std::size_t>>& edges);

 private:
  std::vector<std::string> labels_;
  Eigen::MatrixXd d_;
};

/// The canonical quantum metric on l_inf(X); V_t is represented implicitly
/// by the distance matrix.
struct ClassicalQuantumMetric {
  FiniteMetricSpace space;
  std::size_t size() const { return space.size(); }
};

// ---------------------------------------------------------------------------
// Distance, neighborhoods, diameter

ExtendedDistance dist(const GraphQuantumMetric& metric, const Projection& p, const Projection& q);
ExtendedDistance dist(const ClassicalQuantumMetric& metric, const Subset& s, const Subset& t);
/// Classical backend on projections; both must be diagonal.
ExtendedDistance dist(const ClassicalQuantumMetric& metric, const Projection& p,
                      const Projection& q, const ToleranceConfig& tol = {});

/// Largest integer strictly below eps: the power of V_1 reaching the open
/// eps-neighborhood of an integer-valued metric.
std::size_t neighborhood_power(double eps);

Projection neighborhood(const GraphQuantumMetric& metric, const Projection& p, double eps);
Subset neighborhood(const ClassicalQuantumMetric& metric, const Subset& s, double eps);
Projection neighborhood(const ClassicalQuantumMetric& metric, const Projection& p, double eps,
                        const ToleranceConfig& tol = {});

double diam_classical(const ClassicalQuantumMetric& metric, const Subset& s);

/// k0(P) = min{k : dim span{P B P : B in V_1^k} = rank(P)^2}, a lower bound
/// for diam(P) on connected quantum graphs; +inf if never reached.
ExtendedDistance diam_graph_proxy(const GraphQuantumMetric& metric, const Projection& p);

/// Max of dist(uu^*, vv^*) over sampled unit vectors with Pu, Pv != 0, plus
/// deterministic probes on pairs of range basis vectors. Always a lower
/// bound for diam(P).
ExtendedDistance diam_lower_bound_sampled(const GraphQuantumMetric& metric, const Projection& p,
                                          int trials, std::uint64_t seed);

struct DiameterBracket {
  ExtendedDistance k0;
  ExtendedDistance sampled;
  ExtendedDistance lower;  // max(k0 when connected, sampled)
  bool upper_known = false;
  ExtendedDistance upper = ExtendedDistance::infinite();
  bool connected = false;
  std::string label;
};

DiameterBracket diam_bracket(const GraphQuantumMetric& metric, const Projection& p, int trials,
                             std::uint64_t seed);

// ---------------------------------------------------------------------------
// Direct sums and quotients

/// Block-diagonal Kraus set {K_i (+) 0} u {0 (+) L_j}; trace preserving when
/// both summands are, and V_1 is block diagonal.
GraphQuantumMetric direct_sum(const GraphQuantumMetric& a, const GraphQuantumMetric& b);
/// Disjoint union with +inf cross distances.
ClassicalQuantumMetric direct_sum(const ClassicalQuantumMetric& a, const ClassicalQuantumMetric& b);

Projection embed_left(const Projection& p, Eigen::Index n_right);
Projection embed_right(Eigen::Index n_left, const Projection& q);
Subset shift_subset(const Subset& s, std::size_t offset);

ClassicalQuantumMetric quotient_restrict(const ClassicalQuantumMetric& metric, const Subset& s);

// ---------------------------------------------------------------------------
// Materialized classical V_t (cross-check mode, small spaces only)

/// span{E_xy : d(x,y) <= t} as an operator subspace of M_|X|.
OperatorSubspace classical_vt(const FiniteMetricSpace& space, double t,
                              const ToleranceConfig& tol = {});

/// Distances between all pairs of subsets computed from the materialized
/// V_t, i.e. inf{t : chi_S A chi_T != 0 for some A in V_t}. Limited to
/// |X| <= 6.
class MaterializedClassicalMetric {
 public:
  explicit MaterializedClassicalMetric(const FiniteMetricSpace& space,
                                       const ToleranceConfig& tol = {});

  std::size_t size() const { return n_; }
  /// Subsets are encoded as bitmasks here.
  ExtendedDistance dist(std::uint32_t s, std::uint32_t t) const;
  /// I - join{chi_T : dist(S,T) >= eps}, returned as a support mask.
  std::uint32_t neighborhood(std::uint32_t s, double eps) const;
  /// sup{dist(Q,R) : QP != 0, RP != 0} over subset projections Q, R.
  ExtendedDistance diam(std::uint32_t s) const;

 private:
  std::size_t n_;
  std::uint32_t count_;
  std::vector<ExtendedDistance> table_;
  ToleranceConfig tol_;
};

Subset mask_to_subset(std::uint32_t mask);
std::uint32_t subset_to_mask(const Subset& s);

}  // namespace qcoarse
