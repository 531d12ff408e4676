#pragma once

// Spectral gaps, Cheeger quantities, connectivity of quantum graphs, random
// expanders (quantum and classical) and the rank-growth verifiers.

#include "qcoarse/qmetric.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace qcoarse {

// ---------------------------------------------------------------------------
// Spectral gap

struct GapReport {
  double epsilon = 0.0;
  double top_traceless_singular_value = 1.0;
  bool unital = false;
  bool trace_preserving = false;
};

/// n^2 x n^2 matrix of X -> sum K X K^* acting on column-stacked vec(X):
/// sum conj(K) (x) K.
Matrix superoperator(const KrausSet& kraus);

/// 1 - largest singular value of the superoperator compressed to the
/// traceless matrices. Non-unital channels are measured but flagged.
GapReport spectral_gap(const KrausSet& kraus, const ToleranceConfig& tol = {});

// ---------------------------------------------------------------------------
// Cheeger

struct CheegerValue {
  double trace_form = 0.0;  // tr((I-P) Phi^* Phi(P)) / tr(P)
  double inner_form = 0.0;  // <Phi(P), Phi(I-P)>_HS / tr(P)
};

/// Requires 0 < rank(p) <= n/2. Throws std::logic_error when the two forms
/// disagree by more than 1e-9.
CheegerValue cheeger_quantity(const KrausSet& kraus, const Projection& p);

struct CheegerScan {
  double bound = 0.0;  // (1 - epsilon) / 2
  double epsilon = 0.0;
  std::size_t tested = 0;
  std::size_t violations = 0;
  double min_value = 0.0;
  double min_margin = 0.0;  // min over tested P of value - bound
  Subset worst_support;     // only for diagonal scans
};

/// Every diagonal projection with 0 < rank <= n/2 (n <= 20).
CheegerScan cheeger_scan_diagonal(const KrausSet& kraus, double epsilon, double slack = 1e-9);
/// Haar-random projections with rank uniform on {1..floor(n/2)}.
CheegerScan cheeger_scan_random(const KrausSet& kraus, double epsilon, std::size_t trials,
                                std::uint64_t seed, double slack = 1e-9);

// ---------------------------------------------------------------------------
// Connectivity

struct ConnectivityReport {
  bool connected = false;            // power criterion
  bool commutant_trivial = false;    // commutant criterion
  bool criteria_agree = false;
  std::vector<std::size_t> power_dims;
  std::optional<std::size_t> m_star;  // min m with dim v^m = n^2
  std::size_t commutant_dim = 0;
  std::optional<Projection> witness;  // P with P B (I-P) = 0 for all B in v
  double witness_residual = 0.0;      // max_B ||P B (I-P)||_F
};

ConnectivityReport is_connected(const OperatorSubspace& v1, const ToleranceConfig& tol = {});

// ---------------------------------------------------------------------------
// Quantum expanders

struct ExpanderSpec {
  Eigen::Index n = 0;
  std::size_t d = 0;
  std::vector<Matrix> unitaries;
  double epsilon = 0.0;

  /// {U_j / sqrt(d)}
  KrausSet kraus(const ToleranceConfig& tol = {}) const;
};

/// Checks unitarity of every U and measures the gap.
ExpanderSpec make_expander_spec(std::vector<Matrix> unitaries, const ToleranceConfig& tol = {});

/// d Haar-random unitaries; requires n >= 2 and d >= 2.
ExpanderSpec random_expander(Eigen::Index n, std::size_t d, std::uint64_t seed,
                             const ToleranceConfig& tol = {});

/// Mixed-unitary channel (1/d) sum P_s X P_s^* for permutations s of {0..n-1}.
KrausSet permutation_channel(const std::vector<std::vector<std::size_t>>& perms,
                             const ToleranceConfig& tol = {});

/// Kraus set {E_ij / sqrt(n)}: X -> tr(X) I / n.
KrausSet depolarizing_channel(Eigen::Index n, const ToleranceConfig& tol = {});

// ---------------------------------------------------------------------------
// Classical regular graphs

struct RegularGraph {
  std::size_t n = 0;
  std::size_t d = 0;
  std::vector<std::pair<std::size_t, std::size_t>> edges;
  FiniteMetricSpace space;

  Eigen::MatrixXd adjacency() const;
};

/// Uniform pairing of n*d half-edges, resampled until the result is simple
/// and connected. Throws std::runtime_error after `max_retries`.
RegularGraph random_regular_graph(std::size_t n, std::size_t d, std::uint64_t seed,
                                  std::size_t max_retries = 10000);
RegularGraph cycle_graph(std::size_t n);
RegularGraph complete_graph(std::size_t n);

struct ClassicalGap {
  std::vector<double> eigenvalues;  // adjacency, descending
  double two_sided = 0.0;           // 1 - max_{k>=2} |lambda_k| / d
  double one_sided = 0.0;           // 1 - lambda_2 / d
};

ClassicalGap classical_gap(const RegularGraph& g);

struct VertexExpansionReport {
  double delta = 0.0;
  double eps_prime = 0.0;
  std::size_t tested = 0;
  std::size_t violations = 0;
  double min_ratio = 0.0;
  Subset worst;
};

/// |{x : d(x,S) < delta}| >= (1 + eps_prime)|S| over all S with |S| <= n/2
/// (n <= 20).
VertexExpansionReport vertex_expansion(const FiniteMetricSpace& space, double delta,
                                       double eps_prime);

// ---------------------------------------------------------------------------
// Isoperimetric verifiers

struct IsoperimetricReport {
  double delta = 0.0;
  double epsilon = 0.0;
  double eps_prime = 0.0;
  bool gap_positive = false;  // precondition epsilon > 0
  std::size_t trials = 0;
  std::size_t violations = 0;
  double min_ratio = 0.0;
  std::size_t orthogonality_pairs = 0;
  std::size_t orthogonality_violations = 0;
  double max_orthogonality_residual = 0.0;
};

/// Samples Haar-random projections with rank <= n/2 and checks
/// rank((P)_delta) >= (1 + eps') rank(P). For every sample, a projection Q
/// inside the complement of (P)_delta gives a pair with dist >= delta on
/// which |<Phi(P), Phi(Q)>_HS| must vanish.
IsoperimetricReport verify_isoperimetric(const ExpanderSpec& spec, double delta,
                                         std::size_t trials, std::uint64_t seed,
                                         const ToleranceConfig& tol = {});

struct IteratedReport {
  std::vector<Eigen::Index> ranks;  // rank((P)_{k delta}), k = 0..
  std::vector<bool> step_ok;
  bool all_ok = false;
  bool precondition_exhausted = false;  // rank exceeded n/2 before step m
};

IteratedReport iterated_isoperimetric(const GraphQuantumMetric& metric, const Projection& p,
                                      double delta, std::size_t m, double eps_prime);

struct RankDiameterReport {
  ExtendedDistance k0;
  Eigen::Index rank = 0;
  std::size_t n_kraus = 0;
  std::size_t dim_vk0 = 0;
  bool rank_bound = false;     // rank <= N^k0
  bool square_bound = false;   // rank^2 <= dim V_1^k0
  bool bound_ok() const { return rank_bound && square_bound; }
};

/// Throws std::invalid_argument when k0 is infinite.
RankDiameterReport verify_rank_diameter(const GraphQuantumMetric& metric, const Projection& p);

}  // namespace qcoarse
