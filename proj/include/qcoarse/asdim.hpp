#pragma once

// Colored covers at a fixed scale r: validation, greedy construction, exact
// small-space search, saturated unions, permanence constructions and the
// counting certificate for expanders.

#include "qcoarse/expander.hpp"
#include "qcoarse/qmetric.hpp"

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace qcoarse {

enum class Backend { Classical, Quantum };

std::string to_string(Backend b);

struct CoverFamily {
  Backend backend = Backend::Classical;
  double r = 0.0;
  double R = 0.0;
  std::vector<std::vector<Subset>> classical;     // colors of subsets
  std::vector<std::vector<Projection>> quantum;   // colors of projections
  std::string source;

  std::size_t n_colors() const {
    return backend == Backend::Classical ? classical.size() : quantum.size();
  }
};

/// Raised when a construction's hypotheses fail; `clause` names the failed
/// hypothesis.
class HypothesisError : public std::invalid_argument {
 public:
  HypothesisError(std::string clause, const std::string& what)
      : std::invalid_argument(what), clause_(std::move(clause)) {}
  const std::string& clause() const { return clause_; }

 private:
  std::string clause_;
};

enum class BoundCheck { Pass, NotRefuted, Refuted };
std::string to_string(BoundCheck b);

struct MemberRef {
  std::size_t color = 0;
  std::size_t index = 0;
};

struct CoverReport {
  bool members_nonempty = true;
  std::optional<MemberRef> empty_member;

  bool covering = false;
  Subset uncovered;                  // classical
  Eigen::Index uncovered_rank = 0;   // quantum: n - rank(join)

  bool disjoint = false;
  std::optional<std::pair<MemberRef, MemberRef>> overlap;

  BoundCheck bounded = BoundCheck::Pass;
  std::optional<MemberRef> unbounded_member;
  ExtendedDistance max_diameter = ExtendedDistance::of(0.0);  // exact or lower bound

  bool valid() const {
    return members_nonempty && covering && disjoint && bounded != BoundCheck::Refuted;
  }
};

/// r-disjointness of a single color: are (S)_r and (T)_r disjoint?
bool r_disjoint(const ClassicalQuantumMetric& metric, const Subset& s, const Subset& t, double r);
bool r_disjoint(const GraphQuantumMetric& metric, const Projection& p, const Projection& q,
                double r);

/// Checks covering, r-disjointness per color and R-boundedness with fam.r and
/// fam.R. Classical diameters are exact.
CoverReport validate_cover(const ClassicalQuantumMetric& metric, const CoverFamily& fam);
/// Quantum boundedness uses certified diameter lower bounds (k0 on connected
/// graphs plus sampling), so a pass reads "not refuted".
CoverReport validate_cover(const GraphQuantumMetric& metric, const CoverFamily& fam,
                           int diam_trials = 8, std::uint64_t seed = 0);

struct GreedyResult {
  bool ok = false;
  CoverFamily cover;
  std::string failure;
};

/// Per color, seeds uncovered points in index order; each cluster is the
/// closed 2r-ball around its seed, restricted to uncovered points at distance
/// >= 2r from the clusters already placed in that color.
GreedyResult greedy_cover(const FiniteMetricSpace& space, double r, std::size_t max_colors);

struct AsdimResult {
  double r = 0.0;
  double R_bound = 0.0;
  std::size_t value = 0;   // colors - 1
  bool exact = false;      // from exhaustive search
  std::optional<std::size_t> greedy_value;
  std::optional<std::size_t> exhaustive_value;
  CoverFamily witness;
};

/// Least (colors - 1) over valid r-disjoint covers whose members have
/// diameter <= R_bound (default 4r, the greedy guarantee). Exhaustive over
/// set partitions when |X| <= exhaustive_limit (at most 10).
AsdimResult asdim_at_scale(const FiniteMetricSpace& space, double r,
                           std::optional<double> R_bound = std::nullopt,
                           std::size_t exhaustive_limit = 10);

/// Only the exhaustive search; throws for |X| > 10.
std::size_t asdim_exhaustive(const FiniteMetricSpace& space, double r, double R_bound,
                             CoverFamily* witness = nullptr);

struct SaturatedResult {
  std::vector<Subset> color;
  double bound = 0.0;  // D + 2(R + D + 4r)
  bool disjoint = false;
  bool bounded = false;
  bool valid() const { return disjoint && bounded; }
};

/// Q u_r P: each Q absorbs every P with (P)_r and (Q)_r intersecting; the
/// untouched P are kept. Hypotheses (P r-disjoint R-bounded with R > r, Q
/// 7R-disjoint D-bounded) are checked first and raise HypothesisError.
SaturatedResult saturated_union(const ClassicalQuantumMetric& metric,
                                const std::vector<Subset>& p_fam,
                                const std::vector<Subset>& q_fam, double r, double R, double D);

struct QuantumSaturatedResult {
  std::vector<Projection> color;
  double bound = 0.0;
  bool disjoint = false;
  BoundCheck bounded = BoundCheck::NotRefuted;
};

/// Same construction on a quantum graph metric. Boundedness hypotheses can
/// only be refuted (certified lower bounds), never confirmed.
QuantumSaturatedResult saturated_union(const GraphQuantumMetric& metric,
                                       const std::vector<Projection>& p_fam,
                                       const std::vector<Projection>& q_fam, double r, double R,
                                       double D, int diam_trials = 8, std::uint64_t seed = 0);

/// Color-wise union of {P (+) 0} and {0 (+) Q}; the shorter family is padded
/// with empty colors. `left_size` is |X| or n of the left summand.
CoverFamily direct_sum_cover(const CoverFamily& left, const CoverFamily& right,
                             std::size_t left_size, std::size_t right_size);

/// Cover of M = N1 u N2 (subsets of X whose union is X) from an r-disjoint
/// R-bounded cover of N1 and a 7R-disjoint cover of N2, by color-wise
/// saturated union. The output has R = D + 2(R + D + 4r) with D = cov2.R.
CoverFamily union_cover(const ClassicalQuantumMetric& metric, const CoverFamily& cov1,
                        const CoverFamily& cov2, double r, double R);

struct CountingCertificate {
  std::size_t n_colors = 0;
  std::size_t m = 0;
  double delta = 0.0;
  double epsilon = 0.0;
  double eps_prime = 0.0;
  Eigen::Index ambient_rank = 0;
  double r_used = 0.0;  // m * delta
  std::vector<Eigen::Index> per_color_rank_sums;
  std::vector<Eigen::Index> per_color_nbhd_rank_sums;
  std::vector<bool> per_color_sum_within_ambient;
  std::vector<bool> per_color_growth;
  std::vector<MemberRef> excluded;  // chain rank exceeded n/2
  CoverReport cover;                // validation at r = m delta
  bool obstruction = false;         // (1 + eps')^m - 1 > colors - 1
  bool all_checks_passed = false;
  bool contradiction = false;
  std::string failure;              // first failed check, empty if none
};

/// Requires a measured gap epsilon > 0; eps' = (1 - epsilon)/2 from the
/// re-measured gap.
CountingCertificate certify_counting(const ExpanderSpec& spec, const CoverFamily& fam,
                                     double delta, std::size_t m,
                                     const ToleranceConfig& tol = {}, std::uint64_t seed = 0);
/// Same, on a prebuilt metric with its measured gap.
CountingCertificate certify_counting(const GraphQuantumMetric& metric, double epsilon,
                                     const CoverFamily& fam, double delta, std::size_t m,
                                     std::uint64_t seed = 0);

}  // namespace qcoarse
