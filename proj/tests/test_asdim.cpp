#include "support.hpp"

#include <gtest/gtest.h>

using namespace qcoarse;
using namespace qcoarse::testing;

namespace {

CoverFamily classical_cover(double r, double R, std::vector<std::vector<Subset>> colors) {
  CoverFamily c;
  c.backend = Backend::Classical;
  c.r = r;
  c.R = R;
  c.classical = std::move(colors);
  return c;
}

}  // namespace

TEST(Disjointness, ClassicalMatchesNeighborhoods) {
  const ClassicalQuantumMetric m{FiniteMetricSpace::path(8)};
  EXPECT_TRUE(r_disjoint(m, {0, 1}, {4, 5}, 1.5));
  EXPECT_FALSE(r_disjoint(m, {0, 1}, {3, 4}, 1.5));
  EXPECT_TRUE(r_disjoint(m, {0, 1}, {2, 3}, 1.0));
}

TEST(ValidateCover, ReportsEachFailure) {
  const ClassicalQuantumMetric m{FiniteMetricSpace::path(5)};
  EXPECT_TRUE(validate_cover(m, classical_cover(1.0, 1.0, {{{0, 1}, {3, 4}}, {{2}}})).valid());

  const CoverReport gap = validate_cover(m, classical_cover(1.0, 1.0, {{{0, 1}, {3, 4}}}));
  EXPECT_FALSE(gap.covering);
  EXPECT_EQ(gap.uncovered, (Subset{2}));

  const CoverReport overlap = validate_cover(m, classical_cover(2.0, 1.0, {{{0, 1}, {2, 3}}, {{4}}}));
  EXPECT_FALSE(overlap.disjoint);
  ASSERT_TRUE(overlap.overlap.has_value());
  EXPECT_EQ(overlap.overlap->second.index, 1u);

  const CoverReport big = validate_cover(m, classical_cover(1.0, 1.0, {{{0, 1, 2, 3, 4}}}));
  EXPECT_EQ(big.bounded, BoundCheck::Refuted);
  EXPECT_EQ(big.max_diameter, ExtendedDistance::of(4.0));

  const CoverReport empty = validate_cover(m, classical_cover(1.0, 9.0, {{{0, 1, 2, 3, 4}, {}}}));
  EXPECT_FALSE(empty.members_nonempty);
  EXPECT_FALSE(empty.valid());
}

TEST(ValidateCover, QuantumBoundednessIsOnlyRefuted) {
  const GraphQuantumMetric g(cycle_channel(8));
  CoverFamily c;
  c.backend = Backend::Quantum;
  c.r = 1.0;
  c.R = 10.0;
  c.quantum = {{}};
  for (Eigen::Index i = 0; i < 8; ++i) c.quantum[0].push_back(Projection::basis_vector(8, i));
  const CoverReport ok = validate_cover(g, c);
  EXPECT_TRUE(ok.valid());
  EXPECT_EQ(ok.bounded, BoundCheck::NotRefuted);

  c.quantum = {{Projection::identity(8)}};
  c.R = 0.5;
  const CoverReport bad = validate_cover(g, c);
  EXPECT_EQ(bad.bounded, BoundCheck::Refuted);

  c.quantum = {{embed_left(Projection::identity(4), 4)}};
  c.R = 10.0;
  EXPECT_EQ(validate_cover(g, c).uncovered_rank, 4);
}

TEST(Greedy, ValidOnRandomSpaces) {
  for (std::uint64_t i = 0; i < 30; ++i) {
    Rng rng(1, i);
    const FiniteMetricSpace x = random_point_cloud(rng.index(3, 20), 2, 10.0, rng);
    const double r = 0.3 + 2.0 * rng.uniform();
    const GreedyResult g = greedy_cover(x, r, 64);
    ASSERT_TRUE(g.ok) << g.failure;
    EXPECT_TRUE(validate_cover(ClassicalQuantumMetric{x}, g.cover).valid());
    EXPECT_LE(g.cover.R, 4.0 * r);
  }
  const GreedyResult few = greedy_cover(FiniteMetricSpace::path(30), 2.0, 1);
  EXPECT_FALSE(few.ok);
  EXPECT_FALSE(few.failure.empty());
}

TEST(Asdim, ExactValuesOnPaths) {
  // Open 1.5-neighborhoods of a unit path glue adjacent points.
  const FiniteMetricSpace p8 = FiniteMetricSpace::path(8);
  const AsdimResult a = asdim_at_scale(p8, 1.5);
  EXPECT_TRUE(a.exact);
  EXPECT_EQ(a.value, 1u);
  EXPECT_TRUE(validate_cover(ClassicalQuantumMetric{p8}, a.witness).valid());
  EXPECT_EQ(asdim_at_scale(p8, 1.0).value, 0u);
  EXPECT_EQ(asdim_at_scale(p8, 3.0).value, 0u);
  EXPECT_EQ(asdim_exhaustive(FiniteMetricSpace::path(3), 1.5, 6.0), 0u);
  EXPECT_THROW(asdim_exhaustive(FiniteMetricSpace::path(11), 1.0, 4.0), std::invalid_argument);
}

TEST(Asdim, ExhaustiveNeverAboveGreedy) {
  for (std::uint64_t i = 0; i < 40; ++i) {
    Rng rng(2, i);
    const FiniteMetricSpace x = random_chain(rng.index(2, 9), 0.5, 1.2, rng);
    const AsdimResult a = asdim_at_scale(x, 1.0 + rng.uniform());
    ASSERT_TRUE(a.exhaustive_value && a.greedy_value);
    EXPECT_LE(*a.exhaustive_value, *a.greedy_value);
    EXPECT_EQ(a.value, *a.exhaustive_value);
  }
}

TEST(Saturated, AbsorbsTouchingMembers) {
  const ClassicalQuantumMetric m{FiniteMetricSpace::path(12)};
  const SaturatedResult s = saturated_union(m, {{0, 1}, {4, 5}, {8, 9}}, {{2, 3}}, 1.5, 2.0, 1.0);
  EXPECT_TRUE(s.valid());
  EXPECT_DOUBLE_EQ(s.bound, 1.0 + 2.0 * (2.0 + 1.0 + 6.0));
  ASSERT_EQ(s.color.size(), 2u);
  EXPECT_EQ(s.color[0], (Subset{0, 1, 2, 3, 4, 5}));
  EXPECT_EQ(s.color[1], (Subset{8, 9}));
}

TEST(Saturated, HypothesesRaiseWithClause) {
  const ClassicalQuantumMetric m{FiniteMetricSpace::path(12)};
  try {
    saturated_union(m, {{0, 1}}, {{5}}, 2.0, 2.0, 0.0);
    FAIL() << "R > r must be enforced";
  } catch (const HypothesisError& e) {
    EXPECT_EQ(e.clause(), "R>r");
  }
  EXPECT_THROW(saturated_union(m, {{0, 1}, {2, 3}}, {}, 1.5, 2.0, 0.0), HypothesisError);
  EXPECT_THROW(saturated_union(m, {{0, 1, 2, 3}}, {}, 1.5, 2.0, 0.0), HypothesisError);
  EXPECT_THROW(saturated_union(m, {{0}}, {{2}, {11}}, 0.5, 1.0, 0.0), HypothesisError);
  EXPECT_THROW(saturated_union(m, {{0}}, {{2, 5}}, 0.5, 1.0, 2.0), HypothesisError);
}

TEST(Saturated, QuantumVersion) {
  auto e = [](Eigen::Index n, Eigen::Index i) { return Projection::basis_vector(n, i); };
  // In M_n a rank-one projection is touched by far-apart vectors, so its
  // diameter is not 0; on the disconnected cycle the hypothesis is refuted.
  const GraphQuantumMetric cyc(cycle_channel(16));
  EXPECT_THROW(saturated_union(cyc, {e(16, 0)}, {}, 1.0, 1.5, 0.0), HypothesisError);

  const GraphQuantumMetric g(random_expander(8, 4, 31).kraus());
  const QuantumSaturatedResult s = saturated_union(g, {e(8, 0)}, {e(8, 1)}, 1.5, 50.0, 50.0);
  EXPECT_DOUBLE_EQ(s.bound, 50.0 + 2.0 * (50.0 + 50.0 + 6.0));
  EXPECT_TRUE(s.disjoint);
  EXPECT_NE(s.bounded, BoundCheck::Refuted);
  ASSERT_EQ(s.color.size(), 1u);
  EXPECT_EQ(s.color[0].rank(), 2);  // e1 absorbs e0
}

TEST(Permanence, DirectSumCoverIsValid) {
  const FiniteMetricSpace a = FiniteMetricSpace::path(4), b = FiniteMetricSpace::path(3);
  const CoverFamily ca = greedy_cover(a, 1.5, 8).cover, cb = greedy_cover(b, 1.5, 8).cover;
  const CoverFamily sum = direct_sum_cover(ca, cb, 4, 3);
  const ClassicalQuantumMetric m = direct_sum(ClassicalQuantumMetric{a}, ClassicalQuantumMetric{b});
  EXPECT_EQ(sum.n_colors(), std::max(ca.n_colors(), cb.n_colors()));
  EXPECT_TRUE(validate_cover(m, sum).valid());
}

TEST(Permanence, UnionCoverOfTwoHalves) {
  const FiniteMetricSpace x = FiniteMetricSpace::path(24);
  const ClassicalQuantumMetric m{x};
  CoverFamily c1 = classical_cover(1.5, 2.0, {{{0, 1}, {4, 5}, {8, 9}, {12, 13}, {16, 17}, {20, 21}},
                                              {{2, 3}, {6, 7}, {10, 11}, {14, 15}, {18, 19}, {22, 23}}});
  CoverFamily c2 = classical_cover(14.0, 1.0, {{{6, 7}}});
  const CoverFamily u = union_cover(m, c1, c2, 1.5, 2.0);
  EXPECT_DOUBLE_EQ(u.R, 1.0 + 2.0 * (2.0 + 1.0 + 6.0));
  EXPECT_TRUE(validate_cover(m, u).valid());
}

TEST(Certificate, RefutesObstructedCover) {
  const ExpanderSpec spec = random_expander(8, 4, 21);
  CoverFamily c;
  c.backend = Backend::Quantum;
  c.r = 1.5;
  c.R = 50.0;
  c.quantum = {{}};
  for (Eigen::Index i = 0; i < 8; ++i) c.quantum[0].push_back(Projection::basis_vector(8, i));
  const CountingCertificate cert = certify_counting(spec, c, 1.5, 1);
  EXPECT_TRUE(cert.obstruction);
  EXPECT_FALSE(cert.contradiction);
  EXPECT_FALSE(cert.cover.disjoint);
  EXPECT_EQ(cert.failure.rfind("disjointness", 0), 0u);
  EXPECT_DOUBLE_EQ(cert.eps_prime, (1.0 - cert.epsilon) / 2.0);

  const ExpanderSpec flat = make_expander_spec({Matrix::Identity(8, 8), Matrix::Identity(8, 8)});
  EXPECT_THROW(certify_counting(flat, c, 1.5, 1), std::invalid_argument);
}

TEST(Certificate, ExcludesMembersOutsideTheRegime) {
  const ExpanderSpec spec = random_expander(8, 4, 22);
  CoverFamily c;
  c.backend = Backend::Quantum;
  c.r = 1.5;
  c.R = 50.0;
  c.quantum = {{Projection::identity(8)}};
  const CountingCertificate cert = certify_counting(spec, c, 1.5, 1);
  ASSERT_EQ(cert.excluded.size(), 1u);
  EXPECT_FALSE(cert.all_checks_passed);
  EXPECT_FALSE(cert.contradiction);
  EXPECT_EQ(cert.failure.rfind("precondition", 0), 0u);
}
