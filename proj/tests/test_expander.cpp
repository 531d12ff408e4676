#include "support.hpp"

#include <gtest/gtest.h>

using namespace qcoarse;
using namespace qcoarse::testing;

TEST(Gap, FixturesAndOracle) {
  EXPECT_NEAR(spectral_gap(KrausSet({Matrix::Identity(3, 3)})).epsilon, 0.0, 1e-12);
  EXPECT_NEAR(spectral_gap(depolarizing_channel(4)).epsilon, 1.0, 1e-12);
  const KrausSet perm = permutation_channel({{1, 2, 0}, {0, 2, 1}});
  EXPECT_NEAR(spectral_gap(perm).epsilon, 0.0, 1e-12);
  for (std::uint64_t i = 0; i < 10; ++i) {
    Rng rng(1, i);
    const KrausSet k = random_mixed_unitary(2 + static_cast<Eigen::Index>(i % 5), 3, rng);
    EXPECT_NEAR(spectral_gap(k).epsilon, gap_oracle(k), 1e-10);
  }
}

TEST(Gap, SuperoperatorActsOnColumnStackedVec) {
  Rng rng(2);
  const KrausSet k = random_mixed_unitary(3, 2, rng);
  const Matrix x = ginibre(3, 3, rng);
  EXPECT_LT((superoperator(k) * vec(x) - vec(k.apply(x))).norm(), 1e-12);
}

TEST(Gap, NonUnitalIsFlagged) {
  Matrix k0 = Matrix::Zero(2, 2), k1 = Matrix::Zero(2, 2);
  k0(0, 0) = 1.0;
  k0(1, 1) = std::sqrt(0.3);
  k1(0, 1) = std::sqrt(0.7);
  const GapReport g = spectral_gap(KrausSet({k0, k1}));
  EXPECT_TRUE(g.trace_preserving);
  EXPECT_FALSE(g.unital);
}

TEST(Cheeger, FormsAgreeAndDiagonalScanIsExhaustive) {
  const ExpanderSpec spec = random_expander(6, 4, 5);
  const KrausSet k = spec.kraus();
  Rng rng(3);
  const CheegerValue v = cheeger_quantity(k, random_projection(6, 2, rng));
  EXPECT_NEAR(v.trace_form, v.inner_form, 1e-9);
  EXPECT_GE(v.trace_form, 0.0);
  const CheegerScan s = cheeger_scan_diagonal(k, spec.epsilon);
  EXPECT_EQ(s.tested, 6u + 15u + 20u);  // ranks 1..3 of 6
  EXPECT_DOUBLE_EQ(s.bound, (1.0 - spec.epsilon) / 2.0);
  EXPECT_THROW(cheeger_quantity(k, random_projection(6, 4, rng)), std::invalid_argument);
}

TEST(Cheeger, RankCorrectedSpectralBoundHolds) {
  // value >= (1 - k/n)(1 - sigma^2) follows from TP + unital + the gap.
  const ExpanderSpec spec = random_expander(8, 4, 6);
  const KrausSet k = spec.kraus();
  const double sigma = 1.0 - spectral_gap(k).epsilon;
  for (std::uint64_t t = 0; t < 200; ++t) {
    Rng rng(4, t);
    const auto r = static_cast<Eigen::Index>(rng.index(1, 4));
    const double v = cheeger_quantity(k, random_projection(8, r, rng)).trace_form;
    EXPECT_GE(v, (1.0 - r / 8.0) * (1.0 - sigma * sigma) - 1e-9);
  }
}

TEST(Connectivity, CriteriaAndWitness) {
  Rng rng(5);
  const GraphQuantumMetric conn(random_mixed_unitary(4, 3, rng));
  const ConnectivityReport a = is_connected(conn.v1());
  EXPECT_TRUE(a.connected);
  EXPECT_TRUE(a.commutant_trivial);
  EXPECT_TRUE(a.criteria_agree);
  EXPECT_FALSE(a.witness.has_value());
  ASSERT_TRUE(a.m_star.has_value());

  std::vector<Matrix> ops;
  const KrausSet l = random_mixed_unitary(2, 2, rng), r = random_mixed_unitary(3, 2, rng);
  for (const auto& op : l.ops()) ops.push_back(block_diag(op, Matrix::Zero(3, 3)));
  for (const auto& op : r.ops()) ops.push_back(block_diag(Matrix::Zero(2, 2), op));
  const KrausSet k(std::move(ops));
  const GraphQuantumMetric disc(k);
  const ConnectivityReport b = is_connected(disc.v1());
  EXPECT_FALSE(b.connected);
  EXPECT_FALSE(b.commutant_trivial);
  EXPECT_GE(b.commutant_dim, 2u);
  ASSERT_TRUE(b.witness.has_value());
  const Matrix p = b.witness->matrix(), q = Matrix::Identity(5, 5) - p;
  for (const auto& bb : disc.v1().basis()) EXPECT_LT((p * bb * q).norm(), 1e-9);
  EXPECT_LT(std::abs(hs_inner(k.apply(p), k.apply(q))), 1e-9);
}

TEST(Expanders, RandomSpecIsUnitaryAndDeterministic) {
  const ExpanderSpec a = random_expander(5, 3, 42), b = random_expander(5, 3, 42);
  ASSERT_EQ(a.unitaries.size(), 3u);
  for (std::size_t j = 0; j < 3; ++j) {
    EXPECT_EQ((a.unitaries[j] - b.unitaries[j]).norm(), 0.0);
    EXPECT_LT((a.unitaries[j].adjoint() * a.unitaries[j] - Matrix::Identity(5, 5)).norm(), 1e-12);
  }
  EXPECT_GT(a.epsilon, 0.0);
  EXPECT_TRUE(a.kraus().trace_preserving());
  EXPECT_THROW(random_expander(1, 3, 1), std::invalid_argument);
  EXPECT_THROW(random_expander(4, 1, 1), std::invalid_argument);
  EXPECT_THROW(make_expander_spec({2.0 * Matrix::Identity(2, 2)}), std::invalid_argument);
}

TEST(Graphs, RegularAndGaps) {
  const RegularGraph g = random_regular_graph(12, 3, 7);
  EXPECT_EQ(g.edges.size(), 18u);
  const Eigen::MatrixXd a = g.adjacency();
  for (Eigen::Index i = 0; i < 12; ++i) EXPECT_EQ(a.row(i).sum(), 3.0);
  EXPECT_EQ(a.diagonal().sum(), 0.0);
  EXPECT_TRUE(std::isfinite(g.space.d().maxCoeff()));

  const ClassicalGap c6 = classical_gap(cycle_graph(6));
  EXPECT_NEAR(c6.eigenvalues.front(), 2.0, 1e-12);
  EXPECT_NEAR(c6.two_sided, 0.0, 1e-12);  // bipartite: -2 is an eigenvalue
  EXPECT_NEAR(c6.one_sided, 0.5, 1e-12);   // 1 - cos(2 pi / 6)
  const ClassicalGap k5 = classical_gap(complete_graph(5));
  EXPECT_NEAR(k5.two_sided, 0.75, 1e-12);
  EXPECT_THROW(random_regular_graph(5, 3, 1), std::invalid_argument);
}

TEST(Graphs, VertexExpansionOfCompleteGraph) {
  const VertexExpansionReport r = vertex_expansion(complete_graph(6).space, 1.5, 0.9);
  EXPECT_EQ(r.violations, 0u);
  EXPECT_NEAR(r.min_ratio, 2.0, 1e-12);  // |S| = 3 grows to 6
  const VertexExpansionReport c = vertex_expansion(cycle_graph(10).space, 1.5, 0.5);
  EXPECT_GT(c.violations, 0u);
}

TEST(Isoperimetric, GrowthOnExpander) {
  const ExpanderSpec spec = random_expander(8, 4, 11);
  const IsoperimetricReport r = verify_isoperimetric(spec, 1.5, 60, 3);
  EXPECT_TRUE(r.gap_positive);
  EXPECT_EQ(r.violations, 0u);
  EXPECT_EQ(r.orthogonality_violations, 0u);
  EXPECT_GE(r.min_ratio, 1.0 + r.eps_prime);
  EXPECT_THROW(verify_isoperimetric(spec, 1.0, 10, 1), std::invalid_argument);
}

TEST(Isoperimetric, IteratedStopsPastHalfRank) {
  const ExpanderSpec spec = random_expander(16, 4, 12);
  const GraphQuantumMetric g(spec.kraus());
  const double eps_prime = (1.0 - spectral_gap(spec.kraus()).epsilon) / 2.0;
  const IteratedReport r = iterated_isoperimetric(g, Projection::basis_vector(16, 0), 1.5, 3, eps_prime);
  ASSERT_GE(r.ranks.size(), 2u);
  EXPECT_EQ(r.ranks.front(), 1);
  EXPECT_TRUE(r.step_ok.front());
  EXPECT_TRUE(r.precondition_exhausted);  // rank 13 after one step is already above n/2
  EXPECT_FALSE(r.all_ok);
}

TEST(RankDiameter, BoundsOnExpander) {
  const ExpanderSpec spec = random_expander(8, 3, 13);
  const GraphQuantumMetric g(spec.kraus());
  for (std::uint64_t t = 0; t < 20; ++t) {
    Rng rng(6, t);
    const RankDiameterReport r =
        verify_rank_diameter(g, random_projection(8, static_cast<Eigen::Index>(rng.index(1, 8)), rng));
    EXPECT_TRUE(r.bound_ok());
  }
  const GraphQuantumMetric disc(KrausSet({Matrix::Identity(3, 3)}));
  EXPECT_THROW(verify_rank_diameter(disc, Projection::identity(3)), std::invalid_argument);
}
