#include "support.hpp"

#include <gtest/gtest.h>

using namespace qcoarse;
using namespace qcoarse::testing;

TEST(ExtendedDistance, OrderingAndConversion) {
  const auto inf = ExtendedDistance::infinite();
  EXPECT_TRUE(ExtendedDistance::of(3.0) < inf);
  EXPECT_FALSE(inf < inf);
  EXPECT_EQ(ExtendedDistance::from_double(kInf), inf);
  EXPECT_EQ(max(ExtendedDistance::of(1.0), ExtendedDistance::of(2.0)), ExtendedDistance::of(2.0));
  EXPECT_EQ(inf.to_string(), "inf");
  EXPECT_THROW(ExtendedDistance::from_double(std::nan("")), std::invalid_argument);
}

TEST(KrausSet, ResidualsAndRejection) {
  const KrausSet dep = depolarizing_channel(3);
  EXPECT_TRUE(dep.trace_preserving());
  EXPECT_TRUE(dep.unital());
  const Matrix rho = Matrix::Identity(3, 3) / 3.0;
  Rng rng(1);
  const Matrix x = ginibre(3, 3, rng);
  EXPECT_LT((dep.apply(x) - x.trace() * rho).norm(), 1e-12);

  // A non-unital amplitude-damping pair.
  Matrix k0 = Matrix::Zero(2, 2), k1 = Matrix::Zero(2, 2);
  k0(0, 0) = 1.0;
  k0(1, 1) = std::sqrt(0.5);
  k1(0, 1) = std::sqrt(0.5);
  const KrausSet ad({k0, k1});
  EXPECT_TRUE(ad.trace_preserving());
  EXPECT_FALSE(ad.unital());

  EXPECT_THROW(GraphQuantumMetric(KrausSet({2.0 * Matrix::Identity(2, 2)})), std::invalid_argument);
  EXPECT_THROW(KrausSet({Matrix::Identity(2, 2), Matrix::Identity(3, 3)}), DimensionError);
}

TEST(GraphMetric, CycleDistancesOnBasisVectors) {
  const GraphQuantumMetric g(cycle_channel(10));
  // V_1 moves a site by at most 2 steps, so dist(e_0, e_j) = ceil(min(j, 10 - j) / 2).
  for (Eigen::Index j = 0; j < 10; ++j) {
    const double hops = std::ceil(static_cast<double>(std::min(j, 10 - j)) / 2.0);
    EXPECT_EQ(dist(g, Projection::basis_vector(10, 0), Projection::basis_vector(10, j)),
              ExtendedDistance::of(hops))
        << "j=" << j;
  }
}

TEST(GraphMetric, NeighborhoodsOfCycle) {
  const GraphQuantumMetric g(cycle_channel(10));
  const Projection e0 = Projection::basis_vector(10, 0);
  EXPECT_EQ(neighborhood_power(0.5), 0u);
  EXPECT_EQ(neighborhood_power(1.0), 0u);
  EXPECT_EQ(neighborhood_power(1.5), 1u);
  EXPECT_EQ(neighborhood_power(3.0), 2u);
  EXPECT_EQ(neighborhood(g, e0, 1.0).rank(), 1);
  EXPECT_EQ(neighborhood(g, e0, 1.5).rank(), 5);
  EXPECT_EQ(neighborhood(g, e0, 2.5).rank(), 9);
  EXPECT_THROW(neighborhood(g, e0, 0.0), std::invalid_argument);
}

TEST(GraphMetric, DisconnectedPairIsInfinitelyFar) {
  const KrausSet a = cycle_channel(3), b = cycle_channel(4);
  const GraphQuantumMetric g = direct_sum(GraphQuantumMetric(a), GraphQuantumMetric(b));
  EXPECT_EQ(g.n(), 7);
  const Projection left = embed_left(Projection::basis_vector(3, 0), 4);
  const Projection right = embed_right(3, Projection::basis_vector(4, 2));
  EXPECT_FALSE(dist(g, left, right).finite());
  EXPECT_FALSE(g.powers_fill_matrix_algebra());
  EXPECT_FALSE(diam_graph_proxy(g, Projection::identity(7)).finite());
}

TEST(GraphMetric, PowerCacheIsSharedAndMonotone) {
  Rng rng(2);
  const GraphQuantumMetric g(random_mixed_unitary(4, 3, rng));
  const GraphQuantumMetric copy = g;
  const auto dims = copy.power_dims();
  EXPECT_EQ(dims.front(), 1u);
  EXPECT_EQ(dims.back(), 16u);
  EXPECT_TRUE(g.powers_fill_matrix_algebra());
  EXPECT_EQ(&g.power(100), &g.power(g.stabilization_index()));
}

TEST(GraphMetric, DiameterBracketOrdersBounds) {
  // Circulants form a commutative algebra, so the cycle is disconnected.
  EXPECT_FALSE(diam_bracket(GraphQuantumMetric(cycle_channel(10)), Projection::basis_vector(10, 0), 4, 1).connected);
  const GraphQuantumMetric g(random_expander(10, 3, 8).kraus());
  Rng rng(3);
  const Projection p = localized_projection(10, {0, 1, 5}, 2, rng);
  const DiameterBracket b = diam_bracket(g, p, 16, 7);
  EXPECT_TRUE(b.connected);
  EXPECT_TRUE(b.k0 <= b.lower);
  EXPECT_TRUE(b.sampled <= b.lower);
  EXPECT_TRUE(b.lower.finite());
  EXPECT_FALSE(b.label.empty());
  const DiameterBracket whole = diam_bracket(g, Projection::identity(10), 64, 1);
  EXPECT_TRUE(b.lower <= whole.lower);
}

TEST(FiniteMetricSpace, Validation) {
  Eigen::MatrixXd d(3, 3);
  d << 0, 1, 5, 1, 0, 1, 5, 1, 0;  // triangle fails
  EXPECT_THROW(FiniteMetricSpace(labels(3), d), std::invalid_argument);
  d << 0, 1, 2, 1, 0, 1, 2, 1, 0;
  EXPECT_NO_THROW(FiniteMetricSpace(labels(3), d));
  d(0, 1) = 0.0;
  d(1, 0) = 0.0;
  EXPECT_THROW(FiniteMetricSpace(labels(3), d), std::invalid_argument);
  d << 0, 1, 2, 2, 0, 1, 2, 1, 0;  // asymmetric
  EXPECT_THROW(FiniteMetricSpace(labels(3), d), std::invalid_argument);
  EXPECT_THROW(FiniteMetricSpace(labels(2), Eigen::MatrixXd::Zero(3, 3)), std::invalid_argument);
}

TEST(FiniteMetricSpace, PathAndGraph) {
  const auto p = FiniteMetricSpace::path(5);
  EXPECT_EQ(p(0, 4), 4.0);
  const auto g = FiniteMetricSpace::from_graph(4, {{0, 1}, {1, 2}});
  EXPECT_EQ(g(0, 2), 2.0);
  EXPECT_EQ(g(0, 3), kInf);
  EXPECT_EQ(p.realized_distances(), (std::vector<double>{0, 1, 2, 3, 4}));
}

TEST(ClassicalMetric, SetFormulas) {
  const ClassicalQuantumMetric m{FiniteMetricSpace::path(6)};
  EXPECT_EQ(dist(m, Subset{0, 1}, Subset{4}), ExtendedDistance::of(3.0));
  EXPECT_EQ(neighborhood(m, Subset{2}, 1.5), (Subset{1, 2, 3}));
  EXPECT_EQ(neighborhood(m, Subset{2}, 1.0), (Subset{2}));
  EXPECT_EQ(diam_classical(m, Subset{1, 4}), 3.0);
  EXPECT_THROW(dist(m, Subset{}, Subset{1}), std::invalid_argument);
  const Projection p = Projection::diagonal(6, Subset{0});
  const Projection q = Projection::diagonal(6, Subset{5});
  EXPECT_EQ(dist(m, p, q), ExtendedDistance::of(5.0));
  Rng rng(4);
  EXPECT_THROW(dist(m, random_projection(6, 2, rng), q), std::invalid_argument);
}

TEST(ClassicalMetric, DirectSumAndRestriction) {
  const ClassicalQuantumMetric a{FiniteMetricSpace::path(2)}, b{FiniteMetricSpace::path(3)};
  const ClassicalQuantumMetric s = direct_sum(a, b);
  EXPECT_EQ(s.size(), 5u);
  EXPECT_EQ(s.space(0, 2), kInf);
  EXPECT_EQ(s.space(3, 4), 1.0);
  EXPECT_EQ(shift_subset({0, 2}, 2), (Subset{2, 4}));
  const ClassicalQuantumMetric r = quotient_restrict(ClassicalQuantumMetric{FiniteMetricSpace::path(5)}, {0, 4});
  EXPECT_EQ(r.size(), 2u);
  EXPECT_EQ(r.space(0, 1), 4.0);
}

TEST(MaterializedMetric, AgreesWithFormulasOnPath) {
  const FiniteMetricSpace x = FiniteMetricSpace::path(4);
  const MaterializedClassicalMetric mm(x);
  EXPECT_EQ(mm.dist(0b0001, 0b1000), ExtendedDistance::of(3.0));
  EXPECT_EQ(mm.dist(0b0011, 0b0010), ExtendedDistance::of(0.0));
  EXPECT_EQ(mm.neighborhood(0b0001, 2.0), 0b0011u);
  EXPECT_EQ(mm.diam(0b1001), ExtendedDistance::of(3.0));
  EXPECT_EQ(subset_to_mask(mask_to_subset(0b1010)), 0b1010u);
  // V_t at the threshold 1 contains E_01 but not E_02.
  const OperatorSubspace v1 = classical_vt(x, 1.0);
  Matrix e01 = Matrix::Zero(4, 4), e02 = Matrix::Zero(4, 4);
  e01(0, 1) = 1.0;
  e02(0, 2) = 1.0;
  EXPECT_TRUE(v1.contains(e01, {}));
  EXPECT_FALSE(v1.contains(e02, {}));
  EXPECT_THROW(MaterializedClassicalMetric(FiniteMetricSpace::path(7)), std::invalid_argument);
}

TEST(Laws, NeighborhoodCompositionOnExpander) {
  const ExpanderSpec spec = random_expander(6, 3, 99);
  const GraphQuantumMetric g(spec.kraus());
  ToleranceConfig tol;
  for (std::uint64_t i = 0; i < 40; ++i) {
    Rng rng(5, i);
    const Projection p = random_projection(6, 1 + static_cast<Eigen::Index>(i % 3), rng);
    const double e = 0.5 + 2.0 * rng.uniform(), d = 0.5 + 2.0 * rng.uniform();
    EXPECT_TRUE(proj_leq(neighborhood(g, neighborhood(g, p, e), d), neighborhood(g, p, e + d), tol));
  }
}
