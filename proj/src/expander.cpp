#include "qcoarse/expander.hpp"

#include "qcoarse/random.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include <algorithm>
#include <bit>
#include <cmath>
#include <set>
#include <sstream>
#include <stdexcept>

namespace qcoarse {

Matrix superoperator(const KrausSet& kraus) {
  const Eigen::Index n = kraus.n();
  Matrix s = Matrix::Zero(n * n, n * n);
  for (const auto& k : kraus.ops()) {
    const Matrix kc = k.conjugate();
    for (Eigen::Index a = 0; a < n; ++a) {
      for (Eigen::Index b = 0; b < n; ++b) {
        s.block(a * n, b * n, n, n) += kc(a, b) * k;
      }
    }
  }
  return s;
}

GapReport spectral_gap(const KrausSet& kraus, const ToleranceConfig& tol) {
  if (!kraus.trace_preserving()) {
    std::ostringstream os;
    os << "spectral_gap: Kraus set is not trace preserving (residual " << kraus.tp_residual()
       << ")";
    throw std::invalid_argument(os.str());
  }
  (void)tol;
  const Eigen::Index n = kraus.n();
  const Matrix s = superoperator(kraus);
  const Vector v = vec(Matrix::Identity(n, n)) / std::sqrt(static_cast<double>(n));
  // (I - vv^*) S (I - vv^*)
  const Vector sv = s * v;
  const Eigen::RowVectorXcd vs = v.adjoint() * s;
  const Complex vsv = v.dot(sv);
  Matrix c = s - v * vs - sv * v.adjoint() + vsv * (v * v.adjoint());

  GapReport r;
  r.trace_preserving = true;
  r.unital = kraus.unital();
  if (n == 1) {
    r.top_traceless_singular_value = 0.0;
    r.epsilon = 1.0;
    return r;
  }
  Eigen::BDCSVD<Matrix> svd(c);
  r.top_traceless_singular_value = svd.singularValues()(0);
  r.epsilon = 1.0 - r.top_traceless_singular_value;
  return r;
}

// ---------------------------------------------------------------------------

CheegerValue cheeger_quantity(const KrausSet& kraus, const Projection& p) {
  require_same_ambient(p.ambient_dim(), kraus.n(), "cheeger_quantity");
  const Eigen::Index n = kraus.n();
  const Eigen::Index k = p.rank();
  if (k == 0 || 2 * k > n) {
    throw std::invalid_argument("cheeger_quantity: requires 0 < rank(P) <= n/2");
  }
  const Matrix pm = p.matrix();
  const Matrix qm = Matrix::Identity(n, n) - pm;
  const Matrix phi_p = kraus.apply(pm);
  CheegerValue v;
  v.trace_form = (qm * kraus.apply_adjoint(phi_p)).trace().real() / static_cast<double>(k);
  v.inner_form = hs_inner(phi_p, kraus.apply(qm)).real() / static_cast<double>(k);
  if (std::abs(v.trace_form - v.inner_form) > 1e-9) {
    std::ostringstream os;
    os << "cheeger_quantity: trace form " << v.trace_form << " and inner-product form "
       << v.inner_form << " disagree";
    throw std::logic_error(os.str());
  }
  return v;
}

namespace {

void record(CheegerScan& s, double value) {
  const double margin = value - s.bound;
  if (s.tested == 0 || value < s.min_value) s.min_value = value;
  if (s.tested == 0 || margin < s.min_margin) s.min_margin = margin;
  ++s.tested;
}

}  // namespace

CheegerScan cheeger_scan_diagonal(const KrausSet& kraus, double epsilon, double slack) {
  const auto n = static_cast<std::size_t>(kraus.n());
  if (n > 20) throw std::invalid_argument("cheeger_scan_diagonal: n <= 20 required");
  CheegerScan s;
  s.epsilon = epsilon;
  s.bound = (1.0 - epsilon) / 2.0;
  for (std::uint32_t mask = 1; mask < (1u << n); ++mask) {
    if (2 * static_cast<std::size_t>(std::popcount(mask)) > n) continue;
    const Subset support = mask_to_subset(mask);
    const double value =
        cheeger_quantity(kraus, Projection::diagonal(kraus.n(), support)).trace_form;
    const bool worst = s.tested == 0 || value < s.min_value;
    record(s, value);
    if (worst) s.worst_support = support;
    if (value < s.bound - slack) ++s.violations;
  }
  return s;
}

CheegerScan cheeger_scan_random(const KrausSet& kraus, double epsilon, std::size_t trials,
                                std::uint64_t seed, double slack) {
  const Eigen::Index n = kraus.n();
  if (n < 2) throw std::invalid_argument("cheeger_scan_random: n >= 2 required");
  CheegerScan s;
  s.epsilon = epsilon;
  s.bound = (1.0 - epsilon) / 2.0;
  for (std::size_t t = 0; t < trials; ++t) {
    Rng rng(seed, t);
    const auto k = static_cast<Eigen::Index>(rng.index(1, static_cast<std::size_t>(n / 2)));
    const double value = cheeger_quantity(kraus, random_projection(n, k, rng)).trace_form;
    record(s, value);
    if (value < s.bound - slack) ++s.violations;
  }
  return s;
}

// ---------------------------------------------------------------------------

ConnectivityReport is_connected(const OperatorSubspace& v1, const ToleranceConfig& tol) {
  const Eigen::Index n = v1.ambient_dim();
  if (!v1.contains_identity()) {
    throw std::invalid_argument("is_connected: subspace must contain the identity");
  }
  ConnectivityReport rep;
  const auto full = static_cast<std::size_t>(n * n);
  const PowerSequence seq = subspace_power(v1, full, tol);
  for (std::size_t m = 0; m < seq.powers.size(); ++m) {
    rep.power_dims.push_back(seq.powers[m].dim());
    if (!rep.m_star && seq.powers[m].dim() == full) rep.m_star = m;
  }
  rep.connected = rep.m_star.has_value();

  const OperatorSubspace comm = commutant(v1.basis(), tol);
  rep.commutant_dim = comm.dim();
  rep.commutant_trivial = comm.dim() == 1;
  rep.criteria_agree = rep.connected == rep.commutant_trivial;

  if (!rep.commutant_trivial) {
    // The commutant of a self-adjoint set is a *-algebra, so spectral
    // projections of its Hermitian elements lie in it as well.
    Rng rng(0x9e3779b97f4a7c15ULL);
    for (int attempt = 0; attempt < 16 && !rep.witness; ++attempt) {
      Matrix h = Matrix::Zero(n, n);
      for (const auto& b : comm.basis()) h += rng.normal() * (b + b.adjoint());
      Eigen::SelfAdjointEigenSolver<Matrix> es(h);
      const Eigen::VectorXd& ev = es.eigenvalues();
      const double scale = std::max(1.0, ev.cwiseAbs().maxCoeff());
      for (Eigen::Index j = 0; j + 1 < n; ++j) {
        if (ev(j + 1) - ev(j) > 1e-6 * scale) {
          rep.witness = Projection::onto(es.eigenvectors().leftCols(j + 1), tol);
          break;
        }
      }
    }
    if (rep.witness) {
      const Matrix p = rep.witness->matrix();
      const Matrix q = Matrix::Identity(n, n) - p;
      for (const auto& b : v1.basis()) {
        rep.witness_residual = std::max(rep.witness_residual, (p * b * q).norm());
      }
    }
  }
  return rep;
}

// ---------------------------------------------------------------------------

KrausSet ExpanderSpec::kraus(const ToleranceConfig& tol) const {
  std::vector<Matrix> ops;
  const double w = 1.0 / std::sqrt(static_cast<double>(unitaries.size()));
  for (const auto& u : unitaries) ops.push_back(w * u);
  return KrausSet(std::move(ops), tol);
}

ExpanderSpec make_expander_spec(std::vector<Matrix> unitaries, const ToleranceConfig& tol) {
  if (unitaries.empty()) throw std::invalid_argument("expander: at least one unitary required");
  ExpanderSpec spec;
  spec.n = unitaries.front().rows();
  spec.d = unitaries.size();
  for (std::size_t j = 0; j < unitaries.size(); ++j) {
    const Matrix& u = unitaries[j];
    if (u.rows() != spec.n || u.cols() != spec.n) {
      throw DimensionError("expander: unitaries must all be n x n");
    }
    const double res = (u.adjoint() * u - Matrix::Identity(spec.n, spec.n)).norm();
    if (res > tol.zero_atol) {
      std::ostringstream os;
      os << "expander: unitaries[" << j << "] is not unitary (residual " << res << ")";
      throw std::invalid_argument(os.str());
    }
  }
  spec.unitaries = std::move(unitaries);
  spec.epsilon = spectral_gap(spec.kraus(tol), tol).epsilon;
  return spec;
}

ExpanderSpec random_expander(Eigen::Index n, std::size_t d, std::uint64_t seed,
                             const ToleranceConfig& tol) {
  if (n < 2) throw std::invalid_argument("random_expander: n >= 2 required");
  if (d < 2) throw std::invalid_argument("random_expander: d >= 2 required");
  std::vector<Matrix> us;
  for (std::size_t j = 0; j < d; ++j) {
    Rng rng(seed, j);
    us.push_back(haar_unitary(n, rng));
  }
  return make_expander_spec(std::move(us), tol);
}

KrausSet permutation_channel(const std::vector<std::vector<std::size_t>>& perms,
                             const ToleranceConfig& tol) {
  if (perms.empty()) throw std::invalid_argument("permutation_channel: no permutations");
  const auto n = static_cast<Eigen::Index>(perms.front().size());
  const double w = 1.0 / std::sqrt(static_cast<double>(perms.size()));
  std::vector<Matrix> ops;
  for (const auto& s : perms) {
    if (static_cast<Eigen::Index>(s.size()) != n) {
      throw DimensionError("permutation_channel: permutations of different sizes");
    }
    std::vector<bool> seen(s.size(), false);
    Matrix p = Matrix::Zero(n, n);
    for (std::size_t i = 0; i < s.size(); ++i) {
      if (s[i] >= s.size() || seen[s[i]]) {
        throw std::invalid_argument("permutation_channel: not a permutation");
      }
      seen[s[i]] = true;
      p(static_cast<Eigen::Index>(s[i]), static_cast<Eigen::Index>(i)) = w;
    }
    ops.push_back(std::move(p));
  }
  return KrausSet(std::move(ops), tol);
}

KrausSet depolarizing_channel(Eigen::Index n, const ToleranceConfig& tol) {
  std::vector<Matrix> ops;
  const double w = 1.0 / std::sqrt(static_cast<double>(n));
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      Matrix e = Matrix::Zero(n, n);
      e(i, j) = w;
      ops.push_back(std::move(e));
    }
  }
  return KrausSet(std::move(ops), tol);
}

// ---------------------------------------------------------------------------

Eigen::MatrixXd RegularGraph::adjacency() const {
  const auto ni = static_cast<Eigen::Index>(n);
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(ni, ni);
  for (auto [u, v] : edges) {
    a(static_cast<Eigen::Index>(u), static_cast<Eigen::Index>(v)) += 1.0;
    a(static_cast<Eigen::Index>(v), static_cast<Eigen::Index>(u)) += 1.0;
  }
  return a;
}

namespace {

RegularGraph finish_graph(std::size_t n, std::size_t d,
                          std::vector<std::pair<std::size_t, std::size_t>> edges) {
  RegularGraph g;
  g.n = n;
  g.d = d;
  g.edges = std::move(edges);
  g.space = FiniteMetricSpace::from_graph(n, g.edges);
  return g;
}

}  // namespace

RegularGraph random_regular_graph(std::size_t n, std::size_t d, std::uint64_t seed,
                                  std::size_t max_retries) {
  if (n < 2 || d < 1 || d >= n) {
    throw std::invalid_argument("random_regular_graph: requires 1 <= d < n");
  }
  if ((n * d) % 2 != 0) throw std::invalid_argument("random_regular_graph: n*d must be even");
  for (std::size_t attempt = 0; attempt < max_retries; ++attempt) {
    Rng rng(seed, attempt);
    std::vector<std::size_t> stubs;
    for (std::size_t v = 0; v < n; ++v) stubs.insert(stubs.end(), d, v);
    for (std::size_t i = stubs.size() - 1; i > 0; --i) std::swap(stubs[i], stubs[rng.index(0, i)]);
    std::set<std::pair<std::size_t, std::size_t>> seen;
    bool simple = true;
    for (std::size_t i = 0; i < stubs.size() && simple; i += 2) {
      auto e = std::minmax(stubs[i], stubs[i + 1]);
      if (e.first == e.second || !seen.insert(e).second) simple = false;
    }
    if (!simple) continue;
    RegularGraph g = finish_graph(n, d, {seen.begin(), seen.end()});
    if (std::isfinite(g.space.d().maxCoeff())) return g;
  }
  std::ostringstream os;
  os << "random_regular_graph: no simple connected graph after " << max_retries
     << " attempts (seed " << seed << ")";
  throw std::runtime_error(os.str());
}

RegularGraph cycle_graph(std::size_t n) {
  if (n < 3) throw std::invalid_argument("cycle_graph: n >= 3 required");
  std::vector<std::pair<std::size_t, std::size_t>> edges;
  for (std::size_t i = 0; i < n; ++i) edges.push_back(std::minmax(i, (i + 1) % n));
  return finish_graph(n, 2, std::move(edges));
}

RegularGraph complete_graph(std::size_t n) {
  if (n < 2) throw std::invalid_argument("complete_graph: n >= 2 required");
  std::vector<std::pair<std::size_t, std::size_t>> edges;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) edges.emplace_back(i, j);
  }
  return finish_graph(n, n - 1, std::move(edges));
}

ClassicalGap classical_gap(const RegularGraph& g) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(g.adjacency(), Eigen::EigenvaluesOnly);
  ClassicalGap out;
  const Eigen::VectorXd& ev = es.eigenvalues();
  for (Eigen::Index i = ev.size() - 1; i >= 0; --i) out.eigenvalues.push_back(ev(i));
  const double d = static_cast<double>(g.d);
  double second_abs = 0.0;
  for (std::size_t k = 1; k < out.eigenvalues.size(); ++k) {
    second_abs = std::max(second_abs, std::abs(out.eigenvalues[k]));
  }
  out.two_sided = 1.0 - second_abs / d;
  out.one_sided = out.eigenvalues.size() > 1 ? 1.0 - out.eigenvalues[1] / d : 1.0;
  return out;
}

VertexExpansionReport vertex_expansion(const FiniteMetricSpace& space, double delta,
                                       double eps_prime) {
  const std::size_t n = space.size();
  if (n > 20) throw std::invalid_argument("vertex_expansion: |X| <= 20 required");
  std::vector<std::uint32_t> ball(n, 0);
  for (std::size_t x = 0; x < n; ++x) {
    for (std::size_t y = 0; y < n; ++y) {
      if (space(x, y) < delta) ball[x] |= 1u << y;
    }
  }
  VertexExpansionReport rep;
  rep.delta = delta;
  rep.eps_prime = eps_prime;
  for (std::uint32_t mask = 1; mask < (1u << n); ++mask) {
    const auto size = static_cast<std::size_t>(std::popcount(mask));
    if (2 * size > n) continue;
    std::uint32_t nb = 0;
    for (std::uint32_t m = mask; m; m &= m - 1) nb |= ball[static_cast<std::size_t>(std::countr_zero(m))];
    const double ratio = static_cast<double>(std::popcount(nb)) / static_cast<double>(size);
    if (rep.tested == 0 || ratio < rep.min_ratio) {
      rep.min_ratio = ratio;
      rep.worst = mask_to_subset(mask);
    }
    ++rep.tested;
    if (ratio < 1.0 + eps_prime - 1e-12) ++rep.violations;
  }
  return rep;
}

// ---------------------------------------------------------------------------

IsoperimetricReport verify_isoperimetric(const ExpanderSpec& spec, double delta,
                                         std::size_t trials, std::uint64_t seed,
                                         const ToleranceConfig& tol) {
  if (!(delta > 1.0)) throw std::invalid_argument("verify_isoperimetric: delta > 1 required");
  if (trials < 1) throw std::invalid_argument("verify_isoperimetric: trials >= 1 required");
  const KrausSet kraus = spec.kraus(tol);
  const GraphQuantumMetric metric(kraus, tol);
  const Eigen::Index n = spec.n;

  IsoperimetricReport rep;
  rep.delta = delta;
  rep.epsilon = spectral_gap(kraus, tol).epsilon;
  rep.eps_prime = (1.0 - rep.epsilon) / 2.0;
  rep.gap_positive = rep.epsilon > tol.zero_atol;
  rep.trials = trials;
  rep.min_ratio = std::numeric_limits<double>::infinity();
  if (n < 2) return rep;

  for (std::size_t t = 0; t < trials; ++t) {
    Rng rng(seed, t);
    const auto k = static_cast<Eigen::Index>(rng.index(1, static_cast<std::size_t>(n / 2)));
    const Projection p = random_projection(n, k, rng);
    const Projection nb = neighborhood(metric, p, delta);
    const double ratio = static_cast<double>(nb.rank()) / static_cast<double>(k);
    rep.min_ratio = std::min(rep.min_ratio, ratio);
    if (static_cast<double>(nb.rank()) < (1.0 + rep.eps_prime) * static_cast<double>(k) -
                                             tol.zero_atol) {
      ++rep.violations;
    }

    const Projection comp = nb.complement(tol);
    const Eigen::Index free = comp.rank();
    if (free == 0) continue;
    const Matrix& c = comp.range_basis();
    const auto q_rank = static_cast<Eigen::Index>(rng.index(1, static_cast<std::size_t>(free)));
    const Matrix u = haar_unitary(free, rng);
    const Projection q = Projection::onto(c * u.leftCols(q_rank), tol);
    if (dist(metric, p, q) < ExtendedDistance::of(delta)) continue;
    ++rep.orthogonality_pairs;
    const double res =
        std::abs(hs_inner(kraus.apply(p.matrix()), kraus.apply(q.matrix())));
    rep.max_orthogonality_residual = std::max(rep.max_orthogonality_residual, res);
    if (res > tol.zero_atol) ++rep.orthogonality_violations;
  }
  return rep;
}

IteratedReport iterated_isoperimetric(const GraphQuantumMetric& metric, const Projection& p,
                                      double delta, std::size_t m, double eps_prime) {
  if (m < 1) throw std::invalid_argument("iterated_isoperimetric: m >= 1 required");
  if (!(delta > 1.0)) throw std::invalid_argument("iterated_isoperimetric: delta > 1 required");
  require_same_ambient(p.ambient_dim(), metric.n(), "iterated_isoperimetric");
  if (p.is_zero()) throw std::invalid_argument("iterated_isoperimetric: zero projection");
  const Eigen::Index n = metric.n();
  IteratedReport rep;
  rep.ranks.push_back(p.rank());
  bool ok = true;
  for (std::size_t k = 1; k <= m; ++k) {
    const Eigen::Index prev = rep.ranks.back();
    if (2 * prev > n) {
      rep.precondition_exhausted = true;
      break;
    }
    const Projection nb = neighborhood(metric, p, static_cast<double>(k) * delta);
    rep.ranks.push_back(nb.rank());
    const bool step = static_cast<double>(nb.rank()) >=
                      (1.0 + eps_prime) * static_cast<double>(prev) - 1e-9;
    rep.step_ok.push_back(step);
    ok = ok && step;
  }
  rep.all_ok = ok && !rep.precondition_exhausted;
  return rep;
}

RankDiameterReport verify_rank_diameter(const GraphQuantumMetric& metric, const Projection& p) {
  RankDiameterReport rep;
  rep.k0 = diam_graph_proxy(metric, p);
  if (!rep.k0.finite()) {
    throw std::invalid_argument("verify_rank_diameter: k0 is infinite (disconnected quantum graph)");
  }
  const auto k0 = static_cast<std::size_t>(rep.k0.value());
  rep.rank = p.rank();
  rep.n_kraus = metric.kraus().ops().size();
  rep.dim_vk0 = metric.power(k0).dim();
  rep.rank_bound = static_cast<double>(rep.rank) <=
                   std::pow(static_cast<double>(rep.n_kraus), static_cast<double>(k0));
  rep.square_bound = static_cast<std::size_t>(rep.rank * rep.rank) <= rep.dim_vk0;
  return rep;
}

}  // namespace qcoarse
