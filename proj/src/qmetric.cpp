#include "qcoarse/qmetric.hpp"

#include "qcoarse/random.hpp"

#include <algorithm>
#include <cmath>
#include <queue>
#include <set>
#include <sstream>
#include <stdexcept>

namespace qcoarse {

ExtendedDistance ExtendedDistance::from_double(double v) {
  if (std::isinf(v) && v > 0) return infinite();
  if (!(v >= 0.0)) throw std::invalid_argument("distance must be nonnegative");
  return of(v);
}

std::string ExtendedDistance::to_string() const {
  if (!finite_) return "inf";
  std::ostringstream os;
  os << value_;
  return os.str();
}

Subset normalize_subset(Subset s) {
  std::sort(s.begin(), s.end());
  s.erase(std::unique(s.begin(), s.end()), s.end());
  return s;
}

// ---------------------------------------------------------------------------
// KrausSet

KrausSet::KrausSet(std::vector<Matrix> ops, const ToleranceConfig& tol)
    : ops_(std::move(ops)), zero_atol_(tol.zero_atol) {
  if (ops_.empty()) throw std::invalid_argument("KrausSet: at least one operator required");
  n_ = ops_.front().rows();
  Matrix tp = Matrix::Zero(n_, n_);
  Matrix un = Matrix::Zero(n_, n_);
  for (const auto& k : ops_) {
    if (k.rows() != n_ || k.cols() != n_) {
      throw DimensionError("KrausSet: all operators must be n x n");
    }
    if (!k.allFinite()) throw std::invalid_argument("KrausSet: non-finite entry");
    tp += k.adjoint() * k;
    un += k * k.adjoint();
  }
  const Matrix id = Matrix::Identity(n_, n_);
  tp_residual_ = (tp - id).norm();
  unital_residual_ = (un - id).norm();
}

Matrix KrausSet::apply(const Matrix& x) const {
  Matrix out = Matrix::Zero(n_, n_);
  for (const auto& k : ops_) out += k * x * k.adjoint();
  return out;
}

Matrix KrausSet::apply_adjoint(const Matrix& x) const {
  Matrix out = Matrix::Zero(n_, n_);
  for (const auto& k : ops_) out += k.adjoint() * x * k;
  return out;
}

// ---------------------------------------------------------------------------
// GraphQuantumMetric

GraphQuantumMetric::GraphQuantumMetric(KrausSet kraus, const ToleranceConfig& tol)
    : kraus_(std::move(kraus)), tol_(tol), cache_(std::make_shared<Cache>()) {
  tol_.validate();
  if (!kraus_.trace_preserving()) {
    std::ostringstream os;
    os << "graph_metric: Kraus set is not trace preserving (||sum K^*K - I||_F = "
       << kraus_.tp_residual() << ")";
    throw std::invalid_argument(os.str());
  }
  std::vector<Matrix> products;
  products.reserve(kraus_.ops().size() * kraus_.ops().size());
  for (const auto& kj : kraus_.ops()) {
    for (const auto& ki : kraus_.ops()) products.push_back(kj.adjoint() * ki);
  }
  v1_ = subspace_from_spanning(products, tol_);
}

GraphQuantumMetric graph_metric(const KrausSet& kraus, const ToleranceConfig& tol) {
  return GraphQuantumMetric(kraus, tol);
}

const OperatorSubspace& GraphQuantumMetric::ensure_power(std::size_t m) const {
  std::lock_guard<std::mutex> lock(cache_->mu);
  auto& powers = cache_->powers;
  if (powers.empty()) {
    powers.push_back(std::make_unique<OperatorSubspace>(
        OperatorSubspace::identity_span(n(), tol_)));
  }
  const auto full_dim = static_cast<std::size_t>(n() * n());
  while (powers.size() <= m && !cache_->stable) {
    const OperatorSubspace& last = *powers.back();
    if (last.dim() == full_dim) {
      cache_->stable = powers.size() - 1;
      break;
    }
    auto next = std::make_unique<OperatorSubspace>(subspace_product(last, v1_, tol_));
    const bool same = next->dim() == last.dim();
    if (same) {
      cache_->stable = powers.size() - 1;
      break;
    }
    powers.push_back(std::move(next));
  }
  return *powers[std::min(m, powers.size() - 1)];
}

const OperatorSubspace& GraphQuantumMetric::power(std::size_t m) const {
  return ensure_power(m);
}

std::size_t GraphQuantumMetric::stabilization_index() const {
  // Powers are nested because I lies in V_1, so dimension can grow at most
  // n^2 - 1 times.
  ensure_power(static_cast<std::size_t>(n() * n()) + 1);
  std::lock_guard<std::mutex> lock(cache_->mu);
  return *cache_->stable;
}

std::vector<std::size_t> GraphQuantumMetric::power_dims() const {
  const std::size_t stab = stabilization_index();
  std::vector<std::size_t> dims;
  for (std::size_t m = 0; m <= stab; ++m) dims.push_back(power(m).dim());
  return dims;
}

bool GraphQuantumMetric::powers_fill_matrix_algebra() const {
  return power(stabilization_index()).dim() == static_cast<std::size_t>(n() * n());
}

Projection GraphQuantumMetric::expand(const Projection& p, std::size_t m) const {
  require_same_ambient(p.ambient_dim(), n(), "expand");
  Projection w = p;
  for (std::size_t step = 0; step < m; ++step) {
    Projection next = image_range_projection(v1_, w, tol_);
    if (next.rank() == w.rank()) break;
    w = std::move(next);
  }
  return w;
}

// ---------------------------------------------------------------------------
// FiniteMetricSpace

FiniteMetricSpace::FiniteMetricSpace(std::vector<std::string> labels, Eigen::MatrixXd d)
    : labels_(std::move(labels)), d_(std::move(d)) {
  const auto n = static_cast<Eigen::Index>(labels_.size());
  if (n == 0) throw std::invalid_argument("FiniteMetricSpace: empty point set");
  if (d_.rows() != n || d_.cols() != n) {
    throw DimensionError("FiniteMetricSpace: distance matrix must be |X| x |X|");
  }
  for (Eigen::Index x = 0; x < n; ++x) {
    if (d_(x, x) != 0.0) throw std::invalid_argument("FiniteMetricSpace: d(x,x) != 0");
    for (Eigen::Index y = 0; y < n; ++y) {
      if (std::isnan(d_(x, y))) throw std::invalid_argument("FiniteMetricSpace: NaN distance");
      if (d_(x, y) != d_(y, x)) throw std::invalid_argument("FiniteMetricSpace: d not symmetric");
      if (x != y && !(d_(x, y) > 0.0)) {
        throw std::invalid_argument("FiniteMetricSpace: d(x,y) must be > 0 for x != y");
      }
    }
  }
  for (Eigen::Index z = 0; z < n; ++z) {
    for (Eigen::Index x = 0; x < n; ++x) {
      for (Eigen::Index y = 0; y < n; ++y) {
        const double via = d_(x, z) + d_(z, y);
        if (d_(x, y) > via + 1e-12 * std::max(1.0, via)) {
          std::ostringstream os;
          os << "FiniteMetricSpace: triangle inequality fails at (" << x << "," << y << ") via "
             << z;
          throw std::invalid_argument(os.str());
        }
      }
    }
  }
}

std::vector<double> FiniteMetricSpace::realized_distances() const {
  std::set<double> s;
  for (Eigen::Index i = 0; i < d_.size(); ++i) {
    if (std::isfinite(d_.data()[i])) s.insert(d_.data()[i]);
  }
  return {s.begin(), s.end()};
}

FiniteMetricSpace FiniteMetricSpace::path(std::size_t n) {
  std::vector<std::pair<std::size_t, std::size_t>> edges;
  for (std::size_t i = 0; i + 1 < n; ++i) edges.emplace_back(i, i + 1);
  return from_graph(n, edges);
}

FiniteMetricSpace FiniteMetricSpace::from_graph(
    std::size_t n, const std::vector<std::pair<std::size_t, std::size_t>>& edges) {
  std::vector<std::vector<std::size_t>> adj(n);
  for (auto [a, b] : edges) {
    if (a >= n || b >= n) throw std::out_of_range("from_graph: vertex out of range");
    adj[a].push_back(b);
    adj[b].push_back(a);
  }
  const auto ni = static_cast<Eigen::Index>(n);
  Eigen::MatrixXd d = Eigen::MatrixXd::Constant(ni, ni, std::numeric_limits<double>::infinity());
  for (std::size_t s = 0; s < n; ++s) {
    std::queue<std::size_t> q;
    d(static_cast<Eigen::Index>(s), static_cast<Eigen::Index>(s)) = 0.0;
    q.push(s);
    while (!q.empty()) {
      const std::size_t u = q.front();
      q.pop();
      const double du = d(static_cast<Eigen::Index>(s), static_cast<Eigen::Index>(u));
      for (std::size_t w : adj[u]) {
        double& dw = d(static_cast<Eigen::Index>(s), static_cast<Eigen::Index>(w));
        if (std::isinf(dw)) {
          dw = du + 1.0;
          q.push(w);
        }
      }
    }
  }
  std::vector<std::string> labels;
  for (std::size_t i = 0; i < n; ++i) labels.push_back(std::to_string(i));
  return FiniteMetricSpace(std::move(labels), std::move(d));
}

// ---------------------------------------------------------------------------
// Distance

namespace {

void require_nonzero(const Projection& p, const char* what) {
  if (p.is_zero()) throw std::invalid_argument(std::string(what) + ": zero projection");
}

Subset diagonal_support(const Projection& p, const ToleranceConfig& tol, const char* what) {
  Subset s;
  if (!p.is_diagonal(tol, &s)) {
    throw std::invalid_argument(std::string(what) +
                                ": classical backend requires a diagonal projection");
  }
  return s;
}

void require_in_range(const ClassicalQuantumMetric& m, const Subset& s, const char* what) {
  for (auto x : s) {
    if (x >= m.size()) throw std::out_of_range(std::string(what) + ": point index out of range");
  }
}

}  // namespace

ExtendedDistance dist(const GraphQuantumMetric& metric, const Projection& p, const Projection& q) {
  require_same_ambient(p.ambient_dim(), metric.n(), "dist");
  require_same_ambient(q.ambient_dim(), metric.n(), "dist");
  require_nonzero(p, "dist");
  require_nonzero(q, "dist");
  const auto& tol = metric.tolerance();
  if (proj_product_nonzero(p, q, tol)) return ExtendedDistance::of(0.0);
  // P V_1^m Q != 0  iff  range(P) is not orthogonal to V_1^m range(Q).
  Projection w = q;
  for (std::size_t m = 1;; ++m) {
    Projection next = image_range_projection(metric.v1(), w, tol);
    if (proj_product_nonzero(p, next, tol)) return ExtendedDistance::of(static_cast<double>(m));
    if (next.rank() == w.rank()) return ExtendedDistance::infinite();
    w = std::move(next);
  }
}

ExtendedDistance dist(const ClassicalQuantumMetric& metric, const Subset& s, const Subset& t) {
  if (s.empty() || t.empty()) throw std::invalid_argument("dist: zero projection");
  require_in_range(metric, s, "dist");
  require_in_range(metric, t, "dist");
  double best = std::numeric_limits<double>::infinity();
  for (auto x : s) {
    for (auto y : t) best = std::min(best, metric.space(x, y));
  }
  return ExtendedDistance::from_double(best);
}

ExtendedDistance dist(const ClassicalQuantumMetric& metric, const Projection& p,
                      const Projection& q, const ToleranceConfig& tol) {
  require_same_ambient(p.ambient_dim(), static_cast<Eigen::Index>(metric.size()), "dist");
  require_same_ambient(q.ambient_dim(), static_cast<Eigen::Index>(metric.size()), "dist");
  return dist(metric, diagonal_support(p, tol, "dist"), diagonal_support(q, tol, "dist"));
}

std::size_t neighborhood_power(double eps) {
  if (!(eps > 0.0)) throw std::invalid_argument("neighborhood: eps must be > 0");
  return static_cast<std::size_t>(std::ceil(eps)) - 1;
}

Projection neighborhood(const GraphQuantumMetric& metric, const Projection& p, double eps) {
  const std::size_t m = neighborhood_power(eps);
  require_same_ambient(p.ambient_dim(), metric.n(), "neighborhood");
  if (p.is_zero()) return p;
  return metric.expand(p, m);
}

Subset neighborhood(const ClassicalQuantumMetric& metric, const Subset& s, double eps) {
  if (!(eps > 0.0)) throw std::invalid_argument("neighborhood: eps must be > 0");
  require_in_range(metric, s, "neighborhood");
  Subset out;
  for (std::size_t x = 0; x < metric.size(); ++x) {
    for (auto y : s) {
      if (metric.space(x, y) < eps) {
        out.push_back(x);
        break;
      }
    }
  }
  return out;
}

Projection neighborhood(const ClassicalQuantumMetric& metric, const Projection& p, double eps,
                        const ToleranceConfig& tol) {
  const Subset s = neighborhood(metric, diagonal_support(p, tol, "neighborhood"), eps);
  return Projection::diagonal(static_cast<Eigen::Index>(metric.size()), s);
}

double diam_classical(const ClassicalQuantumMetric& metric, const Subset& s) {
  require_in_range(metric, s, "diam_classical");
  double d = 0.0;
  for (auto x : s) {
    for (auto y : s) d = std::max(d, metric.space(x, y));
  }
  return d;
}

ExtendedDistance diam_graph_proxy(const GraphQuantumMetric& metric, const Projection& p) {
  require_same_ambient(p.ambient_dim(), metric.n(), "diam_graph_proxy");
  require_nonzero(p, "diam_graph_proxy");
  const Eigen::Index k = p.rank();
  const Matrix& r = p.range_basis();
  const auto target = static_cast<Eigen::Index>(k * k);
  const std::size_t stab = metric.stabilization_index();
  for (std::size_t m = 0; m <= stab; ++m) {
    const OperatorSubspace& v = metric.power(m);
    Matrix cols(target, static_cast<Eigen::Index>(v.dim()));
    for (std::size_t j = 0; j < v.dim(); ++j) {
      const Matrix c = r.adjoint() * v.basis()[j] * r;
      cols.col(static_cast<Eigen::Index>(j)) = vec(c);
    }
    if (orthonormal_range(cols, metric.tolerance()).cols() == target) {
      return ExtendedDistance::of(static_cast<double>(m));
    }
  }
  return ExtendedDistance::infinite();
}

ExtendedDistance diam_lower_bound_sampled(const GraphQuantumMetric& metric, const Projection& p,
                                          int trials, std::uint64_t seed) {
  if (trials < 1) throw std::invalid_argument("diam_lower_bound_sampled: trials must be >= 1");
  require_same_ambient(p.ambient_dim(), metric.n(), "diam_lower_bound_sampled");
  require_nonzero(p, "diam_lower_bound_sampled");
  const auto& tol = metric.tolerance();
  const Eigen::Index n = metric.n();
  const Matrix& r = p.range_basis();
  auto rank_one = [&](const Vector& u) {
    return Projection::onto(Matrix(u), tol);
  };
  auto touches = [&](const Vector& u) { return (r.adjoint() * u).norm() > tol.zero_atol; };

  ExtendedDistance best = ExtendedDistance::of(0.0);
  // Deterministic probes: pairs of range basis vectors.
  const Eigen::Index probe = std::min<Eigen::Index>(r.cols(), 6);
  for (Eigen::Index i = 0; i < probe; ++i) {
    for (Eigen::Index j = i + 1; j < probe; ++j) {
      best = max(best, dist(metric, rank_one(r.col(i)), rank_one(r.col(j))));
      if (!best.finite()) return best;
    }
  }
  for (int t = 0; t < trials; ++t) {
    Rng rng(seed, static_cast<std::uint64_t>(t));
    const Vector u = random_unit_vector(n, rng);
    if (!touches(u)) continue;
    const Projection qu = rank_one(u);
    // Push v away from u: project out V_1^j u for a random j.
    const auto j = rng.index(0, static_cast<std::size_t>(n));
    const Projection reach = metric.expand(qu, j);
    Vector v = random_unit_vector(n, rng);
    if (reach.rank() < n) {
      const Matrix& w = reach.range_basis();
      Vector perp = v - w * (w.adjoint() * v);
      if (perp.norm() > tol.zero_atol) v = perp / perp.norm();
    }
    if (!touches(v)) continue;
    best = max(best, dist(metric, qu, rank_one(v)));
    if (!best.finite()) return best;
  }
  return best;
}

DiameterBracket diam_bracket(const GraphQuantumMetric& metric, const Projection& p, int trials,
                             std::uint64_t seed) {
  DiameterBracket b;
  b.connected = metric.powers_fill_matrix_algebra();
  b.k0 = diam_graph_proxy(metric, p);
  b.sampled = diam_lower_bound_sampled(metric, p, trials, seed);
  b.lower = b.connected ? max(b.k0, b.sampled) : b.sampled;
  b.label = b.connected ? "certified lower bound; upper bound unknown"
                        : "sampled lower bound only (disconnected quantum graph); upper bound unknown";
  return b;
}

// ---------------------------------------------------------------------------
// Direct sums and quotients

GraphQuantumMetric direct_sum(const GraphQuantumMetric& a, const GraphQuantumMetric& b) {
  const Eigen::Index n1 = a.n();
  const Eigen::Index n2 = b.n();
  std::vector<Matrix> ops;
  for (const auto& k : a.kraus().ops()) {
    Matrix m = Matrix::Zero(n1 + n2, n1 + n2);
    m.topLeftCorner(n1, n1) = k;
    ops.push_back(std::move(m));
  }
  for (const auto& l : b.kraus().ops()) {
    Matrix m = Matrix::Zero(n1 + n2, n1 + n2);
    m.bottomRightCorner(n2, n2) = l;
    ops.push_back(std::move(m));
  }
  return GraphQuantumMetric(KrausSet(std::move(ops), a.tolerance()), a.tolerance());
}

ClassicalQuantumMetric direct_sum(const ClassicalQuantumMetric& a,
                                  const ClassicalQuantumMetric& b) {
  const auto n1 = static_cast<Eigen::Index>(a.size());
  const auto n2 = static_cast<Eigen::Index>(b.size());
  Eigen::MatrixXd d = Eigen::MatrixXd::Constant(n1 + n2, n1 + n2,
                                                std::numeric_limits<double>::infinity());
  d.topLeftCorner(n1, n1) = a.space.d();
  d.bottomRightCorner(n2, n2) = b.space.d();
  std::vector<std::string> labels;
  for (const auto& l : a.space.labels()) labels.push_back("L:" + l);
  for (const auto& l : b.space.labels()) labels.push_back("R:" + l);
  return {FiniteMetricSpace(std::move(labels), std::move(d))};
}

Projection embed_left(const Projection& p, Eigen::Index n_right) {
  Matrix r = Matrix::Zero(p.ambient_dim() + n_right, p.rank());
  r.topRows(p.ambient_dim()) = p.range_basis();
  return Projection::from_orthonormal(std::move(r));
}

Projection embed_right(Eigen::Index n_left, const Projection& q) {
  Matrix r = Matrix::Zero(n_left + q.ambient_dim(), q.rank());
  r.bottomRows(q.ambient_dim()) = q.range_basis();
  return Projection::from_orthonormal(std::move(r));
}

Subset shift_subset(const Subset& s, std::size_t offset) {
  Subset out;
  out.reserve(s.size());
  for (auto x : s) out.push_back(x + offset);
  return out;
}

ClassicalQuantumMetric quotient_restrict(const ClassicalQuantumMetric& metric, const Subset& s) {
  if (s.empty()) throw std::invalid_argument("quotient_restrict: empty subset");
  const Subset pts = normalize_subset(s);
  require_in_range(metric, pts, "quotient_restrict");
  const auto k = static_cast<Eigen::Index>(pts.size());
  Eigen::MatrixXd d(k, k);
  std::vector<std::string> labels;
  for (Eigen::Index i = 0; i < k; ++i) {
    labels.push_back(metric.space.labels()[pts[static_cast<std::size_t>(i)]]);
    for (Eigen::Index j = 0; j < k; ++j) {
      d(i, j) = metric.space(pts[static_cast<std::size_t>(i)], pts[static_cast<std::size_t>(j)]);
    }
  }
  return {FiniteMetricSpace(std::move(labels), std::move(d))};
}

// ---------------------------------------------------------------------------
// Materialized classical metric

OperatorSubspace classical_vt(const FiniteMetricSpace& space, double t,
                              const ToleranceConfig& tol) {
  const auto n = static_cast<Eigen::Index>(space.size());
  std::vector<Matrix> units;
  for (Eigen::Index x = 0; x < n; ++x) {
    for (Eigen::Index y = 0; y < n; ++y) {
      if (space.d()(x, y) <= t) {
        Matrix e = Matrix::Zero(n, n);
        e(x, y) = 1.0;
        units.push_back(std::move(e));
      }
    }
  }
  return subspace_from_spanning(units, tol);
}

Subset mask_to_subset(std::uint32_t mask) {
  Subset s;
  for (std::size_t i = 0; i < 32; ++i) {
    if (mask & (1u << i)) s.push_back(i);
  }
  return s;
}

std::uint32_t subset_to_mask(const Subset& s) {
  std::uint32_t m = 0;
  for (auto x : s) m |= 1u << x;
  return m;
}

MaterializedClassicalMetric::MaterializedClassicalMetric(const FiniteMetricSpace& space,
                                                         const ToleranceConfig& tol)
    : n_(space.size()), count_(1u << space.size()), tol_(tol) {
  if (n_ > 6) throw std::invalid_argument("MaterializedClassicalMetric: |X| <= 6 required");
  const auto n = static_cast<Eigen::Index>(n_);
  std::vector<OperatorSubspace> vts;
  const std::vector<double> thresholds = space.realized_distances();
  for (double t : thresholds) vts.push_back(classical_vt(space, t, tol));

  std::vector<Matrix> chi(count_);
  for (std::uint32_t s = 0; s < count_; ++s) {
    chi[s] = Projection::diagonal(n, mask_to_subset(s)).matrix();
  }
  table_.assign(static_cast<std::size_t>(count_) * count_, ExtendedDistance::infinite());
  for (std::uint32_t s = 1; s < count_; ++s) {
    for (std::uint32_t t = 1; t < count_; ++t) {
      for (std::size_t i = 0; i < thresholds.size(); ++i) {
        bool hit = false;
        for (const auto& b : vts[i].basis()) {
          if ((chi[s] * b * chi[t]).norm() > tol.zero_atol) {
            hit = true;
            break;
          }
        }
        if (hit) {
          table_[static_cast<std::size_t>(s) * count_ + t] = ExtendedDistance::of(thresholds[i]);
          break;
        }
      }
    }
  }
}

ExtendedDistance MaterializedClassicalMetric::dist(std::uint32_t s, std::uint32_t t) const {
  return table_[static_cast<std::size_t>(s) * count_ + t];
}

std::uint32_t MaterializedClassicalMetric::neighborhood(std::uint32_t s, double eps) const {
  const auto n = static_cast<Eigen::Index>(n_);
  const ExtendedDistance e = ExtendedDistance::of(eps);
  std::vector<Projection> far;
  for (std::uint32_t t = 1; t < count_; ++t) {
    if (!(dist(s, t) < e)) far.push_back(Projection::diagonal(n, mask_to_subset(t)));
  }
  const Projection nb = proj_join(far, n, tol_).complement(tol_);
  Subset support;
  if (!nb.is_diagonal(tol_, &support)) {
    throw std::logic_error("materialized neighborhood is not diagonal");
  }
  return subset_to_mask(support);
}

ExtendedDistance MaterializedClassicalMetric::diam(std::uint32_t s) const {
  if (s == 0) return ExtendedDistance::of(0.0);
  ExtendedDistance best = ExtendedDistance::of(0.0);
  for (std::uint32_t q = 1; q < count_; ++q) {
    if (!(q & s)) continue;
    for (std::uint32_t r = 1; r < count_; ++r) {
      if (r & s) best = max(best, dist(q, r));
    }
  }
  return best;
}

}  // namespace qcoarse
