#include "qcoarse/asdim.hpp"

#include "qcoarse/random.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <functional>
#include <sstream>

namespace qcoarse {

std::string to_string(Backend b) { return b == Backend::Classical ? "classical" : "quantum"; }

std::string to_string(BoundCheck b) {
  switch (b) {
    case BoundCheck::Pass: return "pass";
    case BoundCheck::NotRefuted: return "not_refuted";
    case BoundCheck::Refuted: return "refuted";
  }
  return "?";
}

namespace {

bool within(double value, double bound) {
  return value <= bound + 1e-12 * std::max(1.0, std::abs(bound));
}

bool within(const ExtendedDistance& value, double bound) {
  return value.finite() && within(value.value(), bound);
}

std::vector<bool> indicator(std::size_t n, const Subset& s) {
  std::vector<bool> out(n, false);
  for (auto x : s) out[x] = true;
  return out;
}

bool intersects(const std::vector<bool>& a, const std::vector<bool>& b) {
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i] && b[i]) return true;
  }
  return false;
}

std::string ref_string(const MemberRef& m) {
  std::ostringstream os;
  os << "color " << m.color << ", member " << m.index;
  return os.str();
}

void require_backend(const CoverFamily& fam, Backend b, const char* what) {
  if (fam.backend != b) {
    throw std::invalid_argument(std::string(what) + ": expected a " + to_string(b) +
                                " cover family, got " + to_string(fam.backend));
  }
}

}  // namespace

bool r_disjoint(const ClassicalQuantumMetric& metric, const Subset& s, const Subset& t, double r) {
  return !intersects(indicator(metric.size(), neighborhood(metric, s, r)),
                     indicator(metric.size(), neighborhood(metric, t, r)));
}

bool r_disjoint(const GraphQuantumMetric& metric, const Projection& p, const Projection& q,
                double r) {
  return !proj_product_nonzero(neighborhood(metric, p, r), neighborhood(metric, q, r),
                               metric.tolerance());
}

// ---------------------------------------------------------------------------
// Validation

CoverReport validate_cover(const ClassicalQuantumMetric& metric, const CoverFamily& fam) {
  require_backend(fam, Backend::Classical, "validate_cover");
  const std::size_t n = metric.size();
  CoverReport rep;
  std::vector<bool> covered(n, false);
  for (std::size_t c = 0; c < fam.classical.size(); ++c) {
    const auto& color = fam.classical[c];
    std::vector<std::vector<bool>> nbs;
    for (std::size_t i = 0; i < color.size(); ++i) {
      const Subset& s = color[i];
      if (s.empty()) {
        rep.members_nonempty = false;
        if (!rep.empty_member) rep.empty_member = MemberRef{c, i};
        nbs.emplace_back(n, false);
        continue;
      }
      for (auto x : s) {
        if (x >= n) throw std::out_of_range("validate_cover: point index out of range");
        covered[x] = true;
      }
      nbs.push_back(indicator(n, neighborhood(metric, s, fam.r)));
      const double d = diam_classical(metric, s);
      rep.max_diameter = max(rep.max_diameter, ExtendedDistance::from_double(d));
      if (!within(d, fam.R) && !rep.unbounded_member) rep.unbounded_member = MemberRef{c, i};
    }
    for (std::size_t i = 0; i < nbs.size() && !rep.overlap; ++i) {
      for (std::size_t j = i + 1; j < nbs.size(); ++j) {
        if (intersects(nbs[i], nbs[j])) {
          rep.overlap = std::make_pair(MemberRef{c, i}, MemberRef{c, j});
          break;
        }
      }
    }
  }
  for (std::size_t x = 0; x < n; ++x) {
    if (!covered[x]) rep.uncovered.push_back(x);
  }
  rep.covering = rep.uncovered.empty();
  rep.disjoint = !rep.overlap.has_value();
  rep.bounded = rep.unbounded_member ? BoundCheck::Refuted : BoundCheck::Pass;
  return rep;
}

CoverReport validate_cover(const GraphQuantumMetric& metric, const CoverFamily& fam,
                           int diam_trials, std::uint64_t seed) {
  require_backend(fam, Backend::Quantum, "validate_cover");
  const Eigen::Index n = metric.n();
  const auto& tol = metric.tolerance();
  CoverReport rep;
  std::vector<Projection> all;
  std::size_t member_counter = 0;
  for (std::size_t c = 0; c < fam.quantum.size(); ++c) {
    const auto& color = fam.quantum[c];
    std::vector<Projection> nbs;
    for (std::size_t i = 0; i < color.size(); ++i) {
      const Projection& p = color[i];
      require_same_ambient(p.ambient_dim(), n, "validate_cover");
      if (p.is_zero()) {
        rep.members_nonempty = false;
        if (!rep.empty_member) rep.empty_member = MemberRef{c, i};
        nbs.push_back(p);
        continue;
      }
      all.push_back(p);
      nbs.push_back(neighborhood(metric, p, fam.r));
      const DiameterBracket b =
          diam_bracket(metric, p, diam_trials, derive_seed(seed, member_counter++));
      rep.max_diameter = max(rep.max_diameter, b.lower);
      if (!within(b.lower, fam.R) && !rep.unbounded_member) rep.unbounded_member = MemberRef{c, i};
    }
    for (std::size_t i = 0; i < nbs.size() && !rep.overlap; ++i) {
      for (std::size_t j = i + 1; j < nbs.size(); ++j) {
        if (proj_product_nonzero(nbs[i], nbs[j], tol)) {
          rep.overlap = std::make_pair(MemberRef{c, i}, MemberRef{c, j});
          break;
        }
      }
    }
  }
  rep.uncovered_rank = n - proj_join(all, n, tol).rank();
  rep.covering = rep.uncovered_rank == 0;
  rep.disjoint = !rep.overlap.has_value();
  rep.bounded = rep.unbounded_member ? BoundCheck::Refuted : BoundCheck::NotRefuted;
  return rep;
}

// ---------------------------------------------------------------------------
// Greedy construction

GreedyResult greedy_cover(const FiniteMetricSpace& space, double r, std::size_t max_colors) {
  if (!(r > 0.0)) throw std::invalid_argument("greedy_cover: r > 0 required");
  if (max_colors < 1) throw std::invalid_argument("greedy_cover: max_colors >= 1 required");
  const std::size_t n = space.size();
  const double sep = 2.0 * r;
  GreedyResult res;
  res.cover.backend = Backend::Classical;
  res.cover.r = r;
  res.cover.source = "greedy";
  std::vector<bool> covered(n, false);
  std::size_t remaining = n;
  double achieved = 0.0;
  const ClassicalQuantumMetric metric{space};

  while (remaining > 0 && res.cover.classical.size() < max_colors) {
    std::vector<Subset> color;
    std::vector<bool> placed(n, false);  // points claimed in this color
    auto near_color = [&](std::size_t x) {
      for (std::size_t y = 0; y < n; ++y) {
        if (placed[y] && space(x, y) < sep) return true;
      }
      return false;
    };
    for (std::size_t seed = 0; seed < n; ++seed) {
      if (covered[seed] || near_color(seed)) continue;
      Subset cluster;
      for (std::size_t x = 0; x < n; ++x) {
        if (!covered[x] && space(seed, x) <= sep && !near_color(x)) cluster.push_back(x);
      }
      for (auto x : cluster) {
        placed[x] = true;
        covered[x] = true;
        --remaining;
      }
      achieved = std::max(achieved, diam_classical(metric, cluster));
      color.push_back(std::move(cluster));
    }
    res.cover.classical.push_back(std::move(color));
  }
  res.cover.R = achieved;
  if (remaining > 0) {
    std::ostringstream os;
    os << "greedy_cover: " << remaining << " points left after " << max_colors << " colors";
    res.failure = os.str();
    return res;
  }
  const CoverReport rep = validate_cover(metric, res.cover);
  if (!rep.valid()) {
    res.failure = "greedy_cover: constructed family failed validation";
    return res;
  }
  res.ok = true;
  return res;
}

// ---------------------------------------------------------------------------
// Exhaustive search

std::size_t asdim_exhaustive(const FiniteMetricSpace& space, double r, double R_bound,
                             CoverFamily* witness) {
  const std::size_t n = space.size();
  if (n > 10) throw std::invalid_argument("asdim_exhaustive: |X| <= 10 required");
  if (!(r > 0.0)) throw std::invalid_argument("asdim_exhaustive: r > 0 required");
  const std::uint32_t full = (1u << n) - 1;

  std::vector<std::uint32_t> ball(n, 0);
  for (std::size_t x = 0; x < n; ++x) {
    for (std::size_t y = 0; y < n; ++y) {
      if (space(x, y) < r) ball[x] |= 1u << y;
    }
  }
  // Blocks allowed in a cover, with their r-neighborhoods.
  std::vector<bool> allowed(full + 1, false);
  std::vector<std::uint32_t> nbhd(full + 1, 0);
  for (std::uint32_t mask = 1; mask <= full; ++mask) {
    double d = 0.0;
    std::uint32_t nb = 0;
    for (std::uint32_t a = mask; a; a &= a - 1) {
      const auto x = static_cast<std::size_t>(std::countr_zero(a));
      nb |= ball[x];
      for (std::uint32_t b = mask; b; b &= b - 1) {
        d = std::max(d, space(x, static_cast<std::size_t>(std::countr_zero(b))));
      }
    }
    allowed[mask] = within(d, R_bound);
    nbhd[mask] = nb;
  }

  // Singletons are always allowed (diameter 0), so n colors always suffice.
  std::size_t best = n + 1;
  std::vector<std::uint32_t> blocks;
  std::vector<std::size_t> colors;
  std::vector<std::uint32_t> best_blocks;
  std::vector<std::size_t> best_colors;
  std::vector<std::uint32_t> color_nb;  // union of neighborhoods per color

  std::function<void(std::uint32_t, std::size_t)> search = [&](std::uint32_t rest,
                                                               std::size_t used) {
    if (used >= best) return;
    if (rest == 0) {
      best = used;
      best_blocks = blocks;
      best_colors = colors;
      return;
    }
    const std::uint32_t low = rest & (~rest + 1);
    const std::uint32_t others = rest & ~low;
    // Enumerate submasks of `others`, each joined with the lowest point.
    for (std::uint32_t sub = others;; sub = (sub - 1) & others) {
      const std::uint32_t block = sub | low;
      if (allowed[block]) {
        const std::size_t limit = std::min(used + 1, best - 1);
        for (std::size_t c = 0; c < limit; ++c) {
          if (c < used && (color_nb[c] & nbhd[block])) continue;
          blocks.push_back(block);
          colors.push_back(c);
          const std::uint32_t saved = c < used ? color_nb[c] : 0;
          if (c < used) {
            color_nb[c] |= nbhd[block];
          } else {
            color_nb.push_back(nbhd[block]);
          }
          search(rest & ~block, std::max(used, c + 1));
          if (c < used) {
            color_nb[c] = saved;
          } else {
            color_nb.pop_back();
          }
          blocks.pop_back();
          colors.pop_back();
        }
      }
      if (sub == 0) break;
    }
  };
  search(full, 0);

  if (witness) {
    witness->backend = Backend::Classical;
    witness->r = r;
    witness->source = "exhaustive";
    witness->classical.assign(best, {});
    double achieved = 0.0;
    const ClassicalQuantumMetric metric{space};
    for (std::size_t i = 0; i < best_blocks.size(); ++i) {
      Subset s = mask_to_subset(best_blocks[i]);
      achieved = std::max(achieved, diam_classical(metric, s));
      witness->classical[best_colors[i]].push_back(std::move(s));
    }
    witness->R = achieved;
  }
  return best - 1;
}

AsdimResult asdim_at_scale(const FiniteMetricSpace& space, double r,
                           std::optional<double> R_bound, std::size_t exhaustive_limit) {
  if (!(r > 0.0)) throw std::invalid_argument("asdim_at_scale: r > 0 required");
  AsdimResult res;
  res.r = r;
  res.R_bound = R_bound.value_or(4.0 * r);
  GreedyResult g = greedy_cover(space, r, space.size());
  if (g.ok && within(g.cover.R, res.R_bound)) {
    res.greedy_value = g.cover.n_colors() - 1;
    res.value = *res.greedy_value;
    res.witness = g.cover;
  }
  if (space.size() <= std::min<std::size_t>(exhaustive_limit, 10)) {
    CoverFamily w;
    res.exhaustive_value = asdim_exhaustive(space, r, res.R_bound, &w);
    res.value = *res.exhaustive_value;
    res.exact = true;
    if (!res.greedy_value || *res.exhaustive_value < *res.greedy_value) res.witness = std::move(w);
  } else if (!res.greedy_value) {
    throw std::runtime_error("asdim_at_scale: greedy cover exceeds R_bound and |X| is too large for exhaustive search");
  }
  return res;
}

// ---------------------------------------------------------------------------
// Saturated union

namespace {

void check_nonempty(const std::vector<Subset>& fam, const char* name) {
  for (std::size_t i = 0; i < fam.size(); ++i) {
    if (fam[i].empty()) {
      std::ostringstream os;
      os << "saturated_union: " << name << "[" << i << "] is empty";
      throw HypothesisError("nonempty", os.str());
    }
  }
}

void check_disjoint(const ClassicalQuantumMetric& metric, const std::vector<Subset>& fam,
                    double s, const char* name, const char* clause) {
  for (std::size_t i = 0; i < fam.size(); ++i) {
    for (std::size_t j = i + 1; j < fam.size(); ++j) {
      if (!r_disjoint(metric, fam[i], fam[j], s)) {
        std::ostringstream os;
        os << "saturated_union: " << name << " is not " << s << "-disjoint (members " << i
           << " and " << j << ")";
        throw HypothesisError(clause, os.str());
      }
    }
  }
}

void check_bounded(const ClassicalQuantumMetric& metric, const std::vector<Subset>& fam,
                   double bound, const char* name, const char* clause) {
  for (std::size_t i = 0; i < fam.size(); ++i) {
    const double d = diam_classical(metric, fam[i]);
    if (!within(d, bound)) {
      std::ostringstream os;
      os << "saturated_union: " << name << "[" << i << "] has diameter " << d << " > " << bound;
      throw HypothesisError(clause, os.str());
    }
  }
}

}  // namespace

SaturatedResult saturated_union(const ClassicalQuantumMetric& metric,
                                const std::vector<Subset>& p_fam,
                                const std::vector<Subset>& q_fam, double r, double R, double D) {
  if (!(r > 0.0)) throw std::invalid_argument("saturated_union: r > 0 required");
  if (!(R > r)) throw HypothesisError("R>r", "saturated_union: requires R > r");
  check_nonempty(p_fam, "P");
  check_nonempty(q_fam, "Q");
  check_disjoint(metric, p_fam, r, "P", "P r-disjoint");
  check_bounded(metric, p_fam, R, "P", "P R-bounded");
  check_disjoint(metric, q_fam, 7.0 * R, "Q", "Q 7R-disjoint");
  check_bounded(metric, q_fam, D, "Q", "Q D-bounded");

  const std::size_t n = metric.size();
  std::vector<std::vector<bool>> p_nb, q_nb;
  for (const auto& p : p_fam) p_nb.push_back(indicator(n, neighborhood(metric, p, r)));
  for (const auto& q : q_fam) q_nb.push_back(indicator(n, neighborhood(metric, q, r)));

  SaturatedResult res;
  std::vector<bool> absorbed(p_fam.size(), false);
  for (std::size_t j = 0; j < q_fam.size(); ++j) {
    std::vector<bool> merged = indicator(n, q_fam[j]);
    for (std::size_t i = 0; i < p_fam.size(); ++i) {
      if (intersects(p_nb[i], q_nb[j])) {
        absorbed[i] = true;
        for (auto x : p_fam[i]) merged[x] = true;
      }
    }
    Subset s;
    for (std::size_t x = 0; x < n; ++x) {
      if (merged[x]) s.push_back(x);
    }
    res.color.push_back(std::move(s));
  }
  for (std::size_t i = 0; i < p_fam.size(); ++i) {
    if (!absorbed[i]) res.color.push_back(p_fam[i]);
  }

  res.bound = D + 2.0 * (R + D + 4.0 * r);
  res.disjoint = true;
  for (std::size_t i = 0; i < res.color.size() && res.disjoint; ++i) {
    for (std::size_t j = i + 1; j < res.color.size(); ++j) {
      if (!r_disjoint(metric, res.color[i], res.color[j], r)) {
        res.disjoint = false;
        break;
      }
    }
  }
  res.bounded = true;
  for (const auto& s : res.color) {
    if (!within(diam_classical(metric, s), res.bound)) res.bounded = false;
  }
  return res;
}

QuantumSaturatedResult saturated_union(const GraphQuantumMetric& metric,
                                       const std::vector<Projection>& p_fam,
                                       const std::vector<Projection>& q_fam, double r, double R,
                                       double D, int diam_trials, std::uint64_t seed) {
  if (!(r > 0.0)) throw std::invalid_argument("saturated_union: r > 0 required");
  if (!(R > r)) throw HypothesisError("R>r", "saturated_union: requires R > r");
  const auto& tol = metric.tolerance();
  const Eigen::Index n = metric.n();
  std::uint64_t stream = 0;
  auto lower = [&](const Projection& p) {
    return diam_bracket(metric, p, diam_trials, derive_seed(seed, stream++)).lower;
  };
  auto check = [&](const std::vector<Projection>& fam, double s, double bound, const char* name) {
    for (std::size_t i = 0; i < fam.size(); ++i) {
      if (fam[i].is_zero()) {
        throw HypothesisError("nonempty", std::string("saturated_union: zero member in ") + name);
      }
      if (!within(lower(fam[i]), bound)) {
        std::ostringstream os;
        os << "saturated_union: " << name << "[" << i << "] has diameter above " << bound;
        throw HypothesisError(std::string(name) + " bounded", os.str());
      }
      for (std::size_t j = i + 1; j < fam.size(); ++j) {
        if (!r_disjoint(metric, fam[i], fam[j], s)) {
          std::ostringstream os;
          os << "saturated_union: " << name << " is not " << s << "-disjoint (members " << i
             << " and " << j << ")";
          throw HypothesisError(std::string(name) + " disjoint", os.str());
        }
      }
    }
  };
  check(p_fam, r, R, "P");
  check(q_fam, 7.0 * R, D, "Q");

  std::vector<Projection> p_nb, q_nb;
  for (const auto& p : p_fam) p_nb.push_back(neighborhood(metric, p, r));
  for (const auto& q : q_fam) q_nb.push_back(neighborhood(metric, q, r));

  QuantumSaturatedResult res;
  std::vector<bool> absorbed(p_fam.size(), false);
  for (std::size_t j = 0; j < q_fam.size(); ++j) {
    std::vector<Projection> parts{q_fam[j]};
    for (std::size_t i = 0; i < p_fam.size(); ++i) {
      if (proj_product_nonzero(p_nb[i], q_nb[j], tol)) {
        absorbed[i] = true;
        parts.push_back(p_fam[i]);
      }
    }
    res.color.push_back(proj_join(parts, n, tol));
  }
  for (std::size_t i = 0; i < p_fam.size(); ++i) {
    if (!absorbed[i]) res.color.push_back(p_fam[i]);
  }
  res.bound = D + 2.0 * (R + D + 4.0 * r);
  res.disjoint = true;
  for (std::size_t i = 0; i < res.color.size() && res.disjoint; ++i) {
    for (std::size_t j = i + 1; j < res.color.size(); ++j) {
      if (!r_disjoint(metric, res.color[i], res.color[j], r)) {
        res.disjoint = false;
        break;
      }
    }
  }
  res.bounded = BoundCheck::NotRefuted;
  for (const auto& p : res.color) {
    if (!within(lower(p), res.bound)) res.bounded = BoundCheck::Refuted;
  }
  return res;
}

// ---------------------------------------------------------------------------
// Permanence constructions

CoverFamily direct_sum_cover(const CoverFamily& left, const CoverFamily& right,
                             std::size_t left_size, std::size_t right_size) {
  if (left.backend != right.backend) {
    throw std::invalid_argument("direct_sum_cover: backend mismatch");
  }
  if (left.r != right.r) throw std::invalid_argument("direct_sum_cover: covers use different r");
  CoverFamily out;
  out.backend = left.backend;
  out.r = left.r;
  out.R = std::max(left.R, right.R);
  out.source = "direct_sum";
  const std::size_t colors = std::max(left.n_colors(), right.n_colors());
  if (out.backend == Backend::Classical) {
    out.classical.resize(colors);
    for (std::size_t c = 0; c < left.classical.size(); ++c) {
      for (const auto& s : left.classical[c]) out.classical[c].push_back(s);
    }
    for (std::size_t c = 0; c < right.classical.size(); ++c) {
      for (const auto& s : right.classical[c]) {
        out.classical[c].push_back(shift_subset(s, left_size));
      }
    }
  } else {
    out.quantum.resize(colors);
    const auto nl = static_cast<Eigen::Index>(left_size);
    const auto nr = static_cast<Eigen::Index>(right_size);
    for (std::size_t c = 0; c < left.quantum.size(); ++c) {
      for (const auto& p : left.quantum[c]) out.quantum[c].push_back(embed_left(p, nr));
    }
    for (std::size_t c = 0; c < right.quantum.size(); ++c) {
      for (const auto& q : right.quantum[c]) out.quantum[c].push_back(embed_right(nl, q));
    }
  }
  return out;
}

CoverFamily union_cover(const ClassicalQuantumMetric& metric, const CoverFamily& cov1,
                        const CoverFamily& cov2, double r, double R) {
  require_backend(cov1, Backend::Classical, "union_cover");
  require_backend(cov2, Backend::Classical, "union_cover");
  const std::size_t n = metric.size();
  std::vector<bool> seen(n, false);
  for (const auto* cov : {&cov1, &cov2}) {
    for (const auto& color : cov->classical) {
      for (const auto& s : color) {
        for (auto x : s) {
          if (x >= n) throw std::out_of_range("union_cover: point index out of range");
          seen[x] = true;
        }
      }
    }
  }
  for (std::size_t x = 0; x < n; ++x) {
    if (!seen[x]) {
      std::ostringstream os;
      os << "union_cover: the two covers do not cover point " << x;
      throw HypothesisError("covering", os.str());
    }
  }
  const double D = cov2.R;
  const std::size_t colors = std::max(cov1.n_colors(), cov2.n_colors());
  CoverFamily out;
  out.backend = Backend::Classical;
  out.r = r;
  out.R = D + 2.0 * (R + D + 4.0 * r);
  out.source = "union";
  static const std::vector<Subset> empty;
  for (std::size_t c = 0; c < colors; ++c) {
    const auto& p = c < cov1.classical.size() ? cov1.classical[c] : empty;
    const auto& q = c < cov2.classical.size() ? cov2.classical[c] : empty;
    out.classical.push_back(saturated_union(metric, p, q, r, R, D).color);
  }
  const CoverReport rep = validate_cover(metric, out);
  if (!rep.valid()) {
    throw HypothesisError("output", "union_cover: output failed validation");
  }
  return out;
}

// ---------------------------------------------------------------------------
// Counting certificate

CountingCertificate certify_counting(const ExpanderSpec& spec, const CoverFamily& fam,
                                     double delta, std::size_t m, const ToleranceConfig& tol,
                                     std::uint64_t seed) {
  require_backend(fam, Backend::Quantum, "certify_counting");
  if (m < 1) throw std::invalid_argument("certify_counting: m >= 1 required");
  if (!(delta > 1.0)) throw std::invalid_argument("certify_counting: delta > 1 required");
  const KrausSet kraus = spec.kraus(tol);
  const GapReport gap = spectral_gap(kraus, tol);
  if (!(gap.epsilon > tol.zero_atol)) {
    std::ostringstream os;
    os << "certify_counting: measured gap " << gap.epsilon << " is not positive";
    throw std::invalid_argument(os.str());
  }
  return certify_counting(GraphQuantumMetric(kraus, tol), gap.epsilon, fam, delta, m, seed);
}

CountingCertificate certify_counting(const GraphQuantumMetric& metric, double epsilon,
                                     const CoverFamily& fam, double delta, std::size_t m,
                                     std::uint64_t seed) {
  require_backend(fam, Backend::Quantum, "certify_counting");
  if (m < 1) throw std::invalid_argument("certify_counting: m >= 1 required");
  if (!(delta > 1.0)) throw std::invalid_argument("certify_counting: delta > 1 required");
  if (!(epsilon > metric.tolerance().zero_atol)) {
    throw std::invalid_argument("certify_counting: gap must be positive");
  }
  const Eigen::Index n = metric.n();

  CountingCertificate cert;
  cert.n_colors = fam.n_colors();
  cert.m = m;
  cert.delta = delta;
  cert.epsilon = epsilon;
  cert.eps_prime = (1.0 - epsilon) / 2.0;
  cert.ambient_rank = n;
  cert.r_used = static_cast<double>(m) * delta;

  CoverFamily at_scale = fam;
  at_scale.r = cert.r_used;
  cert.cover = validate_cover(metric, at_scale, 8, seed);

  const double growth = std::pow(1.0 + cert.eps_prime, static_cast<double>(m));
  bool sums_ok = true;
  bool growth_ok = true;
  for (std::size_t c = 0; c < fam.quantum.size(); ++c) {
    Eigen::Index rank_sum = 0;
    Eigen::Index nb_sum = 0;
    for (std::size_t i = 0; i < fam.quantum[c].size(); ++i) {
      const Projection& q = fam.quantum[c][i];
      if (q.is_zero()) continue;
      bool in_regime = true;
      for (std::size_t k = 0; k < m && in_regime; ++k) {
        const Eigen::Index rk =
            k == 0 ? q.rank() : neighborhood(metric, q, static_cast<double>(k) * delta).rank();
        if (2 * rk > n) in_regime = false;
      }
      if (!in_regime) {
        cert.excluded.push_back({c, i});
        continue;
      }
      rank_sum += q.rank();
      nb_sum += neighborhood(metric, q, cert.r_used).rank();
    }
    cert.per_color_rank_sums.push_back(rank_sum);
    cert.per_color_nbhd_rank_sums.push_back(nb_sum);
    const bool within_ambient = nb_sum <= n;
    const bool grows = static_cast<double>(nb_sum) >=
                       growth * static_cast<double>(rank_sum) - 1e-9;
    cert.per_color_sum_within_ambient.push_back(within_ambient);
    cert.per_color_growth.push_back(grows);
    sums_ok = sums_ok && within_ambient;
    growth_ok = growth_ok && grows;
  }

  cert.obstruction = growth - 1.0 > static_cast<double>(cert.n_colors) - 1.0;
  cert.all_checks_passed =
      cert.cover.valid() && cert.excluded.empty() && sums_ok && growth_ok;
  cert.contradiction = cert.obstruction && cert.all_checks_passed;

  std::ostringstream os;
  if (!cert.cover.members_nonempty) {
    os << "empty member (" << ref_string(*cert.cover.empty_member) << ")";
  } else if (!cert.cover.covering) {
    os << "covering: join misses rank " << cert.cover.uncovered_rank;
  } else if (!cert.cover.disjoint) {
    os << "disjointness at r = " << cert.r_used << " (" << ref_string(cert.cover.overlap->first)
       << " vs " << ref_string(cert.cover.overlap->second) << ")";
  } else if (cert.cover.bounded == BoundCheck::Refuted) {
    os << "boundedness: " << ref_string(*cert.cover.unbounded_member)
       << " has diameter above R = " << fam.R;
  } else if (!sums_ok) {
    os << "rank sum of neighborhoods exceeds ambient rank";
  } else if (!cert.excluded.empty()) {
    os << "precondition: " << ref_string(cert.excluded.front())
       << " exceeds rank n/2 along the neighborhood chain";
  } else if (!growth_ok) {
    os << "growth: neighborhood ranks below (1+eps')^m times member ranks";
  }
  cert.failure = os.str();
  return cert;
}

}  // namespace qcoarse
