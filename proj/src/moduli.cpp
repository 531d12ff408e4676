#include "qcoarse/moduli.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <set>
#include <sstream>
#include <stdexcept>

namespace qcoarse {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

ExtendedDistance ext(double v) { return ExtendedDistance::from_double(v); }

}  // namespace

std::vector<double> moduli_thresholds(const FiniteMetricSpace& x, const FiniteMetricSpace& y) {
  std::set<double> s;
  for (double v : x.realized_distances()) s.insert(v);
  for (double v : y.realized_distances()) s.insert(v);
  return {s.begin(), s.end()};
}

void validate_map(const PointMap& f, const FiniteMetricSpace& x, const FiniteMetricSpace& y) {
  if (f.map.size() != x.size()) {
    std::ostringstream os;
    os << "map: expected " << x.size() << " entries, got " << f.map.size();
    throw std::invalid_argument(os.str());
  }
  for (std::size_t i = 0; i < f.map.size(); ++i) {
    if (f.map[i] >= y.size()) {
      std::ostringstream os;
      os << "map: f(" << i << ") = " << f.map[i] << " lies outside the target space";
      throw std::out_of_range(os.str());
    }
  }
}

ModuliTable classical_moduli(const PointMap& f, const FiniteMetricSpace& x,
                             const FiniteMetricSpace& y) {
  validate_map(f, x, y);
  ModuliTable t;
  t.thresholds = moduli_thresholds(x, y);
  const std::size_t n = x.size();
  for (double th : t.thresholds) {
    double om = 0.0, rh = kInf, omt = kInf, rht = 0.0;
    for (std::size_t a = 0; a < n; ++a) {
      for (std::size_t b = 0; b < n; ++b) {
        const double dx = x(a, b);
        const double dy = y(f.map[a], f.map[b]);
        if (dx <= th) om = std::max(om, dy);
        if (dx >= th) rh = std::min(rh, dy);
        if (dy >= th) omt = std::min(omt, dx);
        if (dy <= th) rht = std::max(rht, dx);
      }
    }
    t.omega.push_back(ext(om));
    t.rho.push_back(ext(rh));
    t.omega_tilde.push_back(ext(omt));
    t.rho_tilde.push_back(ext(rht));
  }
  for (double v : x.realized_distances()) t.x_diameter = max(t.x_diameter, ext(v));
  return t;
}

namespace {

/// Subset distances and diameters, indexed by bitmask.
class SubsetGeometry {
 public:
  explicit SubsetGeometry(const FiniteMetricSpace& space) : space_(space), n_(space.size()) {
    if (n_ <= 6) materialized_ = std::make_unique<MaterializedClassicalMetric>(space);
    const std::uint32_t count = 1u << n_;
    point_to_set_.assign(n_ * count, kInf);
    for (std::size_t p = 0; p < n_; ++p) {
      for (std::uint32_t s = 1; s < count; ++s) {
        double best = kInf;
        for (std::size_t q = 0; q < n_; ++q) {
          if (s & (1u << q)) best = std::min(best, space(p, q));
        }
        point_to_set_[p * count + s] = best;
      }
    }
    diam_.assign(count, 0.0);
    for (std::uint32_t s = 1; s < count; ++s) {
      if (materialized_) {
        diam_[s] = materialized_->diam(s).as_double();
      } else {
        double d = 0.0;
        for (std::size_t p = 0; p < n_; ++p) {
          if (s & (1u << p)) d = std::max(d, farthest(p, s));
        }
        diam_[s] = d;
      }
    }
  }

  /// dist(chi_S, chi_T); +inf when either is empty.
  double dist(std::uint32_t s, std::uint32_t t) const {
    if (s == 0 || t == 0) return kInf;
    if (materialized_) return materialized_->dist(s, t).as_double();
    double best = kInf;
    const std::uint32_t count = 1u << n_;
    for (std::size_t p = 0; p < n_; ++p) {
      if (s & (1u << p)) best = std::min(best, point_to_set_[p * count + t]);
    }
    return best;
  }

  double diam(std::uint32_t s) const { return diam_[s]; }

 private:
  double farthest(std::size_t p, std::uint32_t s) const {
    double d = 0.0;
    for (std::size_t q = 0; q < n_; ++q) {
      if (s & (1u << q)) d = std::max(d, space_(p, q));
    }
    return d;
  }

  const FiniteMetricSpace& space_;
  std::size_t n_;
  std::unique_ptr<MaterializedClassicalMetric> materialized_;
  std::vector<double> point_to_set_;
  std::vector<double> diam_;
};

}  // namespace

ModuliTable quantum_moduli_bruteforce(const PointMap& f, const FiniteMetricSpace& x,
                                      const FiniteMetricSpace& y) {
  validate_map(f, x, y);
  if (x.size() > 12 || y.size() > 12) {
    throw std::invalid_argument("quantum_moduli_bruteforce: |X|, |Y| <= 12 required");
  }
  const SubsetGeometry gx(x);
  const SubsetGeometry gy(y);

  const std::uint32_t count_y = 1u << y.size();
  std::vector<std::uint32_t> pre(count_y, 0);
  for (std::uint32_t s = 0; s < count_y; ++s) {
    for (std::size_t a = 0; a < x.size(); ++a) {
      if (s & (1u << f.map[a])) pre[s] |= 1u << a;
    }
  }

  ModuliTable t;
  t.thresholds = moduli_thresholds(x, y);
  const std::size_t k = t.thresholds.size();
  // bucket_w[i]: min dist_X over pairs whose dist_Y lies in [t_i, t_{i+1});
  // bucket_r[i]: max diam_X over S whose diam_Y lies in (t_{i-1}, t_i].
  std::vector<double> bucket_w(k, kInf);
  std::vector<double> bucket_r(k, 0.0);
  for (std::uint32_t s = 0; s < count_y; ++s) {
    for (std::uint32_t u = 0; u < count_y; ++u) {
      const double a = gy.dist(s, u);
      const auto idx = static_cast<std::size_t>(
          std::upper_bound(t.thresholds.begin(), t.thresholds.end(), a) - t.thresholds.begin());
      if (idx == 0) continue;
      bucket_w[idx - 1] = std::min(bucket_w[idx - 1], gx.dist(pre[s], pre[u]));
    }
    const double dy = gy.diam(s);
    const auto idx = static_cast<std::size_t>(
        std::lower_bound(t.thresholds.begin(), t.thresholds.end(), dy) - t.thresholds.begin());
    if (idx < k) bucket_r[idx] = std::max(bucket_r[idx], gx.diam(pre[s]));
  }
  t.omega_tilde.resize(k);
  t.rho_tilde.resize(k);
  double run = kInf;
  for (std::size_t i = k; i-- > 0;) {
    run = std::min(run, bucket_w[i]);
    t.omega_tilde[i] = ext(run);
  }
  run = 0.0;
  for (std::size_t i = 0; i < k; ++i) {
    run = std::max(run, bucket_r[i]);
    t.rho_tilde[i] = ext(run);
  }
  for (double v : x.realized_distances()) t.x_diameter = max(t.x_diameter, ext(v));
  return t;
}

ExtendedDistance omega_tilde_at(const PointMap& f, const FiniteMetricSpace& x,
                                const FiniteMetricSpace& y, const ExtendedDistance& t) {
  validate_map(f, x, y);
  double best = kInf;
  for (std::size_t a = 0; a < x.size(); ++a) {
    for (std::size_t b = 0; b < x.size(); ++b) {
      if (t <= ext(y(f.map[a], f.map[b]))) best = std::min(best, x(a, b));
    }
  }
  return ext(best);
}

ExtendedDistance rho_tilde_at(const PointMap& f, const FiniteMetricSpace& x,
                              const FiniteMetricSpace& y, const ExtendedDistance& t) {
  validate_map(f, x, y);
  double best = 0.0;
  for (std::size_t a = 0; a < x.size(); ++a) {
    for (std::size_t b = 0; b < x.size(); ++b) {
      if (ext(y(f.map[a], f.map[b])) <= t) best = std::max(best, x(a, b));
    }
  }
  return ext(best);
}

PointMap compose(const PointMap& g, const PointMap& f) {
  PointMap out;
  for (auto v : f.map) {
    if (v >= g.map.size()) throw std::out_of_range("compose: maps do not chain");
    out.map.push_back(g.map[v]);
  }
  return out;
}

ExtendedDistance lookup_omega_tilde(const ModuliTable& table, double t) {
  const auto it = std::lower_bound(table.thresholds.begin(), table.thresholds.end(), t);
  if (it == table.thresholds.end()) return ExtendedDistance::infinite();
  return table.omega_tilde[static_cast<std::size_t>(it - table.thresholds.begin())];
}

ExtendedDistance lookup_rho_tilde(const ModuliTable& table, double t) {
  const auto it = std::upper_bound(table.thresholds.begin(), table.thresholds.end(), t);
  if (it == table.thresholds.begin()) return ExtendedDistance::of(0.0);
  return table.rho_tilde[static_cast<std::size_t>(it - table.thresholds.begin()) - 1];
}

CoarseFlags coarse_flags(const ModuliTable& table) {
  CoarseFlags f;
  for (const auto& v : table.omega_tilde) {
    if (v.finite() && v == table.x_diameter) f.coarse_at_truncation = true;
  }
  f.expanding_at_truncation = std::all_of(table.rho_tilde.begin(), table.rho_tilde.end(),
                                          [](const ExtendedDistance& v) { return v.finite(); });
  return f;
}

bool monotone(const ModuliTable& table) {
  auto nondecreasing = [](const std::vector<ExtendedDistance>& v) {
    for (std::size_t i = 1; i < v.size(); ++i) {
      if (v[i] < v[i - 1]) return false;
    }
    return true;
  };
  return nondecreasing(table.omega) && nondecreasing(table.rho) &&
         nondecreasing(table.omega_tilde) && nondecreasing(table.rho_tilde);
}

EquiCoarseCheck check_equi_coarse(const EquiCoarseData& data,
                                  const std::vector<ModuliTable>& members) {
  EquiCoarseCheck out;
  for (std::size_t i = 0; i < members.size() && out.ok; ++i) {
    for (const auto& [t, lo] : data.f_lower) {
      if (lookup_omega_tilde(members[i], t) < lo) {
        out = {false, i, t, "f(t) <= omega~(t)"};
        break;
      }
    }
    if (!out.ok) break;
    for (const auto& [t, hi] : data.g_upper) {
      if (hi < lookup_rho_tilde(members[i], t)) {
        out = {false, i, t, "rho~(t) <= g(t)"};
        break;
      }
    }
  }
  return out;
}

}  // namespace qcoarse
