#pragma once

// Moduli of expansion and compression for maps between finite metric spaces,
// and their counterparts for the induced quantum function chi_S -> chi_{f^-1 S}
// computed by enumerating subset projections.

#include "qcoarse/qmetric.hpp"

#include <optional>
#include <string>
#include <vector>

namespace qcoarse {

/// f as a table of point indices: f(x) = map[x].
struct PointMap {
  std::vector<std::size_t> map;
};

/// Conventions: inf over the empty set is +inf, sup over the empty set is 0.
struct ModuliTable {
  std::vector<double> thresholds;             // realized finite distances of X and Y
  std::vector<ExtendedDistance> omega;        // sup{d_Y(fx,fy) : d_X(x,y) <= t}
  std::vector<ExtendedDistance> rho;          // inf{d_Y(fx,fy) : d_X(x,y) >= t}
  std::vector<ExtendedDistance> omega_tilde;  // inf{d_X(x,y) : d_Y(fx,fy) >= t}
  std::vector<ExtendedDistance> rho_tilde;    // sup{d_X(x,y) : d_Y(fx,fy) <= t}
  ExtendedDistance x_diameter = ExtendedDistance::of(0.0);  // largest finite d_X
  std::string domain_note = "finite truncation: values only at realized thresholds";
};

/// Thresholds: union of the realized finite distances of X and Y.
std::vector<double> moduli_thresholds(const FiniteMetricSpace& x, const FiniteMetricSpace& y);

void validate_map(const PointMap& f, const FiniteMetricSpace& x, const FiniteMetricSpace& y);

ModuliTable classical_moduli(const PointMap& f, const FiniteMetricSpace& x,
                             const FiniteMetricSpace& y);

/// omega~ and rho~ of phi_f over all pairs of subsets of Y (|X|, |Y| <= 12).
/// Subset distances and diameters come from the materialized V_t for a space
/// with at most 6 points, otherwise from the subset formula.
/// omega and rho are left empty.
ModuliTable quantum_moduli_bruteforce(const PointMap& f, const FiniteMetricSpace& x,
                                      const FiniteMetricSpace& y);

/// Exact omega~_f(t) and rho~_f(t) at any t, including t = +inf.
ExtendedDistance omega_tilde_at(const PointMap& f, const FiniteMetricSpace& x,
                                const FiniteMetricSpace& y, const ExtendedDistance& t);
ExtendedDistance rho_tilde_at(const PointMap& f, const FiniteMetricSpace& x,
                              const FiniteMetricSpace& y, const ExtendedDistance& t);

PointMap compose(const PointMap& g, const PointMap& f);  // g after f

/// omega~ is evaluated at the smallest threshold >= t (+inf beyond the
/// largest), rho~ at the largest threshold <= t.
ExtendedDistance lookup_omega_tilde(const ModuliTable& table, double t);
ExtendedDistance lookup_rho_tilde(const ModuliTable& table, double t);

struct CoarseFlags {
  bool coarse_at_truncation = false;     // some omega~ value reaches diam(X)
  bool expanding_at_truncation = false;  // rho~ finite at every threshold
  std::string caveat =
      "coarse and expanding are asymptotic; flags read the finite table only";
};

CoarseFlags coarse_flags(const ModuliTable& table);

bool monotone(const ModuliTable& table);

/// Bounding functions for a family of maps, as step tables over t.
struct EquiCoarseData {
  std::vector<std::pair<double, ExtendedDistance>> f_lower;
  std::vector<std::pair<double, ExtendedDistance>> g_upper;
};

struct EquiCoarseCheck {
  bool ok = true;
  std::optional<std::size_t> failing_member;
  std::optional<double> failing_t;
  std::string clause;
};

/// f_lower(t) <= omega~(t) and rho~(t) <= g_upper(t) for every member at
/// every t listed in the bounding tables, with member tables read through
/// lookup_omega_tilde / lookup_rho_tilde.
EquiCoarseCheck check_equi_coarse(const EquiCoarseData& data,
                                  const std::vector<ModuliTable>& members);

}  // namespace qcoarse
