#include "qcoarse/io.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

namespace qcoarse {

namespace {

std::string at(const std::string& path, const std::string& key) { return path + "." + key; }
std::string at(const std::string& path, std::size_t i) {
  return path + "[" + std::to_string(i) + "]";
}

const json& field(const json& j, const std::string& key, const std::string& path) {
  if (!j.is_object()) throw SchemaError(path, "expected an object");
  auto it = j.find(key);
  if (it == j.end()) throw SchemaError(path, "missing field '" + key + "'");
  return *it;
}

const json& array(const json& j, const std::string& path) {
  if (!j.is_array()) throw SchemaError(path, "expected an array");
  return j;
}

std::size_t uint_from_json(const json& j, const std::string& path) {
  if (!j.is_number_integer() || j.get<long long>() < 0) {
    throw SchemaError(path, "expected a nonnegative integer");
  }
  return j.get<std::size_t>();
}

std::string string_from_json(const json& j, const std::string& path) {
  if (!j.is_string()) throw SchemaError(path, "expected a string");
  return j.get<std::string>();
}

bool bool_from_json(const json& j, const std::string& path) {
  if (!j.is_boolean()) throw SchemaError(path, "expected a boolean");
  return j.get<bool>();
}

template <class F>
auto rethrow_as_schema(const std::string& path, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const SchemaError&) {
    throw;
  } catch (const std::exception& e) {
    throw SchemaError(path, e.what());
  }
}

json subset_to_json(const Subset& s) { return json(s); }

json member_ref(const MemberRef& m) { return {{"color", m.color}, {"index", m.index}}; }

}  // namespace

json load_json_file(const std::string& file) {
  std::ifstream in(file);
  if (!in) throw SchemaError("$", "cannot open file '" + file + "'");
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw SchemaError("$", std::string("malformed JSON in '") + file + "': " + e.what());
  }
}

const json& unwrap_report(const json& j) {
  if (j.is_object() && j.contains("results") && j.contains("command")) return j["results"];
  return j;
}

json real_to_json(double v) {
  if (std::isinf(v) && v > 0) return "inf";
  return v;
}

double real_from_json(const json& j, const std::string& path) {
  if (j.is_string() && j.get<std::string>() == "inf") {
    return std::numeric_limits<double>::infinity();
  }
  if (!j.is_number()) throw SchemaError(path, "expected a number or \"inf\"");
  return j.get<double>();
}

// ---------------------------------------------------------------------------

json to_json(const Matrix& m) {
  json re = json::array(), im = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index k = 0; k < m.cols(); ++k) {
      re.push_back(m(i, k).real());
      im.push_back(m(i, k).imag());
    }
  }
  return {{"rows", m.rows()}, {"cols", m.cols()}, {"re", re}, {"im", im}};
}

Matrix matrix_from_json(const json& j, const std::string& path) {
  const auto rows = uint_from_json(field(j, "rows", path), at(path, "rows"));
  const auto cols = uint_from_json(field(j, "cols", path), at(path, "cols"));
  if (rows == 0) throw SchemaError(at(path, "rows"), "must be positive");
  const json& re = array(field(j, "re", path), at(path, "re"));
  const json& im = array(field(j, "im", path), at(path, "im"));
  const std::size_t count = rows * cols;
  if (re.size() != count) {
    throw SchemaError(at(path, "re"), "expected " + std::to_string(count) + " entries");
  }
  if (im.size() != count) {
    throw SchemaError(at(path, "im"), "expected " + std::to_string(count) + " entries");
  }
  Matrix m(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
  for (std::size_t idx = 0; idx < count; ++idx) {
    if (!re[idx].is_number()) throw SchemaError(at(at(path, "re"), idx), "expected a number");
    if (!im[idx].is_number()) throw SchemaError(at(at(path, "im"), idx), "expected a number");
    const double a = re[idx].get<double>(), b = im[idx].get<double>();
    if (!std::isfinite(a) || !std::isfinite(b)) {
      throw SchemaError(at(path, "re"), "non-finite entry");
    }
    m(static_cast<Eigen::Index>(idx / cols), static_cast<Eigen::Index>(idx % cols)) = {a, b};
  }
  return m;
}

json to_json(const Projection& p) {
  return {{"n", p.ambient_dim()}, {"range_basis", to_json(p.range_basis())}};
}

Projection projection_from_json(const json& j, const std::string& path,
                                const ToleranceConfig& tol) {
  const auto n = uint_from_json(field(j, "n", path), at(path, "n"));
  const std::string rp = at(path, "range_basis");
  Matrix r = matrix_from_json(field(j, "range_basis", path), rp);
  if (static_cast<std::size_t>(r.rows()) != n) {
    throw SchemaError(rp, "range_basis must have n rows");
  }
  return rethrow_as_schema(rp, [&] { return Projection::from_orthonormal(std::move(r), tol); });
}

json to_json(const OperatorSubspace& s) {
  json basis = json::array();
  for (const auto& b : s.basis()) basis.push_back(to_json(b));
  return {{"n", s.ambient_dim()}, {"basis", basis}};
}

OperatorSubspace subspace_from_json(const json& j, const std::string& path,
                                    const ToleranceConfig& tol) {
  const auto n = uint_from_json(field(j, "n", path), at(path, "n"));
  const std::string bp = at(path, "basis");
  const json& arr = array(field(j, "basis", path), bp);
  std::vector<Matrix> mats;
  for (std::size_t i = 0; i < arr.size(); ++i) {
    mats.push_back(matrix_from_json(arr[i], at(bp, i)));
    if (static_cast<std::size_t>(mats.back().rows()) != n ||
        static_cast<std::size_t>(mats.back().cols()) != n) {
      throw SchemaError(at(bp, i), "expected an n x n matrix");
    }
  }
  return rethrow_as_schema(bp, [&] { return subspace_from_spanning(mats, tol); });
}

json to_json(const KrausSet& k) {
  json ops = json::array();
  for (const auto& op : k.ops()) ops.push_back(to_json(op));
  return {{"n", k.n()}, {"ops", ops}};
}

KrausSet kraus_from_json(const json& j, const std::string& path, const ToleranceConfig& tol) {
  const auto n = uint_from_json(field(j, "n", path), at(path, "n"));
  const std::string op = at(path, "ops");
  const json& arr = array(field(j, "ops", path), op);
  if (arr.empty()) throw SchemaError(op, "at least one operator required");
  std::vector<Matrix> ops;
  for (std::size_t i = 0; i < arr.size(); ++i) {
    ops.push_back(matrix_from_json(arr[i], at(op, i)));
    if (static_cast<std::size_t>(ops.back().rows()) != n ||
        static_cast<std::size_t>(ops.back().cols()) != n) {
      throw SchemaError(at(op, i), "expected an n x n matrix");
    }
  }
  return rethrow_as_schema(op, [&] { return KrausSet(std::move(ops), tol); });
}

json to_json(const FiniteMetricSpace& s) {
  json d = json::array();
  for (std::size_t x = 0; x < s.size(); ++x) {
    json row = json::array();
    for (std::size_t y = 0; y < s.size(); ++y) row.push_back(real_to_json(s(x, y)));
    d.push_back(row);
  }
  return {{"labels", s.labels()}, {"d", d}};
}

FiniteMetricSpace space_from_json(const json& j, const std::string& path) {
  const std::string lp = at(path, "labels");
  const json& labels = array(field(j, "labels", path), lp);
  std::vector<std::string> names;
  for (std::size_t i = 0; i < labels.size(); ++i) names.push_back(string_from_json(labels[i], at(lp, i)));
  const std::string dp = at(path, "d");
  const json& rows = array(field(j, "d", path), dp);
  const auto n = static_cast<Eigen::Index>(names.size());
  if (rows.size() != names.size()) throw SchemaError(dp, "expected one row per label");
  Eigen::MatrixXd d(n, n);
  for (Eigen::Index x = 0; x < n; ++x) {
    const std::string rp = at(dp, static_cast<std::size_t>(x));
    const json& row = array(rows[static_cast<std::size_t>(x)], rp);
    if (row.size() != names.size()) throw SchemaError(rp, "expected one entry per label");
    for (Eigen::Index y = 0; y < n; ++y) {
      d(x, y) = real_from_json(row[static_cast<std::size_t>(y)], at(rp, static_cast<std::size_t>(y)));
    }
  }
  return rethrow_as_schema(path, [&] { return FiniteMetricSpace(std::move(names), std::move(d)); });
}

json to_json(const ExtendedDistance& d) {
  return {{"finite", d.finite()}, {"value", d.finite() ? json(d.value()) : json(nullptr)}};
}

ExtendedDistance distance_from_json(const json& j, const std::string& path) {
  const bool finite = bool_from_json(field(j, "finite", path), at(path, "finite"));
  if (!finite) return ExtendedDistance::infinite();
  const json& v = field(j, "value", path);
  if (!v.is_number()) throw SchemaError(at(path, "value"), "expected a number");
  return rethrow_as_schema(at(path, "value"),
                           [&] { return ExtendedDistance::from_double(v.get<double>()); });
}

Subset subset_from_json(const json& j, const std::string& path) {
  array(j, path);
  Subset s;
  for (std::size_t i = 0; i < j.size(); ++i) s.push_back(uint_from_json(j[i], at(path, i)));
  return normalize_subset(std::move(s));
}

json to_json(const ExpanderSpec& s) {
  json us = json::array();
  for (const auto& u : s.unitaries) us.push_back(to_json(u));
  return {{"n", s.n}, {"d", s.d}, {"unitaries", us}, {"epsilon", s.epsilon}};
}

ExpanderSpec expander_from_json(const json& j, const std::string& path,
                                const ToleranceConfig& tol) {
  ExpanderSpec s;
  s.n = static_cast<Eigen::Index>(uint_from_json(field(j, "n", path), at(path, "n")));
  s.d = uint_from_json(field(j, "d", path), at(path, "d"));
  const std::string up = at(path, "unitaries");
  const json& arr = array(field(j, "unitaries", path), up);
  if (arr.size() != s.d) throw SchemaError(up, "expected d unitaries");
  if (s.d == 0) throw SchemaError(up, "at least one unitary required");
  for (std::size_t i = 0; i < arr.size(); ++i) {
    Matrix u = matrix_from_json(arr[i], at(up, i));
    if (u.rows() != s.n || u.cols() != s.n) throw SchemaError(at(up, i), "expected an n x n matrix");
    const double res = (u.adjoint() * u - Matrix::Identity(s.n, s.n)).norm();
    if (res > tol.zero_atol) {
      std::ostringstream os;
      os << "not unitary (residual " << res << ")";
      throw SchemaError(at(up, i), os.str());
    }
    s.unitaries.push_back(std::move(u));
  }
  const json& e = field(j, "epsilon", path);
  if (!e.is_number()) throw SchemaError(at(path, "epsilon"), "expected a number");
  s.epsilon = e.get<double>();
  return s;
}

json to_json(const CoverFamily& c) {
  json colors = json::array();
  if (c.backend == Backend::Classical) {
    for (const auto& color : c.classical) {
      json members = json::array();
      for (const auto& s : color) members.push_back(subset_to_json(s));
      colors.push_back(members);
    }
  } else {
    for (const auto& color : c.quantum) {
      json members = json::array();
      for (const auto& p : color) members.push_back(to_json(p));
      colors.push_back(members);
    }
  }
  json out = {{"backend", to_string(c.backend)},
              {"r", c.r},
              {"R", real_to_json(c.R)},
              {"colors", colors}};
  if (!c.source.empty()) out["source"] = c.source;
  return out;
}

CoverFamily cover_from_json(const json& j, const std::string& path, const ToleranceConfig& tol) {
  CoverFamily c;
  const std::string backend = string_from_json(field(j, "backend", path), at(path, "backend"));
  if (backend == "classical") {
    c.backend = Backend::Classical;
  } else if (backend == "quantum") {
    c.backend = Backend::Quantum;
  } else {
    throw SchemaError(at(path, "backend"), "expected \"classical\" or \"quantum\"");
  }
  c.r = real_from_json(field(j, "r", path), at(path, "r"));
  c.R = real_from_json(field(j, "R", path), at(path, "R"));
  if (j.contains("source")) c.source = string_from_json(j["source"], at(path, "source"));
  const std::string cp = at(path, "colors");
  const json& colors = array(field(j, "colors", path), cp);
  for (std::size_t ci = 0; ci < colors.size(); ++ci) {
    const std::string mp = at(cp, ci);
    const json& members = array(colors[ci], mp);
    if (c.backend == Backend::Classical) {
      c.classical.emplace_back();
      for (std::size_t i = 0; i < members.size(); ++i) {
        c.classical.back().push_back(subset_from_json(members[i], at(mp, i)));
      }
    } else {
      c.quantum.emplace_back();
      for (std::size_t i = 0; i < members.size(); ++i) {
        c.quantum.back().push_back(projection_from_json(members[i], at(mp, i), tol));
      }
    }
  }
  return c;
}

json to_json(const MapFile& m) { return {{"from", m.from}, {"to", m.to}, {"map", m.f.map}}; }

MapFile map_from_json(const json& j, const std::string& path) {
  MapFile m;
  for (const char* key : {"from", "to"}) {
    const std::string kp = at(path, key);
    const json& arr = array(field(j, key, path), kp);
    auto& dst = std::string(key) == "from" ? m.from : m.to;
    for (std::size_t i = 0; i < arr.size(); ++i) dst.push_back(string_from_json(arr[i], at(kp, i)));
  }
  const std::string mp = at(path, "map");
  const json& arr = array(field(j, "map", path), mp);
  if (arr.size() != m.from.size()) throw SchemaError(mp, "expected one entry per 'from' label");
  for (std::size_t i = 0; i < arr.size(); ++i) {
    const auto v = uint_from_json(arr[i], at(mp, i));
    if (v >= m.to.size()) throw SchemaError(at(mp, i), "index outside 'to'");
    m.f.map.push_back(v);
  }
  return m;
}

// ---------------------------------------------------------------------------

json to_json(const ModuliTable& t) {
  auto column = [&](const std::vector<ExtendedDistance>& v) {
    json out = json::array();
    for (std::size_t i = 0; i < v.size(); ++i) {
      out.push_back(json::array({t.thresholds[i], real_to_json(v[i].as_double())}));
    }
    return out;
  };
  json out = {{"thresholds", t.thresholds},
              {"omega_tilde", column(t.omega_tilde)},
              {"rho_tilde", column(t.rho_tilde)},
              {"x_diameter", real_to_json(t.x_diameter.as_double())},
              {"conventions", {{"inf_of_empty", "inf"}, {"sup_of_empty", 0}}},
              {"domain_note", t.domain_note}};
  if (!t.omega.empty()) out["omega"] = column(t.omega);
  if (!t.rho.empty()) out["rho"] = column(t.rho);
  return out;
}

json to_json(const CoarseFlags& f) {
  return {{"coarse_at_truncation", f.coarse_at_truncation},
          {"expanding_at_truncation", f.expanding_at_truncation},
          {"caveat", f.caveat}};
}

json to_json(const ToleranceConfig& t) {
  return {{"zero_atol", t.zero_atol}, {"rank_rtol", t.rank_rtol}};
}

json to_json(const GapReport& r) {
  return {{"epsilon", r.epsilon},
          {"top_traceless_singular_value", r.top_traceless_singular_value},
          {"unital", r.unital},
          {"trace_preserving", r.trace_preserving}};
}

json to_json(const CheegerScan& s) {
  json out = {{"epsilon", s.epsilon},     {"bound", s.bound},
              {"tested", s.tested},       {"violations", s.violations},
              {"min_value", s.min_value}, {"min_margin", s.min_margin}};
  if (!s.worst_support.empty()) out["worst_support"] = subset_to_json(s.worst_support);
  return out;
}

json to_json(const ConnectivityReport& r) {
  return {{"connected", r.connected},
          {"commutant_trivial", r.commutant_trivial},
          {"criteria_agree", r.criteria_agree},
          {"power_dims", r.power_dims},
          {"m_star", r.m_star ? json(*r.m_star) : json(nullptr)},
          {"commutant_dim", r.commutant_dim},
          {"witness", r.witness ? to_json(*r.witness) : json(nullptr)},
          {"witness_residual", r.witness_residual}};
}

json to_json(const IsoperimetricReport& r) {
  return {{"delta", r.delta},
          {"epsilon", r.epsilon},
          {"eps_prime", r.eps_prime},
          {"gap_positive", r.gap_positive},
          {"trials", r.trials},
          {"violations", r.violations},
          {"min_ratio", real_to_json(r.min_ratio)},
          {"orthogonality_pairs", r.orthogonality_pairs},
          {"orthogonality_violations", r.orthogonality_violations},
          {"max_orthogonality_residual", r.max_orthogonality_residual},
          {"reflexivity", "unverified"}};
}

json to_json(const IteratedReport& r) {
  return {{"ranks", r.ranks},
          {"step_ok", r.step_ok},
          {"all_ok", r.all_ok},
          {"precondition_exhausted", r.precondition_exhausted}};
}

json to_json(const RankDiameterReport& r) {
  return {{"k0", to_json(r.k0)},           {"rank", r.rank},
          {"n_kraus", r.n_kraus},          {"dim_vk0", r.dim_vk0},
          {"rank_bound", r.rank_bound},    {"square_bound", r.square_bound},
          {"bound_ok", r.bound_ok()}};
}

json to_json(const DiameterBracket& b) {
  return {{"k0", to_json(b.k0)},
          {"sampled", to_json(b.sampled)},
          {"lower", to_json(b.lower)},
          {"upper", b.upper_known ? to_json(b.upper) : json(nullptr)},
          {"connected", b.connected},
          {"label", b.label}};
}

json to_json(const RegularGraph& g) {
  json edges = json::array();
  for (auto [u, v] : g.edges) edges.push_back(json::array({u, v}));
  return {{"n", g.n}, {"d", g.d}, {"edges", edges}, {"space", to_json(g.space)}};
}

json to_json(const ClassicalGap& g) {
  return {{"eigenvalues", g.eigenvalues},
          {"two_sided", g.two_sided},
          {"one_sided", g.one_sided}};
}

json to_json(const CoverReport& r) {
  json out = {{"valid", r.valid()},
              {"members_nonempty", r.members_nonempty},
              {"covering", r.covering},
              {"disjoint", r.disjoint},
              {"bounded", to_string(r.bounded)},
              {"max_diameter", to_json(r.max_diameter)}};
  if (r.empty_member) out["empty_member"] = member_ref(*r.empty_member);
  if (!r.uncovered.empty()) out["uncovered"] = subset_to_json(r.uncovered);
  if (r.uncovered_rank > 0) out["uncovered_rank"] = r.uncovered_rank;
  if (r.overlap) {
    out["overlap"] = json::array({member_ref(r.overlap->first), member_ref(r.overlap->second)});
  }
  if (r.unbounded_member) out["unbounded_member"] = member_ref(*r.unbounded_member);
  return out;
}

json to_json(const AsdimResult& r) {
  return {{"r", r.r},
          {"R_bound", r.R_bound},
          {"value", r.value},
          {"exact", r.exact},
          {"greedy_value", r.greedy_value ? json(*r.greedy_value) : json(nullptr)},
          {"exhaustive_value", r.exhaustive_value ? json(*r.exhaustive_value) : json(nullptr)},
          {"witness", to_json(r.witness)},
          {"note", "value at this r only; no asymptotic claim"}};
}

json to_json(const CountingCertificate& c) {
  json excluded = json::array();
  for (const auto& m : c.excluded) excluded.push_back(member_ref(m));
  return {{"n_colors", c.n_colors},
          {"m", c.m},
          {"delta", c.delta},
          {"epsilon", c.epsilon},
          {"eps_prime", c.eps_prime},
          {"ambient_rank", c.ambient_rank},
          {"r_used", c.r_used},
          {"per_color_rank_sums", c.per_color_rank_sums},
          {"per_color_nbhd_rank_sums", c.per_color_nbhd_rank_sums},
          {"per_color_sum_within_ambient", c.per_color_sum_within_ambient},
          {"per_color_growth", c.per_color_growth},
          {"excluded", excluded},
          {"cover", to_json(c.cover)},
          {"obstruction", c.obstruction},
          {"all_checks_passed", c.all_checks_passed},
          {"contradiction", c.contradiction},
          {"failure", c.failure.empty() ? json(nullptr) : json(c.failure)}};
}

}  // namespace qcoarse
