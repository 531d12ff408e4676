#include "qcoarse/cli.hpp"

#include "qcoarse/asdim.hpp"
#include "qcoarse/expander.hpp"
#include "qcoarse/io.hpp"
#include "qcoarse/moduli.hpp"
#include "qcoarse/qmetric.hpp"
#include "qcoarse/random.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <fstream>
#include <functional>
#include <optional>
#include <sstream>

namespace qcoarse {

namespace {

struct Outcome {
  json results;
  int code = kExitOk;
};

struct Context {
  ToleranceConfig tol;
  json parameters = json::object();
  std::optional<std::uint64_t> seed;
};

/// Either backend, loaded from a metric file.
struct AnyMetric {
  std::optional<GraphQuantumMetric> graph;
  std::optional<ClassicalQuantumMetric> classical;
};

KrausSet load_kraus(const std::string& file, const ToleranceConfig& tol) {
  const json doc = load_json_file(file);
  const json& j = unwrap_report(doc);
  if (j.is_object() && j.contains("unitaries")) return expander_from_json(j, "$", tol).kraus(tol);
  return kraus_from_json(j, "$", tol);
}

ExpanderSpec load_spec(const std::string& file, const ToleranceConfig& tol) {
  const json doc = load_json_file(file);
  return expander_from_json(unwrap_report(doc), "$", tol);
}

FiniteMetricSpace load_space(const std::string& file) {
  const json doc = load_json_file(file);
  const json& j = unwrap_report(doc);
  if (j.is_object() && j.contains("space")) return space_from_json(j["space"], "$.space");
  return space_from_json(j, "$");
}

AnyMetric load_metric(const std::string& file, const ToleranceConfig& tol) {
  const json doc = load_json_file(file);
  const json& j = unwrap_report(doc);
  AnyMetric m;
  if (j.is_object() && j.contains("unitaries")) {
    m.graph.emplace(expander_from_json(j, "$", tol).kraus(tol), tol);
  } else if (j.is_object() && j.contains("ops")) {
    m.graph.emplace(kraus_from_json(j, "$", tol), tol);
  } else if (j.is_object() && j.contains("space")) {
    m.classical = ClassicalQuantumMetric{space_from_json(j["space"], "$.space")};
  } else if (j.is_object() && j.contains("labels")) {
    m.classical = ClassicalQuantumMetric{space_from_json(j, "$")};
  } else {
    throw SchemaError("$", "expected a Kraus set, expander spec or metric space");
  }
  return m;
}

CoverFamily load_cover(const std::string& file, const ToleranceConfig& tol) {
  const json doc = load_json_file(file);
  const json& j = unwrap_report(doc);
  if (j.is_object() && j.contains("cover")) return cover_from_json(j["cover"], "$.cover", tol);
  return cover_from_json(j, "$", tol);
}

Projection load_projection(const std::string& file, const ToleranceConfig& tol) {
  const json doc = load_json_file(file);
  const json& j = unwrap_report(doc);
  if (j.is_object() && j.contains("projection")) {
    return projection_from_json(j["projection"], "$.projection", tol);
  }
  return projection_from_json(j, "$", tol);
}

/// Classical arguments may be subset arrays or diagonal projections.
Subset load_subset(const std::string& file, const ClassicalQuantumMetric& m,
                   const ToleranceConfig& tol) {
  const json doc = load_json_file(file);
  const json& j = unwrap_report(doc);
  if (j.is_array()) return subset_from_json(j, "$");
  if (j.is_object() && j.contains("subset")) return subset_from_json(j["subset"], "$.subset");
  const Projection p = projection_from_json(j, "$", tol);
  require_same_ambient(p.ambient_dim(), static_cast<Eigen::Index>(m.size()), "projection");
  Subset s;
  if (!p.is_diagonal(tol, &s)) {
    throw SchemaError("$", "classical metrics need a diagonal projection");
  }
  return s;
}

std::uint64_t require_seed(const Context& ctx) {
  if (!ctx.seed) throw CLI::RequiredError("--seed");
  return *ctx.seed;
}

Outcome cmd_gap(const Context& ctx, const std::string& file) {
  const KrausSet k = load_kraus(file, ctx.tol);
  return {to_json(spectral_gap(k, ctx.tol)), kExitOk};
}

Outcome cmd_cheeger(const Context& ctx, const std::string& file, std::size_t trials,
                    bool diagonal) {
  const KrausSet k = load_kraus(file, ctx.tol);
  const GapReport gap = spectral_gap(k, ctx.tol);
  const CheegerScan scan = diagonal ? cheeger_scan_diagonal(k, gap.epsilon)
                                    : cheeger_scan_random(k, gap.epsilon, trials, require_seed(ctx));
  const bool applies = gap.epsilon > ctx.tol.zero_atol && gap.unital;
  json res = {{"gap", to_json(gap)},
              {"mode", diagonal ? "exhaustive_diagonal" : "random"},
              {"scan", to_json(scan)},
              {"bound_applies", applies}};
  return {res, applies && scan.violations > 0 ? kExitFailed : kExitOk};
}

Outcome cmd_connected(const Context& ctx, const std::string& file) {
  const KrausSet k = load_kraus(file, ctx.tol);
  const GraphQuantumMetric metric(k, ctx.tol);
  const ConnectivityReport rep = is_connected(metric.v1(), ctx.tol);
  json res = to_json(rep);
  if (rep.witness) {
    const Matrix p = rep.witness->matrix();
    const Matrix q = Matrix::Identity(k.n(), k.n()) - p;
    res["witness_phi_inner"] = std::abs(hs_inner(k.apply(p), k.apply(q)));
  }
  return {res, rep.criteria_agree ? kExitOk : kExitFailed};
}

Outcome cmd_dist(const Context& ctx, const std::string& mfile, const std::string& pfile,
                 const std::string& qfile) {
  const AnyMetric m = load_metric(mfile, ctx.tol);
  ExtendedDistance d;
  if (m.graph) {
    d = dist(*m.graph, load_projection(pfile, ctx.tol), load_projection(qfile, ctx.tol));
  } else {
    d = dist(*m.classical, load_subset(pfile, *m.classical, ctx.tol),
             load_subset(qfile, *m.classical, ctx.tol));
  }
  return {{{"distance", to_json(d)}}, kExitOk};
}

Outcome cmd_diam(const Context& ctx, const std::string& mfile, const std::string& pfile,
                 int trials) {
  const AnyMetric m = load_metric(mfile, ctx.tol);
  if (m.graph) {
    const DiameterBracket b =
        diam_bracket(*m.graph, load_projection(pfile, ctx.tol), trials, require_seed(ctx));
    return {{{"backend", "quantum"}, {"bracket", to_json(b)}}, kExitOk};
  }
  const Subset s = load_subset(pfile, *m.classical, ctx.tol);
  return {{{"backend", "classical"},
           {"diameter", to_json(ExtendedDistance::from_double(diam_classical(*m.classical, s)))},
           {"exact", true}},
          kExitOk};
}

Outcome cmd_nbhd(const Context& ctx, const std::string& mfile, const std::string& pfile,
                 double eps) {
  const AnyMetric m = load_metric(mfile, ctx.tol);
  if (m.graph) {
    const Projection nb = neighborhood(*m.graph, load_projection(pfile, ctx.tol), eps);
    return {{{"backend", "quantum"}, {"rank", nb.rank()}, {"projection", to_json(nb)}}, kExitOk};
  }
  const Subset s = neighborhood(*m.classical, load_subset(pfile, *m.classical, ctx.tol), eps);
  return {{{"backend", "classical"}, {"subset", s}}, kExitOk};
}

Outcome cmd_isoperimetric(const Context& ctx, const std::string& file, double delta,
                          std::size_t trials) {
  const ExpanderSpec spec = load_spec(file, ctx.tol);
  const IsoperimetricReport rep = verify_isoperimetric(spec, delta, trials, require_seed(ctx), ctx.tol);
  const bool failed =
      rep.gap_positive && (rep.violations > 0 || rep.orthogonality_violations > 0);
  json res = to_json(rep);
  if (!rep.gap_positive) res["note"] = "measured gap is not positive; spec is not an expander";
  return {res, failed ? kExitFailed : kExitOk};
}

Outcome cmd_rank_diam(const Context& ctx, const std::string& file, std::size_t trials) {
  const ExpanderSpec spec = load_spec(file, ctx.tol);
  const GraphQuantumMetric metric(spec.kraus(ctx.tol), ctx.tol);
  const std::uint64_t seed = require_seed(ctx);
  if (!metric.powers_fill_matrix_algebra()) {
    return {{{"connected", false}, {"error", "quantum graph is disconnected; k0 is infinite"}},
            kExitFailed};
  }
  std::size_t failures = 0;
  double max_k0 = 0.0;
  json first_failure = nullptr;
  for (std::size_t t = 0; t < trials; ++t) {
    Rng rng(seed, t);
    const auto k = static_cast<Eigen::Index>(rng.index(1, static_cast<std::size_t>(spec.n)));
    const RankDiameterReport rep = verify_rank_diameter(metric, random_projection(spec.n, k, rng));
    max_k0 = std::max(max_k0, rep.k0.value());
    if (!rep.bound_ok()) {
      ++failures;
      if (first_failure.is_null()) first_failure = to_json(rep);
    }
  }
  json res = {{"connected", true},
              {"trials", trials},
              {"failures", failures},
              {"max_k0", max_k0},
              {"power_dims", metric.power_dims()},
              {"n_kraus", spec.d},
              {"first_failure", first_failure}};
  return {res, failures > 0 ? kExitFailed : kExitOk};
}

Outcome cmd_cover(const Context& ctx, const std::string& file, double r, std::size_t max_colors,
                  bool exhaustive) {
  (void)ctx;
  const FiniteMetricSpace space = load_space(file);
  const GreedyResult g = greedy_cover(space, r, max_colors);
  json res = {{"ok", g.ok}, {"colors", g.cover.n_colors()}, {"cover", to_json(g.cover)}};
  if (!g.ok) res["failure"] = g.failure;
  if (exhaustive) res["asdim"] = to_json(asdim_at_scale(space, r));
  return {res, g.ok ? kExitOk : kExitFailed};
}

Outcome cmd_validate_cover(const Context& ctx, const std::string& mfile,
                           const std::string& cfile, int trials) {
  const AnyMetric m = load_metric(mfile, ctx.tol);
  const CoverFamily c = load_cover(cfile, ctx.tol);
  CoverReport rep;
  if (m.graph) {
    rep = validate_cover(*m.graph, c, trials, ctx.seed.value_or(0));
  } else {
    rep = validate_cover(*m.classical, c);
  }
  json res = to_json(rep);
  res["r"] = c.r;
  res["R"] = real_to_json(c.R);
  return {res, rep.valid() ? kExitOk : kExitFailed};
}

Outcome cmd_saturate(const Context& ctx, const std::string& sfile, const std::string& pfile,
                     const std::string& qfile, double r, std::optional<double> R_opt,
                     std::optional<double> D_opt) {
  const ClassicalQuantumMetric metric{load_space(sfile)};
  const CoverFamily p = load_cover(pfile, ctx.tol);
  const CoverFamily q = load_cover(qfile, ctx.tol);
  const double R = R_opt.value_or(p.R);
  const double D = D_opt.value_or(q.R);
  CoverFamily out;
  out.backend = Backend::Classical;
  out.r = r;
  out.R = D + 2.0 * (R + D + 4.0 * r);
  out.source = "saturated_union";
  bool valid = true;
  static const std::vector<Subset> empty;
  const std::size_t colors = std::max(p.n_colors(), q.n_colors());
  try {
    for (std::size_t c = 0; c < colors; ++c) {
      const auto& pc = c < p.classical.size() ? p.classical[c] : empty;
      const auto& qc = c < q.classical.size() ? q.classical[c] : empty;
      const SaturatedResult s = saturated_union(metric, pc, qc, r, R, D);
      valid = valid && s.valid();
      out.classical.push_back(s.color);
    }
  } catch (const HypothesisError& e) {
    return {{{"ok", false}, {"hypothesis", e.clause()}, {"error", e.what()}}, kExitFailed};
  }
  return {{{"ok", valid}, {"bound", out.R}, {"cover", to_json(out)}},
          valid ? kExitOk : kExitFailed};
}

Outcome cmd_certify(const Context& ctx, const std::string& sfile, const std::string& cfile,
                    double delta, std::size_t m) {
  const ExpanderSpec spec = load_spec(sfile, ctx.tol);
  const CoverFamily c = load_cover(cfile, ctx.tol);
  const CountingCertificate cert =
      certify_counting(spec, c, delta, m, ctx.tol, ctx.seed.value_or(0));
  return {to_json(cert), cert.all_checks_passed ? kExitOk : kExitFailed};
}

Outcome cmd_moduli(const Context& ctx, const std::string& mapfile, const std::string& xfile,
                   const std::string& yfile, bool brute) {
  (void)ctx;
  const json doc = load_json_file(mapfile);
  const MapFile mf = map_from_json(unwrap_report(doc), "$");
  const FiniteMetricSpace x = load_space(xfile);
  const FiniteMetricSpace y = load_space(yfile);
  if (mf.from.size() != x.size()) throw SchemaError("$.from", "size differs from the source space");
  if (mf.to.size() != y.size()) throw SchemaError("$.to", "size differs from the target space");
  const ModuliTable t = classical_moduli(mf.f, x, y);
  json res = {{"table", to_json(t)}, {"flags", to_json(coarse_flags(t))}};
  int code = kExitOk;
  if (brute) {
    const ModuliTable q = quantum_moduli_bruteforce(mf.f, x, y);
    const bool equal = q.omega_tilde == t.omega_tilde && q.rho_tilde == t.rho_tilde;
    res["quantum"] = to_json(q);
    res["quantum_equals_classical"] = equal;
    if (!equal) code = kExitFailed;
  }
  return {res, code};
}

Outcome cmd_gen_expander(const Context& ctx, Eigen::Index n, std::size_t d) {
  const ExpanderSpec spec = random_expander(n, d, require_seed(ctx), ctx.tol);
  return {to_json(spec), kExitOk};
}

Outcome cmd_gen_graph(const Context& ctx, std::size_t n, std::size_t d, bool cycle,
                      bool complete) {
  RegularGraph g;
  if (cycle && complete) throw CLI::ValidationError("--cycle and --complete are exclusive");
  if (cycle) {
    g = cycle_graph(n);
  } else if (complete) {
    g = complete_graph(n);
  } else {
    g = random_regular_graph(n, d, require_seed(ctx));
  }
  json res = to_json(g);
  res["gap"] = to_json(classical_gap(g));
  return {res, kExitOk};
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Quantum metrics, expanders and asymptotic-dimension covers", "qcoarse"};
  app.require_subcommand(1);
  app.fallthrough();
  app.set_help_all_flag("--help-all", "Show help for all subcommands");

  Context ctx;
  bool no_timings = false;
  std::string out_file;
  app.add_option("--zero-atol", ctx.tol.zero_atol, "Absolute zero threshold")->capture_default_str();
  app.add_option("--rank-rtol", ctx.tol.rank_rtol, "Relative rank cutoff factor")->capture_default_str();
  app.add_flag("--no-timings", no_timings, "Omit timings from the report");

  std::function<Outcome()> handler;
  std::string f1, f2, f3;
  std::size_t trials = 100, max_colors = 16, m = 1, n = 0, d = 0;
  int diam_trials = 32;
  double eps = 0.0, delta = 0.0, r = 0.0, R = 0.0, D = 0.0;
  bool flag_a = false, flag_b = false;

  auto with_seed = [&](CLI::App* sub) {
    sub->add_option("--seed", ctx.seed, "Random seed");
  };
  auto positional = [&](CLI::App* sub, const char* name, std::string& dst, const char* help) {
    sub->add_option(name, dst, help)->required();
  };

  auto* gap = app.add_subcommand("gap", "Spectral gap of a channel");
  positional(gap, "kraus", f1, "Kraus set or expander spec JSON");
  gap->callback([&] {
    ctx.parameters = {{"kraus", f1}};
    handler = [&] { return cmd_gap(ctx, f1); };
  });

  auto* cheeger = app.add_subcommand("cheeger", "Cheeger quantity against (1-eps)/2");
  positional(cheeger, "kraus", f1, "Kraus set or expander spec JSON");
  cheeger->add_option("--trials", trials, "Random projections")->capture_default_str();
  cheeger->add_flag("--exhaustive-diagonal", flag_a, "All diagonal projections instead");
  with_seed(cheeger);
  cheeger->callback([&] {
    ctx.parameters = {{"kraus", f1}, {"trials", trials}, {"exhaustive_diagonal", flag_a}};
    handler = [&] { return cmd_cheeger(ctx, f1, trials, flag_a); };
  });

  auto* conn = app.add_subcommand("connected", "Connectivity of the quantum graph");
  positional(conn, "kraus", f1, "Kraus set or expander spec JSON");
  conn->callback([&] {
    ctx.parameters = {{"kraus", f1}};
    handler = [&] { return cmd_connected(ctx, f1); };
  });

  auto* dist_cmd = app.add_subcommand("dist", "Distance between two projections");
  positional(dist_cmd, "metric", f1, "Metric JSON");
  positional(dist_cmd, "p", f2, "Projection or subset JSON");
  positional(dist_cmd, "q", f3, "Projection or subset JSON");
  dist_cmd->callback([&] {
    ctx.parameters = {{"metric", f1}, {"p", f2}, {"q", f3}};
    handler = [&] { return cmd_dist(ctx, f1, f2, f3); };
  });

  auto* diam_cmd = app.add_subcommand("diam", "Diameter (exact classically, bracketed otherwise)");
  positional(diam_cmd, "metric", f1, "Metric JSON");
  positional(diam_cmd, "p", f2, "Projection or subset JSON");
  diam_cmd->add_option("--trials", diam_trials, "Sampled pairs")->capture_default_str();
  with_seed(diam_cmd);
  diam_cmd->callback([&] {
    ctx.parameters = {{"metric", f1}, {"p", f2}, {"trials", diam_trials}};
    handler = [&] { return cmd_diam(ctx, f1, f2, diam_trials); };
  });

  auto* nbhd = app.add_subcommand("nbhd", "Open eps-neighborhood");
  positional(nbhd, "metric", f1, "Metric JSON");
  positional(nbhd, "p", f2, "Projection or subset JSON");
  nbhd->add_option("--eps", eps, "Radius")->required();
  nbhd->callback([&] {
    ctx.parameters = {{"metric", f1}, {"p", f2}, {"eps", eps}};
    handler = [&] { return cmd_nbhd(ctx, f1, f2, eps); };
  });

  auto* iso = app.add_subcommand("isoperimetric", "Rank growth of neighborhoods on an expander");
  positional(iso, "spec", f1, "Expander spec JSON");
  iso->add_option("--delta", delta, "Radius delta > 1")->required();
  iso->add_option("--trials", trials, "Random projections")->capture_default_str();
  with_seed(iso);
  iso->callback([&] {
    ctx.parameters = {{"spec", f1}, {"delta", delta}, {"trials", trials}};
    handler = [&] { return cmd_isoperimetric(ctx, f1, delta, trials); };
  });

  auto* rd = app.add_subcommand("rank-diam", "rank(P) <= N^k0(P) on random projections");
  positional(rd, "spec", f1, "Expander spec JSON");
  rd->add_option("--trials", trials, "Random projections")->capture_default_str();
  with_seed(rd);
  rd->callback([&] {
    ctx.parameters = {{"spec", f1}, {"trials", trials}};
    handler = [&] { return cmd_rank_diam(ctx, f1, trials); };
  });

  auto* cover = app.add_subcommand("cover", "Greedy r-disjoint cover of a metric space");
  positional(cover, "space", f1, "Metric space JSON");
  cover->add_option("--r", r, "Scale r > 0")->required();
  cover->add_option("--max-colors", max_colors, "Color budget")->capture_default_str();
  cover->add_flag("--exhaustive", flag_a, "Also report the exact value for small spaces");
  cover->callback([&] {
    ctx.parameters = {{"space", f1}, {"r", r}, {"max_colors", max_colors}, {"exhaustive", flag_a}};
    handler = [&] { return cmd_cover(ctx, f1, r, max_colors, flag_a); };
  });

  auto* vc = app.add_subcommand("validate-cover", "Check covering, r-disjointness, boundedness");
  positional(vc, "metric", f1, "Metric JSON");
  positional(vc, "cover", f2, "Cover JSON");
  vc->add_option("--trials", diam_trials, "Sampled pairs per quantum member")->capture_default_str();
  with_seed(vc);
  vc->callback([&] {
    ctx.parameters = {{"metric", f1}, {"cover", f2}};
    handler = [&] { return cmd_validate_cover(ctx, f1, f2, diam_trials); };
  });

  std::optional<double> R_opt, D_opt;
  auto* sat = app.add_subcommand("saturate", "Color-wise saturated union of two covers");
  positional(sat, "space", f1, "Metric space JSON");
  positional(sat, "covP", f2, "r-disjoint R-bounded cover");
  positional(sat, "covQ", f3, "7R-disjoint D-bounded cover");
  sat->add_option("--r", r, "Scale r")->required();
  sat->add_option("--R", R, "Bound of covP (default: its R)");
  sat->add_option("--D", D, "Bound of covQ (default: its R)");
  sat->callback([&] {
    if (sat->count("--R")) R_opt = R;
    if (sat->count("--D")) D_opt = D;
    ctx.parameters = {{"space", f1}, {"covP", f2}, {"covQ", f3}, {"r", r}};
    if (R_opt) ctx.parameters["R"] = *R_opt;
    if (D_opt) ctx.parameters["D"] = *D_opt;
    handler = [&] { return cmd_saturate(ctx, f1, f2, f3, r, R_opt, D_opt); };
  });

  auto* cert = app.add_subcommand("certify", "Counting certificate for a cover of an expander");
  positional(cert, "spec", f1, "Expander spec JSON");
  positional(cert, "cover", f2, "Quantum cover JSON");
  cert->add_option("--delta", delta, "Radius delta > 1")->required();
  cert->add_option("--m", m, "Iterations")->required();
  with_seed(cert);
  cert->callback([&] {
    ctx.parameters = {{"spec", f1}, {"cover", f2}, {"delta", delta}, {"m", m}};
    handler = [&] { return cmd_certify(ctx, f1, f2, delta, m); };
  });

  auto* mod = app.add_subcommand("moduli", "Moduli of expansion and compression of a map");
  positional(mod, "map", f1, "Map JSON");
  positional(mod, "from", f2, "Source metric space JSON");
  positional(mod, "to", f3, "Target metric space JSON");
  mod->add_flag("--bruteforce", flag_a, "Also enumerate subset projections");
  mod->callback([&] {
    ctx.parameters = {{"map", f1}, {"from", f2}, {"to", f3}, {"bruteforce", flag_a}};
    handler = [&] { return cmd_moduli(ctx, f1, f2, f3, flag_a); };
  });

  auto* ge = app.add_subcommand("gen-expander", "d Haar-random unitaries");
  ge->add_option("--n", n, "Dimension")->required();
  ge->add_option("--d", d, "Number of unitaries")->required();
  ge->add_option("--out", out_file, "Also write the report here");
  with_seed(ge);
  ge->callback([&] {
    ctx.parameters = {{"n", n}, {"d", d}};
    handler = [&] { return cmd_gen_expander(ctx, static_cast<Eigen::Index>(n), d); };
  });

  auto* gg = app.add_subcommand("gen-graph", "Random regular graph, cycle or complete graph");
  gg->add_option("--n", n, "Vertices")->required();
  gg->add_option("--d", d, "Degree (random graphs)");
  gg->add_flag("--cycle", flag_a, "Cycle C_n");
  gg->add_flag("--complete", flag_b, "Complete graph K_n");
  gg->add_option("--out", out_file, "Also write the report here");
  with_seed(gg);
  gg->callback([&] {
    ctx.parameters = {{"n", n}, {"d", d}, {"cycle", flag_a}, {"complete", flag_b}};
    handler = [&] { return cmd_gen_graph(ctx, n, d, flag_a, flag_b); };
  });

  const auto started = std::chrono::steady_clock::now();
  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
    const Outcome o = handler();
    json report = {{"command", app.get_subcommands().front()->get_name()},
                   {"parameters", ctx.parameters},
                   {"seed", ctx.seed ? json(*ctx.seed) : json(nullptr)},
                   {"tolerance", to_json(ctx.tol)},
                   {"results", o.results}};
    if (!no_timings) {
      const auto ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() -
                                                                started)
                          .count();
      report["timings"] = {{"wall_ms", ms}};
    }
    const std::string text = report.dump(2);
    out << text << "\n";
    if (!out_file.empty()) {
      std::ofstream f(out_file);
      if (!f) {
        err << "error: cannot write '" << out_file << "'\n";
        return kExitUsage;
      }
      f << text << "\n";
    }
    return o.code;
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "usage error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const SchemaError& e) {
    err << "input error at " << e.what() << "\n";
    return kExitUsage;
  } catch (const HypothesisError& e) {
    err << "hypothesis failed (" << e.clause() << "): " << e.what() << "\n";
    return kExitFailed;
  } catch (const std::invalid_argument& e) {
    err << "invalid input: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::out_of_range& e) {
    err << "invalid input: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitFailed;
  }
}

}  // namespace qcoarse
