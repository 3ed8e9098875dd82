// fchoq: command-line front end.
//
//   fchoq groundstate|saddle|table|decay|extension-check|info
//         [--config PATH] [--out DIR] [--seed INT] [--threads INT] [--deterministic]
//
// Exit codes: 0 success, 1 configuration or input error, 2 non-convergence
// or partial failure.

#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <fchoq/fchoq.hpp>

namespace fs = std::filesystem;
using namespace fchoq;

namespace {

constexpr int kOk = 0;
constexpr int kConfigError = 1;
constexpr int kFailed = 2;

struct Options {
  std::string config;
  std::string out;
  std::optional<std::uint64_t> seed;
  int threads = 1;
  bool deterministic = false;
  std::string field;        // decay
  double r_min = 0.15, r_max = 0.35;
  double eps_rel = 1e-3;
};

RunConfig load(const Options& o) {
  RunConfig c = o.config.empty() ? parse_config(json::object()) : load_config(o.config);
  if (!o.out.empty()) c.out_dir = o.out;
  if (o.seed) c.seed = *o.seed;
  return c;
}

json metadata(const Options& o) {
  return {{"threads", o.threads},
          {"deterministic", o.deterministic},
          {"bitwise_reproducible", o.threads == 1}};
}

void print_summary(const char* what, const Solution& s) {
  std::printf("%s: %s after %d iterations, energy %.10g, residual %.3e, nodal domains %d, decay slope %.3f\n", what,
              s.status.c_str(), s.iterations, s.energy, s.residual, s.nodal_count, s.decay_slope);
}

int run_solve(const Options& o, bool saddle) {
  const RunConfig c = load(o);
  const CoxeterGroup G = config_group(c);
  if (saddle && G.trivial()) throw ConfigError("saddle: group is trivial, use groundstate");
  if (!saddle && !G.trivial()) throw ConfigError("groundstate: config names a nontrivial group, use saddle");
  const SolverConfig sc = solver_config(c, G);
  ChoquardFunctional F(c.params, c.grid);

  Field init;
  try {
    init = saddle ? init_saddle(F, G, sc.placement_scale(), sc.seed).u : init_groundstate(F);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }

  Solution sol;
  try {
    sol = solve(F, sc, init);
  } catch (const CollapseToZero& e) {
    std::fprintf(stderr, "%s\n", e.what());
    return kFailed;
  }

  const char* name = saddle ? "saddle" : "groundstate";
  const fs::path out(c.out_dir);
  if (c.wants("bin"))
    write_field(out / name, sol.u, c.params, std::string(name) + " group=" + (G.name().empty() ? "custom" : G.name()));
  if (c.wants("json")) {
    json rep = to_json(sol);
    rep["group"] = G.name();
    rep["group_order"] = G.order();
    rep["config"] = to_json(c);
    rep["metadata"] = metadata(o);
    write_json(out / (std::string(name) + "_report.json"), rep);
  }
  print_summary(name, sol);
  return sol.converged ? kOk : kFailed;
}

int run_table(const Options& o) {
  const RunConfig c = load(o);
  if (c.group_list.empty()) throw ConfigError("table: group.list must name at least one group");
  std::vector<SolverConfig> cfgs;
  for (const auto& name : c.group_list) cfgs.push_back(solver_config(c, resolve_group(name)));
  const EnergyTable t = energy_table(cfgs);

  const fs::path out(c.out_dir);
  fs::create_directories(out);
  if (c.wants("csv")) {
    std::ofstream os(out / "energy_table.csv");
    write_csv(os, t);
  }
  if (c.wants("json")) {
    json rep = to_json(t);
    rep["config"] = to_json(c);
    rep["metadata"] = metadata(o);
    write_json(out / "energy_table.json", rep);
  }
  write_csv(std::cout, t);
  bool all = true;
  for (const auto& r : t.rows) {
    if (!r.verified) std::fprintf(stderr, "row %s unverified: %s\n", r.group.c_str(), r.status.c_str());
    all = all && r.verified;
  }
  return all ? kOk : kFailed;
}

int run_decay(const Options& o) {
  if (o.field.empty()) throw ConfigError("decay: --field PATH is required");
  if (!(0.0 < o.r_min && o.r_min < o.r_max && o.r_max <= 0.45))
    throw ConfigError("decay: need 0 < --rmin < --rmax <= 0.45");
  StoredField sf;
  try {
    sf = read_field(o.field);
  } catch (const std::exception& e) {
    throw ConfigError(e.what());
  }
  json rep;
  rep["field"] = o.field;
  rep["description"] = sf.description;
  rep["nodal"] = to_json(nodal_domains(sf.field, o.eps_rel));
  bool ok = true;
  try {
    rep["decay_slope"] = decay_exponent(sf.field, o.r_min, o.r_max);
  } catch (const std::invalid_argument& e) {
    // too few shells in the window on a coarse grid: report, exit 2
    rep["decay_slope"] = nullptr;
    rep["decay_error"] = e.what();
    ok = false;
  }
  rep["window"] = {o.r_min, o.r_max};
  rep["target_slope"] = -(sf.params.N + 2.0 * sf.params.s);
  if (admissible(sf.params) && sf.params.N == sf.field.grid.dims) {
    ChoquardFunctional F(sf.params, sf.field.grid);
    rep["energy"] = F.energy(sf.field).total;
    rep["nehari_energy"] = F.nehari_energy(sf.field);
  }
  rep["metadata"] = metadata(o);
  const fs::path out(o.out.empty() ? fs::path(o.field).parent_path() : fs::path(o.out));
  write_json(out / "decay_report.json", rep);
  std::cout << rep.dump(2) << '\n';
  return ok ? kOk : kFailed;
}

int run_extension(const Options& o) {
  const RunConfig c = load(o);
  Field u = Field::sample(c.grid, [&](const std::vector<double>& x) {
    double r2 = 0.0;
    for (double a : x) r2 += a * a;
    const double w = c.grid.L / 8.0;
    return std::exp(-r2 / (w * w)) * (1.0 + 0.5 * std::cos(2.0 * std::numbers::pi * x[0] / c.grid.L * 2.0));
  });
  if (!o.field.empty()) {
    try {
      u = read_field(o.field).field;
    } catch (const std::exception& e) {
      throw ConfigError(e.what());
    }
  }
  const YGrid yg = default_ygrid(u.grid, c.extension_J);
  std::vector<ExtensionRow> rows;
  bool ok = true;
  for (double s : c.extension_s) {
    const IdentityCheck r = energy_identity_check(u, s, yg);
    rows.push_back({s, c.extension_J, r.lhs, r.rhs, r.ratio});
    ok = ok && std::abs(r.ratio - 1.0) <= c.extension_tol;
  }
  const fs::path out(c.out_dir);
  fs::create_directories(out);
  if (c.wants("csv")) {
    std::ofstream os(out / "extension_check.csv");
    write_csv(os, rows);
  }
  if (c.wants("json")) {
    json rep;
    rep["rows"] = json::array();
    for (const auto& r : rows) rep["rows"].push_back({{"s", r.s}, {"J", r.J}, {"lhs", r.lhs}, {"rhs", r.rhs}, {"ratio", r.ratio}});
    rep["within_tolerance"] = ok;
    rep["config"] = to_json(c);
    rep["metadata"] = metadata(o);
    write_json(out / "extension_check.json", rep);
  }
  write_csv(std::cout, rows);
  return ok ? kOk : kFailed;
}

int run_info(const Options& o) {
  const RunConfig c = load(o);
  const Constants k = constants(c.params);
  json rep = {{"N", c.params.N},
              {"s", c.params.s},
              {"alpha", c.params.alpha},
              {"p", c.params.p},
              {"A_alpha", k.A_alpha},
              {"k_s", k.k_s},
              {"C_Ns", k.C_Ns},
              {"critical_exponent", critical_exponent(c.params)},
              {"admissible", admissible(c.params)}};
  std::cout << rep.dump(2) << '\n';
  return kOk;
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"Groundstates and Coxeter-symmetric saddles of the fractional Choquard equation"};
  app.require_subcommand(1);
  app.fallthrough();
  Options o;
  std::uint64_t seed = 0;
  auto* seed_opt = app.add_option("--seed", seed, "Override solver.seed");
  app.add_option("--config", o.config, "JSON run configuration");
  app.add_option("--out", o.out, "Output directory (overrides output.dir)");
  app.add_option("--threads", o.threads, "FFT threads")->check(CLI::PositiveNumber);
  app.add_flag("--deterministic", o.deterministic, "Single-threaded, bit-reproducible run");

  auto* gs = app.add_subcommand("groundstate", "Minimise over the Nehari set (trivial group)");
  auto* sd = app.add_subcommand("saddle", "Minimise over the G-symmetric Nehari set");
  auto* tb = app.add_subcommand("table", "Energy comparison table for group.list");
  auto* dc = app.add_subcommand("decay", "Re-analyse a saved field");
  dc->add_option("--field", o.field, "Field path (.bin or .json)")->required();
  dc->add_option("--rmin", o.r_min, "Inner shell radius as a fraction of L");
  dc->add_option("--rmax", o.r_max, "Outer shell radius as a fraction of L");
  dc->add_option("--eps", o.eps_rel, "Relative nodal threshold");
  auto* ex = app.add_subcommand("extension-check", "Extension energy identity for extension.s");
  ex->add_option("--field", o.field, "Use a saved field instead of the built-in test field");
  auto* in = app.add_subcommand("info", "Print A_alpha, k_s and the critical exponent");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfigError;
  }
  if (*seed_opt) o.seed = seed;
  if (o.deterministic) o.threads = 1;

  try {
    if (o.threads > 1) set_fft_threads(o.threads);
    if (*gs) return run_solve(o, false);
    if (*sd) return run_solve(o, true);
    if (*tb) return run_table(o);
    if (*dc) return run_decay(o);
    if (*ex) return run_extension(o);
    if (*in) return run_info(o);
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kConfigError;
  } catch (const std::invalid_argument& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kConfigError;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kFailed;
  }
  return kConfigError;
}
