#pragma once
// Persistence: raw little-endian float64 fields with a JSON sidecar, JSON
// run configurations and reports, CSV tables.

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "coxeter.hpp"
#include "energy_table.hpp"
#include "extension.hpp"
#include "grid.hpp"
#include "model_params.hpp"
#include "solver.hpp"

namespace fchoq {

using json = nlohmann::json;

/// Invalid or inconsistent configuration (CLI exit code 1).
struct ConfigError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// ---- fields ----------------------------------------------------------------

struct StoredField {
  Field field;
  ModelParams params;
  std::string description;
};

namespace detail {

inline std::filesystem::path with_ext(std::filesystem::path p, const char* ext) {
  p.replace_extension(ext);
  return p;
}

inline std::uint64_t to_le(std::uint64_t v) {
  if constexpr (std::endian::native == std::endian::big) return __builtin_bswap64(v);
  return v;
}

} // namespace detail

/// Writes base.bin and base.json.
inline void write_field(const std::filesystem::path& base, const Field& u, const ModelParams& params,
                        const std::string& description = {}) {
  if (base.has_parent_path()) std::filesystem::create_directories(base.parent_path());
  {
    std::ofstream os(detail::with_ext(base, ".bin"), std::ios::binary);
    if (!os) throw std::runtime_error("write_field: cannot open " + detail::with_ext(base, ".bin").string());
    for (double v : u.values) {
      std::uint64_t bits = detail::to_le(std::bit_cast<std::uint64_t>(v));
      os.write(reinterpret_cast<const char*>(&bits), sizeof bits);
    }
    if (!os) throw std::runtime_error("write_field: write failed");
  }
  json side = {{"dims", u.grid.dims}, {"M", u.grid.M},      {"L", u.grid.L},     {"N", params.N},
               {"s", params.s},       {"alpha", params.alpha}, {"p", params.p}, {"description", description}};
  std::ofstream js(detail::with_ext(base, ".json"));
  js << side.dump(2) << '\n';
  if (!js) throw std::runtime_error("write_field: sidecar write failed");
}

/// Reads a field from base.bin / base.json (either path may be given).
inline StoredField read_field(const std::filesystem::path& path) {
  const auto side_path = detail::with_ext(path, ".json");
  std::ifstream js(side_path);
  if (!js) throw std::runtime_error("read_field: cannot open " + side_path.string());
  json side;
  try {
    js >> side;
  } catch (const json::exception& e) {
    throw std::runtime_error("read_field: bad sidecar: " + std::string(e.what()));
  }
  StoredField out;
  Grid g{side.at("dims").get<int>(), side.at("M").get<int>(), side.at("L").get<double>()};
  g.validate();
  out.params.N = side.at("N").get<int>();
  out.params.s = side.at("s").get<double>();
  out.params.alpha = side.at("alpha").get<double>();
  out.params.p = side.at("p").get<double>();
  out.description = side.value("description", std::string{});
  out.field = Field(g);

  std::ifstream is(detail::with_ext(path, ".bin"), std::ios::binary);
  if (!is) throw std::runtime_error("read_field: cannot open " + detail::with_ext(path, ".bin").string());
  for (double& v : out.field.values) {
    std::uint64_t bits = 0;
    is.read(reinterpret_cast<char*>(&bits), sizeof bits);
    v = std::bit_cast<double>(detail::to_le(bits));
  }
  if (!is) throw std::runtime_error("read_field: file shorter than M^dims values");
  if (is.peek() != std::char_traits<char>::eof()) throw std::runtime_error("read_field: trailing data");
  return out;
}

// ---- run configuration -----------------------------------------------------

struct RunConfig {
  ModelParams params{3, 0.5, 2.0, 2.0};
  Grid grid{3, 48, 24.0};

  // group: a name, explicit generator matrices, or a list of names (table)
  std::string group_name = "trivial";
  std::vector<std::vector<std::vector<int>>> generators;
  std::vector<std::string> group_list;

  double tol = 1e-6;
  int max_iters = 2000;
  double step = 1.0;
  std::uint64_t seed = 1;
  double R = 0.0;

  std::string out_dir = "out";
  std::vector<std::string> formats{"json", "bin", "csv"};

  std::vector<double> extension_s{0.25, 0.5, 0.75};
  int extension_J = 256;
  double extension_tol = 0.02;

  bool wants(const std::string& fmt) const {
    return std::find(formats.begin(), formats.end(), fmt) != formats.end();
  }
};

namespace detail {

inline void reject_unknown(const json& obj, const std::string& where, std::initializer_list<const char*> allowed) {
  if (!obj.is_object()) throw ConfigError("config: '" + where + "' must be an object");
  const std::set<std::string> ok(allowed.begin(), allowed.end());
  for (auto it = obj.begin(); it != obj.end(); ++it)
    if (!ok.count(it.key())) throw ConfigError("config: unknown key '" + (where.empty() ? "" : where + ".") + it.key() + "'");
}

template <class T>
void read_opt(const json& obj, const char* key, T& dst, const std::string& where) {
  if (!obj.contains(key)) return;
  try {
    dst = obj.at(key).get<T>();
  } catch (const json::exception&) {
    throw ConfigError("config: '" + where + "." + key + "' has the wrong type");
  }
}

inline CoxeterGroup group_from_matrices(const std::vector<std::vector<std::vector<int>>>& mats) {
  if (mats.empty()) return trivial_group(0);
  const int dim = static_cast<int>(mats.front().size());
  std::vector<GroupElement> gens;
  for (const auto& m : mats) {
    if (static_cast<int>(m.size()) != dim) throw ConfigError("config: generators must share one dimension");
    std::vector<int> entries;
    for (const auto& row : m) {
      if (static_cast<int>(row.size()) != dim) throw ConfigError("config: generator matrices must be square");
      entries.insert(entries.end(), row.begin(), row.end());
    }
    try {
      gens.emplace_back(dim, std::move(entries));
    } catch (const std::exception& e) {
      throw ConfigError(std::string("config: bad generator: ") + e.what());
    }
  }
  try {
    auto G = generate_group(gens, dim);
    G.set_name("custom");
    return G;
  } catch (const std::exception& e) {
    throw ConfigError(std::string("config: bad generators: ") + e.what());
  }
}

} // namespace detail

/// Parses and validates a run configuration. Every section is optional;
/// unknown keys anywhere are rejected.
inline RunConfig parse_config(const json& j) {
  using detail::read_opt;
  RunConfig c;
  detail::reject_unknown(j, "", {"problem", "grid", "group", "solver", "output", "extension"});
  if (j.contains("problem")) {
    const auto& p = j["problem"];
    detail::reject_unknown(p, "problem", {"N", "s", "alpha", "p", "experimental"});
    read_opt(p, "N", c.params.N, "problem");
    read_opt(p, "s", c.params.s, "problem");
    read_opt(p, "alpha", c.params.alpha, "problem");
    read_opt(p, "p", c.params.p, "problem");
    read_opt(p, "experimental", c.params.experimental, "problem");
  }
  c.grid.dims = c.params.N;
  if (j.contains("grid")) {
    const auto& g = j["grid"];
    detail::reject_unknown(g, "grid", {"M", "L"});
    read_opt(g, "M", c.grid.M, "grid");
    read_opt(g, "L", c.grid.L, "grid");
  }
  if (j.contains("group")) {
    const auto& g = j["group"];
    detail::reject_unknown(g, "group", {"name", "generators", "list"});
    const int given = static_cast<int>(g.contains("name")) + static_cast<int>(g.contains("generators")) +
                      static_cast<int>(g.contains("list"));
    if (given > 1) throw ConfigError("config: group takes exactly one of name, generators, list");
    read_opt(g, "name", c.group_name, "group");
    read_opt(g, "generators", c.generators, "group");
    read_opt(g, "list", c.group_list, "group");
    if (g.contains("generators")) {
      c.group_name.clear();
      detail::group_from_matrices(c.generators);
    }
  }
  if (j.contains("solver")) {
    const auto& s = j["solver"];
    detail::reject_unknown(s, "solver", {"tol", "max_iters", "step", "seed", "R"});
    read_opt(s, "tol", c.tol, "solver");
    read_opt(s, "max_iters", c.max_iters, "solver");
    read_opt(s, "step", c.step, "solver");
    read_opt(s, "seed", c.seed, "solver");
    read_opt(s, "R", c.R, "solver");
  }
  if (j.contains("output")) {
    const auto& o = j["output"];
    detail::reject_unknown(o, "output", {"dir", "formats"});
    read_opt(o, "dir", c.out_dir, "output");
    read_opt(o, "formats", c.formats, "output");
    for (const auto& f : c.formats)
      if (f != "json" && f != "bin" && f != "csv") throw ConfigError("config: unknown output format '" + f + "'");
  }
  if (j.contains("extension")) {
    const auto& e = j["extension"];
    detail::reject_unknown(e, "extension", {"s", "J", "tol"});
    read_opt(e, "s", c.extension_s, "extension");
    read_opt(e, "J", c.extension_J, "extension");
    read_opt(e, "tol", c.extension_tol, "extension");
  }

  if (auto why = admissibility_error(c.params); !why.empty()) throw ConfigError("config: " + why);
  try {
    c.grid.validate();
  } catch (const std::exception& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  if (!(c.tol > 0.0)) throw ConfigError("config: solver.tol must be positive");
  if (c.max_iters < 1) throw ConfigError("config: solver.max_iters must be >= 1");
  if (!(c.step > 0.0)) throw ConfigError("config: solver.step must be positive");
  if (c.R < 0.0) throw ConfigError("config: solver.R must be >= 0");
  if (c.extension_J < 64) throw ConfigError("config: extension.J must be >= 64");
  for (double s : c.extension_s)
    if (!(s > 0.0 && s < 1.0)) throw ConfigError("config: extension.s values must lie in (0, 1)");
  return c;
}

inline RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw ConfigError("config: cannot open " + path.string());
  json j;
  try {
    is >> j;
  } catch (const json::exception& e) {
    throw ConfigError("config: " + path.string() + ": " + e.what());
  }
  return parse_config(j);
}

/// Resolved configuration, every default filled in.
inline json to_json(const RunConfig& c) {
  json group = json::object();
  if (!c.group_list.empty()) group["list"] = c.group_list;
  else if (!c.generators.empty()) group["generators"] = c.generators;
  else group["name"] = c.group_name;
  return {
      {"problem", {{"N", c.params.N}, {"s", c.params.s}, {"alpha", c.params.alpha}, {"p", c.params.p}, {"experimental", c.params.experimental}}},
      {"grid", {{"M", c.grid.M}, {"L", c.grid.L}}},
      {"group", group},
      {"solver", {{"tol", c.tol}, {"max_iters", c.max_iters}, {"step", c.step}, {"seed", c.seed}, {"R", c.R}}},
      {"output", {{"dir", c.out_dir}, {"formats", c.formats}}},
      {"extension", {{"s", c.extension_s}, {"J", c.extension_J}, {"tol", c.extension_tol}}},
  };
}

inline CoxeterGroup resolve_group(const std::string& name) {
  try {
    return named_group(name);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
}

/// The single group of the config (name or generators).
inline CoxeterGroup config_group(const RunConfig& c) {
  CoxeterGroup G = c.generators.empty() ? resolve_group(c.group_name) : detail::group_from_matrices(c.generators);
  if (G.dim() > c.grid.dims) throw ConfigError("config: group rank exceeds grid dimension");
  return G;
}

inline SolverConfig solver_config(const RunConfig& c, const CoxeterGroup& G) {
  if (G.dim() > c.grid.dims) throw ConfigError("config: group rank exceeds grid dimension");
  SolverConfig s;
  s.params = c.params;
  s.grid = c.grid;
  s.group = G;
  s.tol = c.tol;
  s.max_iters = c.max_iters;
  s.step = c.step;
  s.seed = c.seed;
  s.R = c.R;
  return s;
}

// ---- reports ---------------------------------------------------------------

inline json to_json(const NodalReport& n) {
  return {{"count", n.count},
          {"component_sizes", n.component_sizes},
          {"threshold", n.threshold},
          {"positive", n.positive},
          {"negative", n.negative}};
}

namespace detail {
// JSON has no NaN; absent values are written as null.
inline json num(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }
} // namespace detail

inline json to_json(const Solution& s) {
  return {{"energy", detail::num(s.energy)},
          {"residual", detail::num(s.residual)},
          {"iterations", s.iterations},
          {"converged", s.converged},
          {"status", s.status},
          {"nodal_count", s.nodal_count},
          {"nodal", to_json(s.nodal)},
          {"decay_slope", detail::num(s.decay_slope)},
          {"sign_on_chamber", s.sign_on_chamber},
          {"nehari_residual", detail::num(s.nehari_residual)},
          {"seconds", s.seconds}};
}

inline json to_json(const EnergyTable& t) {
  json rows = json::array();
  for (const auto& r : t.rows) {
    json facets = json::array();
    for (const auto& f : r.facets)
      facets.push_back({{"representative", f.representative},
                        {"orbit_size", f.orbit_size},
                        {"stabilizer", f.stabilizer},
                        {"stabilizer_order", f.stabilizer_order},
                        {"c_stabilizer", detail::num(f.c_stabilizer)},
                        {"converged", f.converged}});
    rows.push_back({{"group", r.group},
                    {"cG", detail::num(r.cG)},
                    {"orbit_size", r.orbit_size},
                    {"c_stabilizer", detail::num(r.c_stabilizer)},
                    {"cStar", detail::num(r.cStar)},
                    {"margin", detail::num(r.margin)},
                    {"converged", r.converged},
                    {"verified", r.verified},
                    {"status", r.status},
                    {"nodal_count", r.solution.nodal_count},
                    {"facets", facets}});
  }
  return {{"rows", rows}};
}

inline void write_json(const std::filesystem::path& path, const json& j) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot write " + path.string());
  os << j.dump(2) << '\n';
}

struct ExtensionRow {
  double s = 0.0;
  int J = 0;
  double lhs = 0.0, rhs = 0.0, ratio = 0.0;
};

inline void write_csv(std::ostream& os, const std::vector<ExtensionRow>& rows) {
  os << "s,J,lhs,rhs,ratio\n";
  os.precision(17);
  for (const auto& r : rows) os << r.s << ',' << r.J << ',' << r.lhs << ',' << r.rhs << ',' << r.ratio << '\n';
}

} // namespace fchoq
