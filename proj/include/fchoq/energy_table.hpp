#pragma once
// Comparison of the symmetric level c_G with
//   c*_G = min { |O_x| c_{S_x} : x on an edge of the chamber },
// where S_x is the stabilizer of x and c_{S_x} the level of the
// S_x-symmetric problem.

#include <algorithm>
#include <cmath>
#include <map>
#include <ostream>
#include <string>
#include <vector>

#include "coxeter.hpp"
#include "solver.hpp"

namespace fchoq {

struct FacetEntry {
  std::vector<long> representative; // integer point on the edge
  std::size_t orbit_size = 0;
  std::string stabilizer;           // reflection normals of S_x, e.g. "r(0,1)"
  std::size_t stabilizer_order = 0;
  double c_stabilizer = std::nan("");
  bool converged = false;
};

struct EnergyTableRow {
  std::string group;
  double cG = std::nan("");
  std::size_t orbit_size = 0;       // |O_q| at the minimizing facet
  double c_stabilizer = std::nan(""); // c_{S_q} at the minimizing facet
  double cStar = std::nan("");
  double margin = std::nan("");     // cStar - cG
  bool converged = false;           // every solve of the row converged
  bool verified = false;
  std::string status;
  std::vector<FacetEntry> facets;
  Solution solution;                // the G-symmetric solve
};

struct EnergyTable {
  std::vector<EnergyTableRow> rows;
};

namespace detail {

// Key of the induced action on the grid: the element set padded to dims.
inline std::vector<std::vector<int>> action_key(const CoxeterGroup& G, int dims) {
  std::vector<std::vector<int>> key;
  for (const auto& g : G.elements()) {
    std::vector<int> e(static_cast<std::size_t>(dims * dims), 0);
    for (int i = 0; i < dims; ++i)
      for (int j = 0; j < dims; ++j)
        e[static_cast<std::size_t>(i * dims + j)] = i < g.dim() && j < g.dim() ? g.at(i, j) : (i == j ? 1 : 0);
    key.push_back(std::move(e));
  }
  std::sort(key.begin(), key.end());
  return key;
}

inline std::string describe_generators(const CoxeterGroup& G) {
  if (G.trivial()) return "trivial";
  std::string out;
  for (const auto& g : G.generators()) {
    if (!out.empty()) out += ' ';
    const auto n = integer_direction(g.reflection_normal());
    out += "r(";
    for (std::size_t i = 0; i < n.size(); ++i) out += (i ? "," : "") + std::to_string(n[i]);
    out += ')';
  }
  return out;
}

} // namespace detail

/// Solves every config and, for every chamber edge of its group, the
/// stabilizer problem on the same grid. Identical actions are solved once.
/// A row is verified when all its solves converged, c_G > 0 and c_G < c*_G;
/// the trivial row has no facets and only needs c_0 > 0.
inline EnergyTable energy_table(const std::vector<SolverConfig>& configs) {
  std::map<std::vector<std::vector<int>>, Solution> cache;
  auto run = [&](SolverConfig cfg) -> const Solution& {
    const auto key = detail::action_key(cfg.group, cfg.grid.dims);
    auto it = cache.find(key);
    if (it != cache.end()) return it->second;
    Solution sol;
    try {
      ChoquardFunctional F(cfg.params, cfg.grid);
      sol = solve(F, cfg);
    } catch (const std::exception& e) {
      sol.converged = false;
      sol.energy = std::nan("");
      sol.status = std::string("error: ") + e.what();
    }
    return cache.emplace(key, std::move(sol)).first->second;
  };

  EnergyTable table;
  for (const auto& cfg : configs) {
    EnergyTableRow row;
    row.group = cfg.group.name().empty() ? detail::describe_generators(cfg.group) : cfg.group.name();
    const Solution& own = run(cfg);
    row.solution = own;
    row.cG = own.energy;
    row.converged = own.converged;
    row.status = own.status;
    if (!cfg.group.trivial()) {
      const Chamber& C = cfg.group.chamber();
      for (std::size_t i = 0; i < C.half_space_normals.size(); ++i) {
        FacetEntry f;
        const auto q = chamber_ray(C, i);
        f.representative = integer_direction(q);
        std::vector<double> x(f.representative.begin(), f.representative.end());
        const CoxeterGroup S = parabolic_subgroup(cfg.group, x);
        f.stabilizer = detail::describe_generators(S);
        f.stabilizer_order = S.order();
        f.orbit_size = orbit(cfg.group, f.representative).size();
        SolverConfig sub = cfg;
        sub.group = S;
        const Solution& s = run(sub);
        f.c_stabilizer = s.energy;
        f.converged = s.converged;
        row.converged = row.converged && s.converged;
        if (!s.converged && row.status == "converged") row.status = "facet " + std::to_string(i) + ": " + s.status;
        const double cand = static_cast<double>(f.orbit_size) * f.c_stabilizer;
        if (std::isnan(row.cStar) || cand < row.cStar) {
          row.cStar = cand;
          row.orbit_size = f.orbit_size;
          row.c_stabilizer = f.c_stabilizer;
        }
        row.facets.push_back(std::move(f));
      }
      row.margin = row.cStar - row.cG;
    }
    row.verified = row.converged && row.cG > 0.0 && (cfg.group.trivial() || row.margin > 0.0);
    table.rows.push_back(std::move(row));
  }
  return table;
}

inline void write_csv(std::ostream& os, const EnergyTable& t) {
  os << "group,cG,cStar,margin,verified\n";
  os.precision(17);
  for (const auto& r : t.rows)
    os << r.group << ',' << r.cG << ',' << r.cStar << ',' << r.margin << ',' << (r.verified ? "true" : "false") << '\n';
}

} // namespace fchoq
