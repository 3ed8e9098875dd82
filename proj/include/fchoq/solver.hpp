#pragma once
// Minimisation of I over the G-Nehari set by a symmetrised, preconditioned
// gradient flow: step, project with P_G, rescale onto the Nehari set, and
// backtrack until the energy decreases.

#include <chrono>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "analysis.hpp"
#include "coxeter.hpp"
#include "energy.hpp"
#include "grid.hpp"
#include "model_params.hpp"
#include "symmetry.hpp"

namespace fchoq {

struct SolverConfig {
  ModelParams params;
  Grid grid;
  CoxeterGroup group = trivial_group(0);
  int max_iters = 2000;
  double tol = 1e-6;   // on the projected relative L^2 gradient
  double step = 1.0;   // initial step, reset every iteration
  int max_halvings = 30;
  std::uint64_t seed = 1;
  double R = 0.0;      // saddle initializer scale; 0 selects L/16
  bool precondition = true;
  double eps_rel = 1e-3;
  double decay_r_min = 0.15;
  double decay_r_max = 0.35;

  void validate() const {
    if (!(tol > 0.0)) throw std::invalid_argument("solver: tol must be positive");
    if (max_iters < 1) throw std::invalid_argument("solver: max_iters must be >= 1");
    if (group.dim() > grid.dims) throw std::invalid_argument("group rank exceeds grid dimension");
    if (grid.dims != params.N) throw std::invalid_argument("grid dimension differs from N");
    require_admissible(params);
  }
  double placement_scale() const { return R > 0.0 ? R : grid.L / 16.0; }
};

/// The symmetric class lost its mass (||u|| < 1e-10).
struct CollapseToZero : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Solution {
  Field u;
  double energy = 0.0;
  double residual = 0.0;
  int iterations = 0;
  int nodal_count = 0;
  NodalReport nodal;
  double decay_slope = std::nan("");
  bool sign_on_chamber = false;
  bool converged = false;
  std::string status;                 // "converged", "max_iters" or "stalled"
  double nehari_residual = 0.0;       // |<I'(u),u>| / ||u||_{2,s}^2
  std::vector<double> energy_history; // Nehari energy after every accepted step
  double seconds = 0.0;
};

namespace detail {

inline double projected_residual(const Field& g, const Field& u) {
  const double uu = u.l2_norm_sq();
  const double c = g.dot(u) / uu;
  double acc = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    const double r = g.values[i] - c * u.values[i];
    acc += r * r;
  }
  return std::sqrt(acc * g.grid.cell_volume() / uu);
}

inline std::vector<double> pad(std::vector<double> q, int dims) {
  q.resize(static_cast<std::size_t>(dims), 0.0);
  return q;
}

} // namespace detail

/// exp(-|x|^2 / sigma^2), sigma = L/8, on the Nehari set.
inline Field init_groundstate(ChoquardFunctional& F) {
  const double sigma = F.grid().L / 8.0;
  Field u = Field::sample(F.grid(), [&](const std::vector<double>& x) {
    double r2 = 0.0;
    for (double a : x) r2 += a * a;
    return std::exp(-r2 / (sigma * sigma));
  });
  u *= F.nehari_scale(u);
  return u;
}

inline Field init_groundstate(const Grid& grid, const ModelParams& params) {
  ChoquardFunctional F(params, grid);
  return init_groundstate(F);
}

struct SaddleInit {
  Field u;
  std::vector<double> direction; // unit q actually used
  double radius = 0.0;           // distance of the copies from the origin
  int attempts = 0;              // jitter draws used
};

/// Signed copies of a profile at the points l_G R g q, g in G:
///   u_R(x) = (1/|S_q|) sum_g phi(g) profile(g^{-1} x - l_G R q),
/// with q the unit edge of the chamber opposite the first wall and
/// l_G = 6 / min_{x != y in O_q} |x - y|. The result is projected with P_G
/// and rescaled onto the Nehari set. A profile field (ideally the S_q
/// groundstate) is shifted by the nearest lattice vector. Without one a
/// Gaussian of width R/2 is used; when S_q is nontrivial its centre is moved
/// off the edge by one width towards the chamber interior, so that each copy
/// becomes an S_q-odd cluster instead of cancelling.
inline SaddleInit init_saddle(ChoquardFunctional& F, const CoxeterGroup& G, double R, std::uint64_t seed = 0,
                              const Field* profile = nullptr) {
  const Grid& grid = F.grid();
  if (G.trivial()) throw std::invalid_argument("init_saddle: group is trivial, use init_groundstate");
  if (G.dim() > grid.dims) throw std::invalid_argument("group rank exceeds grid dimension");
  if (!(R > 0.0 && R < grid.L / 4.0)) throw std::invalid_argument("init_saddle: R must lie in (0, L/4)");
  if (profile && !(profile->grid == grid)) throw std::invalid_argument("init_saddle: profile grid mismatch");

  const Chamber& C = G.chamber();
  const std::vector<double> q = chamber_ray(C, 0);
  const std::size_t k = q.size();

  const auto orb = orbit(G, q, 1e-9);
  double dmin = 2.0;
  for (std::size_t i = 0; i < orb.size(); ++i)
    for (std::size_t j = i + 1; j < orb.size(); ++j) {
      double d2 = 0.0;
      for (std::size_t a = 0; a < k; ++a) d2 += (orb[i][a] - orb[j][a]) * (orb[i][a] - orb[j][a]);
      dmin = std::min(dmin, std::sqrt(d2));
    }
  const double ell = 6.0 / dmin;
  const double stab = static_cast<double>(G.order() / orb.size());
  const double sigma = 0.5 * R;

  std::vector<double> offset(k, 0.0);
  if (!profile && stab > 1.0) {
    // interior direction: sum of the chamber edges minus its q component
    for (std::size_t i = 0; i < C.half_space_normals.size(); ++i) {
      const auto ray = chamber_ray(C, i);
      for (std::size_t a = 0; a < k; ++a) offset[a] += ray[a];
    }
    const double c = detail::dot(offset, q);
    for (std::size_t a = 0; a < k; ++a) offset[a] -= c * q[a];
    const double n = std::sqrt(detail::dot(offset, offset));
    for (auto& a : offset) a *= sigma / n;
  }
  const double reach = std::sqrt(detail::dot(offset, offset));
  const double guard = 0.5 * grid.L - 3.0 * R;
  if (ell * R + reach > guard) throw std::invalid_argument("init_saddle: placement radius exceeds L/2 - 3R, copies would wrap");

  // seed != 0 jitters the radius by up to 10%, redrawn while it breaks the guard
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  double jitter = 1.0;
  int attempts = 1;
  if (seed != 0) {
    for (; attempts <= 16; ++attempts) {
      jitter = 1.0 + 0.1 * unif(rng);
      if (ell * R * jitter + reach <= guard) break;
    }
    if (attempts > 16) jitter = 1.0;
  }
  const double radius = ell * R * jitter;

  std::vector<double> c(k);
  for (std::size_t a = 0; a < k; ++a) c[a] = radius * q[a] + offset[a];
  const auto center = detail::pad(c, grid.dims);

  Field sum(grid);
  if (!profile) {
    for (std::size_t e = 0; e < G.order(); ++e) {
      const auto gc = detail::pad(G.elements()[e].apply(c), grid.dims);
      std::vector<double> cg = center;
      for (std::size_t a = 0; a < k; ++a) cg[a] = gc[a];
      const double sg = G.signs()[e] / stab;
      Field b = Field::sample(grid, [&](const std::vector<double>& x) {
        double r2 = 0.0;
        for (std::size_t a = 0; a < x.size(); ++a) r2 += (x[a] - cg[a]) * (x[a] - cg[a]);
        return std::exp(-r2 / (sigma * sigma));
      });
      sum += sg * b;
    }
  } else {
    // non-periodic lattice shift of the profile by round(center / h)
    std::vector<int> shift(static_cast<std::size_t>(grid.dims));
    for (int a = 0; a < grid.dims; ++a) shift[static_cast<std::size_t>(a)] = static_cast<int>(std::lround(center[static_cast<std::size_t>(a)] / grid.h()));
    Field shifted(grid);
    std::vector<int> idx;
    for (std::size_t i = 0; i < shifted.size(); ++i) {
      grid.unflatten(i, idx);
      bool in = true;
      for (int a = 0; a < grid.dims; ++a) {
        int& j = idx[static_cast<std::size_t>(a)];
        j -= shift[static_cast<std::size_t>(a)];
        in = in && j >= 0 && j < grid.M;
      }
      if (in) shifted.values[i] = profile->values[grid.flatten(idx)];
    }
    for (std::size_t e = 0; e < G.order(); ++e) sum += (G.signs()[e] / stab) * act(G.elements()[e], shifted);
  }
  Field u = SymmetryPlan(grid, G).symmetrize(sum);
  if (!(u.max_abs() > 1e-6 * sum.max_abs())) throw std::runtime_error("init_saddle: symmetrized initial field vanished");
  u *= F.nehari_scale(u);
  return SaddleInit{std::move(u), q, radius, attempts};
}

inline Field init_saddle(const Grid& grid, const CoxeterGroup& G, const ModelParams& params, double R,
                         std::uint64_t seed = 0) {
  ChoquardFunctional F(params, grid);
  return init_saddle(F, G, R, seed).u;
}

/// Fills the analysis fields of a solution.
inline void analyze(Solution& sol, const SolverConfig& cfg) {
  sol.nodal = nodal_domains(sol.u, cfg.eps_rel);
  sol.nodal_count = sol.nodal.count;
  try {
    sol.decay_slope = decay_exponent(sol.u, cfg.decay_r_min, cfg.decay_r_max);
  } catch (const std::invalid_argument&) {
    sol.decay_slope = std::nan("");
  }
  sol.sign_on_chamber = sign_on_fundamental_domain(sol.u, cfg.group, cfg.eps_rel);
}

inline Solution solve(ChoquardFunctional& F, const SolverConfig& cfg, const Field& initial) {
  cfg.validate();
  const auto t_start = std::chrono::steady_clock::now();
  const SymmetryPlan plan(cfg.grid, cfg.group);
  const double p = cfg.params.p;

  Field u = plan.symmetrize(initial);
  if (u.l2_norm() < 1e-10) throw CollapseToZero("solve: initial field vanishes in the symmetric class");
  const double d0 = F.interaction(u);
  if (!(d0 > 0.0)) throw std::invalid_argument("solve: initial field has zero interaction");
  u *= F.nehari_scale(u);
  Evaluation ev = F.evaluate(u);

  Solution sol;
  sol.status = "max_iters";
  sol.energy_history.push_back(ev.energy.total);
  Field g = F.gradient(u, ev.potential);
  sol.residual = detail::projected_residual(g, u);

  for (int it = 0; it < cfg.max_iters; ++it) {
    if (sol.residual <= cfg.tol) {
      sol.converged = true;
      sol.status = "converged";
      break;
    }
    const Field dir = cfg.precondition ? F.precondition(g) : g;
    double tau = cfg.step;
    bool accepted = false;
    for (int h = 0; h <= cfg.max_halvings; ++h, tau *= 0.5) {
      Field v = u;
      for (std::size_t i = 0; i < v.size(); ++i) v.values[i] -= tau * dir.values[i];
      v = plan.symmetrize(v);
      if (v.l2_norm() < 1e-10) continue;
      Evaluation ew = F.evaluate(v);
      if (!(ew.energy.nonlocal > 0.0)) continue;
      // rescale onto the Nehari set; energy and potential follow by homogeneity
      const double t = std::pow(ew.hs_norm_sq / ew.energy.nonlocal, 1.0 / (2.0 * p - 2.0));
      v *= t;
      ew.hs_norm_sq *= t * t;
      ew.energy.quad *= t * t;
      ew.energy.nonlocal *= std::pow(t, 2.0 * p);
      ew.energy.total = ew.energy.quad - ew.energy.nonlocal / (2.0 * p);
      ew.potential *= std::pow(t, p);
      if (ew.energy.total < ev.energy.total) {
        u = std::move(v);
        ev = std::move(ew);
        accepted = true;
        break;
      }
    }
    if (!accepted) {
      sol.status = "stalled";
      break;
    }
    ++sol.iterations;
    sol.energy_history.push_back(ev.energy.total);
    g = F.gradient(u, ev.potential);
    sol.residual = detail::projected_residual(g, u);
  }
  if (!sol.converged && sol.residual <= cfg.tol) {
    sol.converged = true;
    sol.status = "converged";
  }
  if (u.l2_norm() < 1e-10) throw CollapseToZero("solve: iterate collapsed to zero");

  const Evaluation fin = F.evaluate(u);
  sol.energy = fin.energy.total;
  sol.nehari_residual = std::abs(fin.hs_norm_sq - fin.energy.nonlocal) / fin.hs_norm_sq;
  sol.u = std::move(u);
  analyze(sol, cfg);
  sol.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();
  return sol;
}

inline Solution solve(const SolverConfig& cfg, const Field& initial) {
  ChoquardFunctional F(cfg.params, cfg.grid);
  return solve(F, cfg, initial);
}

/// Solve from the default initializer for cfg.group.
inline Solution solve(ChoquardFunctional& F, const SolverConfig& cfg) {
  if (cfg.group.trivial()) return solve(F, cfg, init_groundstate(F));
  return solve(F, cfg, init_saddle(F, cfg.group, cfg.placement_scale(), cfg.seed).u);
}

struct MountainPassReport {
  std::vector<double> t;
  std::vector<double> values;
  double max = 0.0;
  double t_at_max = 0.0;
  double value_at_one = 0.0;
};

/// I(t u) for t = 0, 0.02, ..., 2. On the Nehari set the fibering map
/// t -> I(t u) peaks at t = 1.
inline MountainPassReport mountain_pass_check(ChoquardFunctional& F, const Field& u, int samples = 101) {
  MountainPassReport rep;
  rep.max = -std::numeric_limits<double>::infinity();
  for (int i = 0; i < samples; ++i) {
    const double t = 2.0 * i / (samples - 1);
    const double v = F.energy(t * u).total;
    rep.t.push_back(t);
    rep.values.push_back(v);
    if (v > rep.max) {
      rep.max = v;
      rep.t_at_max = t;
    }
    if (2 * i == samples - 1) rep.value_at_one = v;
  }
  return rep;
}

inline MountainPassReport mountain_pass_check(const Solution& sol, const ModelParams& params) {
  ChoquardFunctional F(params, sol.u.grid);
  return mountain_pass_check(F, sol.u);
}

} // namespace fchoq
