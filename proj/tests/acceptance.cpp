// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fail.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include <fchoq/fchoq.hpp>

#include "oracles.hpp"

using namespace fchoq;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

const ModelParams kParams{3, 0.5, 2.0, 2.0};
const char* kNamed[] = {"A1", "A1xA1", "A2", "B2", "B3"};

struct Outcome {
  bool pass = true;
  std::string detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail += (detail.empty() ? "" : "; ") + what;
    }
  }
  void note(const std::string& s) { detail += (detail.empty() ? "" : "; ") + s; }
};

std::string fmt(const char* f, double a, double b = 0.0, double c = 0.0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c);
  return buf;
}

Field random_field(const Grid& g, unsigned seed) {
  std::mt19937 rng(seed);
  std::normal_distribution<double> n;
  Field u(g);
  for (auto& v : u.values) v = n(rng);
  return u;
}

SolverConfig config(const Grid& g, const CoxeterGroup& G, std::uint64_t seed = 1, int max_iters = 2000) {
  SolverConfig c;
  c.params = kParams;
  c.grid = g;
  c.group = G;
  c.seed = seed;
  c.max_iters = max_iters;
  c.tol = 1e-6;
  return c;
}

// ---- 1 ---------------------------------------------------------------------

Outcome spectral_exactness() {
  Outcome o;
  const auto t0 = Clock::now();
  const Grid g(3, 16, 10.0);
  Spectral sp(g);
  double worst = 0.0, op_seconds = 0.0;
  std::vector<int> m(3);
  for (std::size_t f = 0; f < g.size(); ++f) {
    g.unflatten(f, m);
    double k[3], k2 = 0.0;
    for (int a = 0; a < 3; ++a) {
      k[a] = (m[a] - g.M / 2) * g.dxi();
      k2 += k[a] * k[a];
    }
    // the real part of exp(i xi.x) with a phase, so both cos and sin components appear
    const Field u = Field::sample(g, [&](const auto& x) { return std::cos(k[0] * x[0] + k[1] * x[1] + k[2] * x[2] + 0.3); });
    const auto t1 = Clock::now();
    const Field v = sp.fractional_laplacian(u, 0.5);
    op_seconds += seconds_since(t1);
    const double lam = std::sqrt(k2);
    double err = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) err = std::max(err, std::abs(v.values[i] - lam * u.values[i]));
    worst = std::max(worst, k2 == 0.0 ? err : err / (lam * u.max_abs()));
  }
  const double t = seconds_since(t0);
  o.require(worst <= 1e-12, "relative error " + fmt("%.2e", worst));
  o.require(op_seconds < 1.0, fmt("operator runtime %.2f s", op_seconds));
  o.note(std::to_string(g.size()) + fmt(" modes, max rel err %.2e, operator %.3f s (with field setup %.2f s)", worst, op_seconds, t));
  return o;
}

// ---- 2 ---------------------------------------------------------------------

Outcome convolution_oracle() {
  Outcome o;
  const auto t0 = Clock::now();
  const Grid g(3, 8, 4.0);
  double worst = 0.0;
  for (unsigned seed = 0; seed < 3; ++seed) {
    const Field f = random_field(g, seed);
    worst = std::max(worst, oracle::rel_l2(riesz_convolve(f, kParams.alpha), oracle::direct_riesz(f, kParams.alpha)));
  }
  const double t = seconds_since(t0);
  o.require(worst <= 1e-10, fmt("relative error %.2e", worst));
  o.require(t < 10.0, fmt("runtime %.2f s", t));
  o.note(fmt("max rel err %.2e, %.2f s", worst, t));
  return o;
}

// ---- 3 ---------------------------------------------------------------------

Outcome gradient_check() {
  Outcome o;
  const Grid g(3, 12, 6.0);
  ChoquardFunctional F(kParams, g);
  std::mt19937 rng(2024);
  double worst = 0.0;
  for (int t = 0; t < 10; ++t) {
    const Field u = oracle::smooth_random(g, rng);
    const Field v = oracle::smooth_random(g, rng);
    worst = std::max(worst, oracle::gradient_fd_error(F, u, v));
  }
  o.require(worst <= 1e-5, fmt("relative error %.2e", worst));
  o.note(fmt("10 pairs, max rel err %.2e", worst));
  return o;
}

// ---- 4 ---------------------------------------------------------------------

Outcome coxeter_suite() {
  Outcome o;
  const std::size_t orders[] = {2, 4, 6, 8, 48};
  long checks = 0;
  for (int gi = 0; gi < 5; ++gi) {
    const auto G = named_group(kNamed[gi]);
    const std::string name = kNamed[gi];
    o.require(G.order() == orders[gi], name + " order " + std::to_string(G.order()));
    const auto& el = G.elements();
    const auto id = GroupElement::identity(G.dim());
    bool axioms = G.contains(id);
    for (const auto& g : el) {
      axioms = axioms && G.contains(g.inverse()) && g * g.inverse() == id;
      for (const auto& h : el) {
        axioms = axioms && G.contains(g * h);
        axioms = axioms && sign_character(G, g * h) == sign_character(G, g) * sign_character(G, h);
        for (const auto& k : el)
          if (el.size() <= 8) axioms = axioms && (g * h) * k == g * (h * k);
      }
    }
    for (const auto& r : G.generators()) axioms = axioms && sign_character(G, r) == -1 && r * r == id;
    o.require(axioms, name + " axioms");

    std::mt19937 rng(100 + gi);
    std::normal_distribution<double> n;
    std::uniform_int_distribution<int> coin(0, 3);
    bool lagrange = true;
    for (int t = 0; t < 100; ++t) {
      std::vector<double> x(static_cast<std::size_t>(G.dim()));
      for (auto& a : x) a = coin(rng) == 0 ? 0.0 : std::round(4.0 * n(rng)) / 2.0;
      if (G.dim() > 1 && coin(rng) == 0) x[1] = x[0];
      lagrange = lagrange && G.order() == orbit(G, x).size() * stabilizer(G, x).order();
      ++checks;
    }
    // lattice points of an 8^3 grid, leading coordinates
    for (long f = 0; f < 512; ++f) {
      std::vector<long> x(static_cast<std::size_t>(G.dim()));
      long r = f;
      for (int a = 0; a < 3; ++a, r /= 8)
        if (a < G.dim()) x[static_cast<std::size_t>(a)] = r % 8 - 4;
      lagrange = lagrange && G.order() == orbit(G, x).size() * stabilizer(G, x).order();
      ++checks;
    }
    o.require(lagrange, name + " Lagrange identity");
  }
  o.note("orders 2,4,6,8,48; " + std::to_string(checks) + " orbit-stabilizer checks");
  return o;
}

// ---- 5 ---------------------------------------------------------------------

Outcome symmetrization() {
  Outcome o;
  for (const Grid& g : {Grid(3, 8, 4.0), Grid(3, 12, 6.0)})
    for (const char* name : kNamed) {
      const auto G = named_group(name);
      const SymmetryPlan P(g, G);
      for (unsigned seed = 0; seed < 3; ++seed) {
        const Field w = P.symmetrize(random_field(g, seed));
        o.require(P.symmetrize(w).values == w.values, std::string(name) + " not idempotent");
        for (std::size_t e = 0; e < G.order(); ++e) {
          Field sw = w;
          for (double& v : sw.values) v *= G.signs()[e];
          if (act(G.elements()[e], w).values != sw.values) {
            o.require(false, std::string(name) + " not equivariant");
            break;
          }
        }
      }
    }
  if (o.pass) o.note("bitwise on 8^3 and 12^3, 3 fields per group");
  return o;
}

// ---- 6 to 9 ----------------------------------------------------------------

bool one_signed(const Field& u, double eps_rel = 1e-3) {
  const double thr = eps_rel * u.max_abs();
  bool pos = false, neg = false;
  for (double v : u.values) {
    pos = pos || v > thr;
    neg = neg || v < -thr;
  }
  return pos != neg;
}

struct Runs {
  EnergyTable table; // trivial, A1, A1xA1, B2 on 48^3, L = 24
  Solution fine;     // groundstate on 64^3, L = 32
  std::vector<Solution> a1_seeds;
  double seconds = 0.0;

  std::vector<std::pair<std::string, const Solution*>> all() const {
    std::vector<std::pair<std::string, const Solution*>> out;
    for (const auto& row : table.rows) out.emplace_back(row.group, &row.solution);
    out.emplace_back("A1 seed 2", &a1_seeds[0]);
    out.emplace_back("A1 seed 3", &a1_seeds[1]);
    out.emplace_back("trivial 64^3", &fine);
    return out;
  }
};

Runs compute() {
  Runs r;
  const auto t0 = Clock::now();
  const Grid g(3, 48, 24.0);
  std::vector<SolverConfig> cfgs;
  for (const char* name : {"trivial", "A1", "A1xA1", "B2"}) cfgs.push_back(config(g, named_group(name)));
  r.table = energy_table(cfgs);
  for (std::uint64_t seed : {2u, 3u}) {
    ChoquardFunctional F(kParams, g);
    r.a1_seeds.push_back(solve(F, config(g, named_group("A1"), seed)));
  }
  {
    ChoquardFunctional F(kParams, Grid(3, 64, 32.0));
    r.fine = solve(F, config(Grid(3, 64, 32.0), trivial_group(0)));
  }
  r.seconds = seconds_since(t0);
  return r;
}

const EnergyTableRow& row(const Runs& r, const std::string& name) {
  for (const auto& x : r.table.rows)
    if (x.group == name) return x;
  throw std::logic_error("missing row " + name);
}

Outcome groundstate(const Runs& r) {
  Outcome o;
  const Solution& s = row(r, "trivial").solution;
  o.require(s.converged && s.residual <= 1e-6, "not converged: " + s.status + fmt(", residual %.2e", s.residual));
  o.require(s.iterations <= 2000, "iterations " + std::to_string(s.iterations));
  o.require(s.seconds < 300.0, fmt("runtime %.1f s", s.seconds));
  o.require(one_signed(s.u), "not one-signed above eps");
  o.require(s.nodal_count == 1, "nodal count " + std::to_string(s.nodal_count));
  const double target = -(kParams.N + 2.0 * kParams.s);
  o.require(std::abs(s.decay_slope - target) <= 0.15 * std::abs(target), fmt("decay slope %.3f", s.decay_slope));
  o.require(r.fine.converged, "64^3 run not converged: " + r.fine.status);
  const double drift = std::abs(r.fine.energy - s.energy) / s.energy;
  o.require(drift < 5e-3, fmt("energy drift %.3f%%", 100.0 * drift));
  o.note(fmt("c0 = %.6f, %.0f iterations, %.1f s", s.energy, s.iterations, s.seconds));
  o.note(fmt("slope %.3f, 64^3/L=32 energy %.6f (drift %.3f%%)", s.decay_slope, r.fine.energy, 100.0 * drift));
  return o;
}

Outcome odd_saddle(const Runs& r) {
  Outcome o;
  const double c0 = row(r, "trivial").cG;
  const auto& a1 = row(r, "A1");
  const Solution& s = a1.solution;
  o.require(s.converged, "not converged: " + s.status);
  o.require(s.nodal_count == 2, "nodal count " + std::to_string(s.nodal_count));
  o.require(s.sign_on_chamber, "sign changes on {x1 > 0}");
  o.require(s.energy > c0 + 0.05 * c0, fmt("c_A1 - c0 = %.4f", s.energy - c0));
  o.require(s.energy < 2.0 * c0 - 0.05 * c0, fmt("2 c0 - c_A1 = %.4f", 2.0 * c0 - s.energy));
  double lo = s.energy, hi = s.energy;
  for (const auto& x : r.a1_seeds) {
    o.require(x.converged, "seed run not converged: " + x.status);
    lo = std::min(lo, x.energy);
    hi = std::max(hi, x.energy);
  }
  o.require((hi - lo) / lo <= 0.01, fmt("seed spread %.3f%%", 100.0 * (hi - lo) / lo));
  o.note(fmt("c_A1 = %.6f in (%.4f, %.4f)", s.energy, c0, 2.0 * c0));
  o.note(fmt("seeds 1..3 spread %.2e relative", (hi - lo) / lo));
  return o;
}

Outcome rank_two(const Runs& r) {
  Outcome o;
  for (const auto& [name, count] : {std::pair<std::string, int>{"A1xA1", 4}, {"B2", 8}}) {
    const auto& x = row(r, name);
    const Solution& s = x.solution;
    o.require(s.converged, name + " not converged: " + s.status);
    o.require(s.nodal_count == count, name + " nodal count " + std::to_string(s.nodal_count));
    o.require(s.sign_on_chamber, name + " sign changes on the chamber");
    o.require(x.verified, name + " row unverified: " + x.status);
    o.require(x.margin >= 0.05 * x.cG, name + fmt(" margin %.2f%%", 100.0 * x.margin / x.cG));
    o.note(name + fmt(": cG = %.4f, c* = %.4f, margin %.1f%%", x.cG, x.cStar, 100.0 * x.margin / x.cG));
  }
  return o;
}

Outcome nehari_consistency(const Runs& r) {
  Outcome o;
  double worst = 0.0, worst_t = 0.0;
  int n = 0;
  for (const auto& [name, s] : r.all()) {
    if (!s->converged) continue;
    ++n;
    ChoquardFunctional F(kParams, s->u.grid);
    const double direct = F.energy(s->u).total;
    const double rel = std::abs(F.nehari_energy(s->u) - direct) / direct;
    worst = std::max(worst, rel);
    o.require(rel <= 1e-10, name + fmt(" nehari_energy off by %.2e", rel));
    const auto mp = mountain_pass_check(F, s->u);
    const double dt = mp.t[1] - mp.t[0];
    worst_t = std::max(worst_t, std::abs(mp.t_at_max - 1.0));
    o.require(std::abs(mp.t_at_max - 1.0) <= dt * (1.0 + 1e-9), name + fmt(" ray maximum at t = %.3f", mp.t_at_max));
  }
  o.require(n > 0, "no converged solution");
  o.note(std::to_string(n) + fmt(" solutions, max rel diff %.2e, max |t* - 1| = %.3f", worst, worst_t));
  return o;
}

// ---- 10 --------------------------------------------------------------------

Outcome extension_identities() {
  Outcome o;
  const Grid g(3, 16, 8.0);
  const YGrid yg = default_ygrid(g, 256);
  std::mt19937 rng(10);
  const Field u = oracle::smooth_random(g, rng);
  std::string ratios;
  for (double s : {0.25, 0.5, 0.75}) {
    const auto r = energy_identity_check(u, s, yg);
    o.require(std::abs(r.ratio - 1.0) <= 0.02, fmt("s=%.2f ratio %.5f", s, r.ratio));
    ratios += fmt(" %.5f", r.ratio);

    const auto U = harmonic_extend(u, s, yg);
    o.require(trace_inequality_check(U, s).satisfied, fmt("trace inequality fails on harmonic extension, s=%.2f", s));
    std::uniform_real_distribution<double> u01(0.0, 1.0);
    for (int t = 0; t < 5; ++t) {
      const double ya = yg.Ymax * (0.001 + 0.02 * u01(rng));
      const double yb = ya * (2.0 + 3.0 * u01(rng));
      const Field shape = oracle::smooth_random(g, rng);
      const double amp = 0.2 * (0.5 + u01(rng)) * u.max_abs() / shape.max_abs();
      ExtensionField V = U;
      for (std::size_t j = 1; j < V.slices.size(); ++j) {
        const double y = V.y(j);
        if (y <= ya || y >= yb) continue;
        V.slices[j] += (amp * std::pow(std::sin(std::numbers::pi * (y - ya) / (yb - ya)), 2)) * shape;
      }
      o.require(trace_inequality_check(V, s).satisfied, fmt("trace inequality fails on perturbed field, s=%.2f", s));
    }
  }
  // closed form at s = 1/2: psi(y) = exp(-y)
  double half = 0.0;
  for (double y = 0.0; y <= 50.0; y += 0.01) half = std::max(half, std::abs(psi_profile(0.5, y) - std::exp(-y)));
  o.require(half <= 1e-12, fmt("psi(1/2) differs from exp(-y) by %.2e", half));

  std::vector<double> ys;
  for (int i = 1; i <= 5000; ++i) ys.push_back(50.0 * i / 5000.0);
  for (int i = 0; i < 40; ++i) ys.push_back(std::pow(10.0, -8.0 + 0.2 * i));
  double ode = 0.0;
  for (double s : {0.25, 0.5, 0.75}) {
    const auto ref = oracle::psi_ode(s, ys);
    for (std::size_t i = 0; i < ys.size(); ++i) ode = std::max(ode, std::abs(ref[i] - psi_profile(s, ys[i])));
  }
  o.require(ode <= 1e-8, fmt("psi vs ODE max error %.2e", ode));
  o.note("ratios" + ratios + fmt(", psi vs ODE %.1e", ode));
  return o;
}

} // namespace

int main() {
  int failed = 0;
  auto report = [&](int id, const char* title, const Outcome& o) {
    std::printf("%s %2d %s: %s\n", o.pass ? "PASS" : "FAIL", id, title, o.detail.c_str());
    std::fflush(stdout);
    failed += o.pass ? 0 : 1;
  };
  auto guarded = [](const std::function<Outcome()>& f) {
    try {
      return f();
    } catch (const std::exception& e) {
      Outcome o;
      o.require(false, std::string("exception: ") + e.what());
      return o;
    }
  };

  report(1, "spectral exactness", guarded(spectral_exactness));
  report(2, "convolution oracle", guarded(convolution_oracle));
  report(3, "gradient check", guarded(gradient_check));
  report(4, "coxeter suite", guarded(coxeter_suite));
  report(5, "symmetrization", guarded(symmetrization));

  Runs runs;
  std::string run_error;
  try {
    runs = compute();
  } catch (const std::exception& e) {
    run_error = e.what();
  }
  auto with_runs = [&](const std::function<Outcome(const Runs&)>& f) {
    if (!run_error.empty()) {
      Outcome o;
      o.require(false, "solver runs failed: " + run_error);
      return o;
    }
    return guarded([&] { return f(runs); });
  };
  report(6, "groundstate", with_runs(groundstate));
  report(7, "odd saddle", with_runs(odd_saddle));
  report(8, "rank-two saddles", with_runs(rank_two));
  report(9, "nehari consistency", with_runs(nehari_consistency));
  report(10, "extension identities", guarded(extension_identities));
  std::printf("%d of 10 criteria passed (solver runs %.0f s)\n", 10 - failed, runs.seconds);
  return failed == 0 ? 0 : 1;
}
