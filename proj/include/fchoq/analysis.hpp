#pragma once
// Post-hoc checks on converged fields: nodal domains, tail decay rate and
// sign on the fundamental chamber.

#include <algorithm>
#include <cmath>
#include <deque>
#include <stdexcept>
#include <vector>

#include "coxeter.hpp"
#include "grid.hpp"

namespace fchoq {

struct NodalReport {
  int count = 0;
  std::vector<std::size_t> component_sizes; // positive components first
  double threshold = 0.0;
  int positive = 0;
  int negative = 0;
};

/// Connected components of {u > eps} and {u < -eps}, eps = eps_rel max|u|,
/// under face adjacency without periodic wrap.
inline NodalReport nodal_domains(const Field& u, double eps_rel = 1e-3) {
  if (!(eps_rel > 0.0 && eps_rel < 1.0)) throw std::invalid_argument("nodal_domains: eps_rel must lie in (0, 1)");
  const Grid& g = u.grid;
  NodalReport rep;
  rep.threshold = eps_rel * u.max_abs();
  std::vector<int> label(u.size(), 0);
  std::vector<std::size_t> stride(static_cast<std::size_t>(g.dims));
  {
    std::size_t st = 1;
    for (int a = g.dims - 1; a >= 0; --a) {
      stride[static_cast<std::size_t>(a)] = st;
      st *= static_cast<std::size_t>(g.M);
    }
  }
  std::vector<int> idx;
  std::deque<std::size_t> queue;
  for (int sign : {+1, -1}) {
    auto inside = [&](std::size_t i) { return sign * u.values[i] > rep.threshold; };
    for (std::size_t seed = 0; seed < u.size(); ++seed) {
      if (label[seed] != 0 || !inside(seed)) continue;
      const int id = static_cast<int>(rep.component_sizes.size()) + 1;
      std::size_t size = 0;
      label[seed] = id;
      queue.push_back(seed);
      while (!queue.empty()) {
        const std::size_t c = queue.front();
        queue.pop_front();
        ++size;
        g.unflatten(c, idx);
        for (int a = 0; a < g.dims; ++a) {
          const int j = idx[static_cast<std::size_t>(a)];
          const std::size_t st = stride[static_cast<std::size_t>(a)];
          if (j > 0 && label[c - st] == 0 && inside(c - st)) {
            label[c - st] = id;
            queue.push_back(c - st);
          }
          if (j + 1 < g.M && label[c + st] == 0 && inside(c + st)) {
            label[c + st] = id;
            queue.push_back(c + st);
          }
        }
      }
      rep.component_sizes.push_back(size);
      (sign > 0 ? rep.positive : rep.negative) += 1;
    }
  }
  rep.count = static_cast<int>(rep.component_sizes.size());
  return rep;
}

/// Least-squares slope of log(max_{shell} |u|) against log r over shells of
/// width h with r in [r_min_frac L, r_max_frac L]. A tail |x|^{-a} gives -a.
inline double decay_exponent(const Field& u, double r_min_frac, double r_max_frac) {
  if (!(0.0 < r_min_frac && r_min_frac < r_max_frac && r_max_frac <= 0.45))
    throw std::invalid_argument("decay_exponent: need 0 < r_min_frac < r_max_frac <= 0.45");
  const Grid& g = u.grid;
  const double h = g.h(), rmin = r_min_frac * g.L, rmax = r_max_frac * g.L;
  const std::size_t nshell = static_cast<std::size_t>(std::ceil(rmax / h)) + 2;
  std::vector<double> shell_max(nshell, 0.0);
  std::vector<bool> populated(nshell, false);
  std::vector<int> idx;
  for (std::size_t i = 0; i < u.size(); ++i) {
    g.unflatten(i, idx);
    double r2 = 0.0;
    for (int j : idx) r2 += (j - g.M / 2) * h * (j - g.M / 2) * h;
    const double r = std::sqrt(r2);
    const auto b = static_cast<std::size_t>(std::floor(r / h + 0.5));
    if (b >= nshell) continue;
    const double rb = static_cast<double>(b) * h;
    if (rb < rmin || rb > rmax) continue;
    populated[b] = true;
    shell_max[b] = std::max(shell_max[b], std::abs(u.values[i]));
  }
  std::vector<double> xs, ys;
  for (std::size_t b = 0; b < nshell; ++b)
    if (populated[b] && shell_max[b] > 0.0) {
      xs.push_back(std::log(static_cast<double>(b) * h));
      ys.push_back(std::log(shell_max[b]));
    }
  if (xs.size() < 5) throw std::invalid_argument("decay_exponent: fewer than 5 shells populated");
  const double n = static_cast<double>(xs.size());
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= n;
  my /= n;
  double sxy = 0, sxx = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxy += (xs[i] - mx) * (ys[i] - my);
    sxx += (xs[i] - mx) * (xs[i] - mx);
  }
  return sxy / sxx;
}

/// Coordinates of node idx restricted to the first k axes.
inline std::vector<double> leading_coords(const Grid& g, const std::vector<int>& idx, int k) {
  std::vector<double> x(static_cast<std::size_t>(k));
  for (int a = 0; a < k; ++a) x[static_cast<std::size_t>(a)] = g.coord(idx[static_cast<std::size_t>(a)]);
  return x;
}

/// True iff all nodes strictly inside the chamber with |u| > eps share a sign.
inline bool sign_on_fundamental_domain(const Field& u, const CoxeterGroup& G, double eps_rel = 1e-3) {
  const Grid& g = u.grid;
  const double eps = eps_rel * u.max_abs();
  const Chamber empty;
  const Chamber& C = G.has_chamber() ? G.chamber() : empty;
  int seen = 0;
  std::vector<int> idx;
  for (std::size_t i = 0; i < u.size(); ++i) {
    if (std::abs(u.values[i]) <= eps) continue;
    g.unflatten(i, idx);
    const auto x = leading_coords(g, idx, G.dim());
    bool interior = true;
    for (const auto& n : C.half_space_normals) interior = interior && detail::dot(n, x) > 1e-12;
    if (!interior) continue;
    const int sg = u.values[i] > 0 ? 1 : -1;
    if (seen == 0) seen = sg;
    else if (seen != sg) return false;
  }
  return true;
}

} // namespace fchoq
