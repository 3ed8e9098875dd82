#pragma once
// Lattice action of a signed-permutation group on fields and the projection
//   P_G u = (1/|G|) sum_g phi(g) u(g^{-1} x)
// onto {u : g o u = phi(g) u}. Everything here is an exact index permutation
// (periodic wrap m -> m mod M on the relative index m = j - M/2).

#include <stdexcept>
#include <vector>

#include "coxeter.hpp"
#include "grid.hpp"

namespace fchoq {

namespace detail {

inline void check_action(const Grid& grid, const CoxeterGroup& G) {
  if (G.dim() > grid.dims) throw std::invalid_argument("group rank exceeds grid dimension");
}

// Flat index of g applied to the node with multi-index idx.
inline std::size_t act_on_node(const Grid& grid, const GroupElement& g, const std::vector<int>& idx,
                               std::vector<int>& scratch) {
  const int M = grid.M, half = M / 2;
  scratch = idx;
  for (int i = 0; i < g.dim(); ++i) {
    const int j = g.source(i);
    int m = g.at(i, j) * (idx[static_cast<std::size_t>(j)] - half);
    m = ((m + half) % M + M) % M;
    scratch[static_cast<std::size_t>(i)] = m;
  }
  return grid.flatten(scratch);
}

} // namespace detail

/// (g o u)(x) = u(g^{-1} x).
inline Field act(const GroupElement& g, const Field& u) {
  if (g.dim() > u.grid.dims) throw std::invalid_argument("group rank exceeds grid dimension");
  Field r(u.grid);
  const GroupElement ginv = g.inverse();
  std::vector<int> idx, tmp;
  for (std::size_t i = 0; i < u.size(); ++i) {
    u.grid.unflatten(i, idx);
    r.values[i] = u.values[detail::act_on_node(u.grid, ginv, idx, tmp)];
  }
  return r;
}

/// Lattice orbits of G with the sign each node carries relative to the
/// orbit representative. Orbits whose stabilizer contains an element with
/// phi = -1 are forced to zero by the projection.
class SymmetryPlan {
 public:
  SymmetryPlan(const Grid& grid, const CoxeterGroup& G) : grid_(grid), order_(G.order()) {
    detail::check_action(grid, G);
    const std::size_t n = grid.size();
    std::vector<int> orbit_of(n, -1);
    std::vector<int> idx, tmp;
    std::vector<std::pair<std::size_t, int>> members;
    for (std::size_t x = 0; x < n; ++x) {
      if (orbit_of[x] >= 0) continue;
      grid.unflatten(x, idx);
      members.clear();
      bool zero = false;
      for (std::size_t e = 0; e < G.order(); ++e) {
        const std::size_t y = detail::act_on_node(grid, G.elements()[e], idx, tmp);
        const int sg = G.signs()[e];
        bool found = false;
        for (auto& [node, s] : members)
          if (node == y) {
            found = true;
            if (s != sg) zero = true;
            break;
          }
        if (!found) members.emplace_back(y, sg);
      }
      const int id = static_cast<int>(start_.size());
      start_.push_back(nodes_.size());
      zero_.push_back(zero);
      for (auto& [node, s] : members) {
        orbit_of[node] = id;
        nodes_.push_back(node);
        sign_.push_back(static_cast<signed char>(s));
      }
    }
    start_.push_back(nodes_.size());
  }

  std::size_t orbit_count() const { return zero_.size(); }
  std::size_t group_order() const { return order_; }
  const Grid& grid() const { return grid_; }

  Field symmetrize(const Field& u) const {
    if (!(u.grid == grid_)) throw std::invalid_argument("symmetrize: grid mismatch");
    Field v(grid_);
    for (std::size_t o = 0; o < zero_.size(); ++o) {
      const std::size_t b = start_[o], e = start_[o + 1];
      if (zero_[o]) continue;
      // shifted mean: exact when all signed samples coincide
      const double t0 = sign_[b] * u.values[nodes_[b]];
      double acc = 0.0;
      for (std::size_t i = b + 1; i < e; ++i) acc += sign_[i] * u.values[nodes_[i]] - t0;
      const double mean = t0 + acc / static_cast<double>(e - b);
      for (std::size_t i = b; i < e; ++i) v.values[nodes_[i]] = sign_[i] * mean;
    }
    return v;
  }

 private:
  Grid grid_;
  std::size_t order_;
  std::vector<std::size_t> start_;
  std::vector<std::size_t> nodes_;
  std::vector<signed char> sign_;
  std::vector<bool> zero_;
};

inline Field symmetrize(const Field& u, const CoxeterGroup& G) { return SymmetryPlan(u.grid, G).symmetrize(u); }

/// Exact check of g o u == phi(g) u for every element.
inline bool is_symmetric(const Field& u, const CoxeterGroup& G) {
  for (std::size_t e = 0; e < G.order(); ++e) {
    Field gu = act(G.elements()[e], u);
    const double sg = G.signs()[e];
    for (std::size_t i = 0; i < u.size(); ++i)
      if (gu.values[i] != sg * u.values[i]) return false;
  }
  return true;
}

} // namespace fchoq
