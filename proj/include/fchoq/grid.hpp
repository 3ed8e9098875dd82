#pragma once
// Periodic lattice on [-L/2, L/2)^d and real fields sampled on it.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <stdexcept>
#include <vector>

namespace fchoq {

/// Nodes x_j = -L/2 + j L/M on every axis, j = 0..M-1. The node with
/// j = M/2 is the origin.
struct Grid {
  int dims = 3;
  int M = 32;
  double L = 16.0;

  Grid() = default;
  Grid(int d, int m, double l) : dims(d), M(m), L(l) { validate(); }

  void validate() const {
    if (dims < 1) throw std::invalid_argument("Grid: dims must be >= 1");
    if (M < 8 || M % 2 != 0) throw std::invalid_argument("Grid: M must be even and >= 8");
    if (!(L > 0.0)) throw std::invalid_argument("Grid: L must be positive");
  }

  double h() const { return L / M; }
  double cell_volume() const { return std::pow(h(), dims); }
  std::size_t size() const {
    std::size_t n = 1;
    for (int i = 0; i < dims; ++i) n *= static_cast<std::size_t>(M);
    return n;
  }
  std::vector<int> shape() const { return std::vector<int>(static_cast<std::size_t>(dims), M); }
  /// Angular wavenumber spacing 2 pi / L.
  double dxi() const { return 2.0 * 3.14159265358979323846 / L; }

  double coord(int j) const { return -0.5 * L + j * h(); }

  /// Row-major multi-index of a flat index.
  void unflatten(std::size_t flat, std::vector<int>& idx) const {
    idx.resize(static_cast<std::size_t>(dims));
    for (int a = dims - 1; a >= 0; --a) {
      idx[static_cast<std::size_t>(a)] = static_cast<int>(flat % static_cast<std::size_t>(M));
      flat /= static_cast<std::size_t>(M);
    }
  }
  std::size_t flatten(const std::vector<int>& idx) const {
    std::size_t f = 0;
    for (int a = 0; a < dims; ++a) f = f * static_cast<std::size_t>(M) + static_cast<std::size_t>(idx[static_cast<std::size_t>(a)]);
    return f;
  }

  friend bool operator==(const Grid& a, const Grid& b) { return a.dims == b.dims && a.M == b.M && a.L == b.L; }
};

/// Real samples on a Grid, row-major, 64-bit.
struct Field {
  Grid grid;
  std::vector<double> values;

  Field() = default;
  explicit Field(const Grid& g, double fill = 0.0) : grid(g), values(g.size(), fill) {}
  Field(const Grid& g, std::vector<double> v) : grid(g), values(std::move(v)) {
    if (values.size() != g.size()) throw std::invalid_argument("Field: value count does not match grid");
  }

  /// Samples f(x) at every node.
  static Field sample(const Grid& g, const std::function<double(const std::vector<double>&)>& f) {
    Field u(g);
    std::vector<int> idx;
    std::vector<double> x(static_cast<std::size_t>(g.dims));
    for (std::size_t i = 0; i < g.size(); ++i) {
      g.unflatten(i, idx);
      for (int a = 0; a < g.dims; ++a) x[static_cast<std::size_t>(a)] = g.coord(idx[static_cast<std::size_t>(a)]);
      u.values[i] = f(x);
    }
    return u;
  }

  std::size_t size() const { return values.size(); }
  double& operator[](std::size_t i) { return values[i]; }
  double operator[](std::size_t i) const { return values[i]; }

  Field& operator*=(double a) {
    for (auto& v : values) v *= a;
    return *this;
  }
  Field& operator+=(const Field& o) {
    check_same(o);
    for (std::size_t i = 0; i < values.size(); ++i) values[i] += o.values[i];
    return *this;
  }
  Field& operator-=(const Field& o) {
    check_same(o);
    for (std::size_t i = 0; i < values.size(); ++i) values[i] -= o.values[i];
    return *this;
  }
  friend Field operator*(double a, Field u) { return u *= a; }
  friend Field operator+(Field a, const Field& b) { return a += b; }
  friend Field operator-(Field a, const Field& b) { return a -= b; }

  /// Quadrature inner product with weight h^d.
  double dot(const Field& o) const {
    check_same(o);
    double acc = 0.0;
    for (std::size_t i = 0; i < values.size(); ++i) acc += values[i] * o.values[i];
    return acc * grid.cell_volume();
  }
  double l2_norm_sq() const { return dot(*this); }
  double l2_norm() const { return std::sqrt(l2_norm_sq()); }
  double max_abs() const {
    double m = 0.0;
    for (double v : values) m = std::max(m, std::abs(v));
    return m;
  }
  bool all_finite() const {
    for (double v : values)
      if (!std::isfinite(v)) return false;
    return true;
  }

  void check_same(const Field& o) const {
    if (!(grid == o.grid)) throw std::invalid_argument("Field: grid mismatch");
  }
};

} // namespace fchoq
