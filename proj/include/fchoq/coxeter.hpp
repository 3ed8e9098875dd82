#pragma once
// Finite reflection groups realised by signed-permutation matrices acting on
// the first k coordinates. Only these map the sampling lattice onto itself.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <deque>
#include <map>
#include <numeric>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace fchoq {

/// k x k integer matrix with one nonzero entry (+-1) per row and column.
class GroupElement {
 public:
  GroupElement() = default;

  explicit GroupElement(int dim) : dim_(dim), m_(static_cast<std::size_t>(dim * dim), 0) {
    for (int i = 0; i < dim; ++i) at(i, i) = 1;
  }

  /// Row-major entries; throws unless the matrix is a signed permutation.
  GroupElement(int dim, std::vector<int> entries) : dim_(dim), m_(std::move(entries)) {
    if (static_cast<int>(m_.size()) != dim * dim)
      throw std::invalid_argument("GroupElement: entry count does not match dimension");
    for (int i = 0; i < dim; ++i) {
      int row_nnz = 0, col_nnz = 0;
      for (int j = 0; j < dim; ++j) {
        const int a = at(i, j), b = at(j, i);
        if (a < -1 || a > 1) throw std::invalid_argument("GroupElement: entries must be in {-1,0,1}");
        row_nnz += a != 0;
        col_nnz += b != 0;
      }
      if (row_nnz != 1 || col_nnz != 1)
        throw std::invalid_argument("GroupElement: not a signed permutation matrix");
    }
  }

  static GroupElement identity(int dim) { return GroupElement(dim); }

  /// Reflection x_i -> -x_i (0-based index).
  static GroupElement flip(int dim, int i) {
    GroupElement g(dim);
    g.at(i, i) = -1;
    return g;
  }

  /// Reflection exchanging x_i and x_j (0-based indices).
  static GroupElement swap(int dim, int i, int j) {
    GroupElement g(dim);
    g.at(i, i) = 0;
    g.at(j, j) = 0;
    g.at(i, j) = 1;
    g.at(j, i) = 1;
    return g;
  }

  int dim() const { return dim_; }
  int at(int i, int j) const { return m_[static_cast<std::size_t>(i * dim_ + j)]; }
  int& at(int i, int j) { return m_[static_cast<std::size_t>(i * dim_ + j)]; }
  const std::vector<int>& entries() const { return m_; }

  /// Column index of the nonzero entry in row i and its sign.
  int source(int i) const {
    for (int j = 0; j < dim_; ++j)
      if (at(i, j) != 0) return j;
    return -1;
  }
  int sign(int i) const { return at(i, source(i)); }

  GroupElement operator*(const GroupElement& o) const {
    if (o.dim_ != dim_) throw std::invalid_argument("GroupElement: dimension mismatch");
    GroupElement r(dim_);
    for (int i = 0; i < dim_; ++i)
      for (int j = 0; j < dim_; ++j) {
        int acc = 0;
        for (int l = 0; l < dim_; ++l) acc += at(i, l) * o.at(l, j);
        r.at(i, j) = acc;
      }
    return r;
  }

  GroupElement transpose() const {
    GroupElement r(dim_);
    for (int i = 0; i < dim_; ++i)
      for (int j = 0; j < dim_; ++j) r.at(i, j) = at(j, i);
    return r;
  }
  // orthogonal
  GroupElement inverse() const { return transpose(); }

  /// Determinant: parity of the underlying permutation times the product of signs.
  int determinant() const {
    std::vector<int> perm(static_cast<std::size_t>(dim_));
    int sgn = 1;
    for (int i = 0; i < dim_; ++i) {
      perm[static_cast<std::size_t>(i)] = source(i);
      sgn *= sign(i);
    }
    std::vector<bool> seen(perm.size(), false);
    for (std::size_t i = 0; i < perm.size(); ++i) {
      if (seen[i]) continue;
      std::size_t len = 0;
      for (std::size_t j = i; !seen[j]; j = static_cast<std::size_t>(perm[j])) {
        seen[j] = true;
        ++len;
      }
      if (len % 2 == 0) sgn = -sgn;
    }
    return sgn;
  }

  bool is_identity() const { return *this == identity(dim_); }

  /// Symmetric involution with exactly one eigenvalue -1 (trace k - 2).
  bool is_reflection() const {
    if (!(*this == transpose())) return false;
    if (!((*this) * (*this)).is_identity()) return false;
    int tr = 0;
    for (int i = 0; i < dim_; ++i) tr += at(i, i);
    return tr == dim_ - 2;
  }

  /// Unit-free normal of the reflecting hyperplane (eigenvector for -1).
  std::vector<double> reflection_normal() const {
    std::vector<double> n(static_cast<std::size_t>(dim_), 0.0);
    for (int i = 0; i < dim_; ++i) {
      const int j = source(i);
      if (j == i && at(i, i) == -1) {
        n[static_cast<std::size_t>(i)] = 1.0;
        return n;
      }
    }
    for (int i = 0; i < dim_; ++i) {
      const int j = source(i);
      if (j > i) {
        // x_i <-> sign * x_j : normal e_i - sign * e_j
        n[static_cast<std::size_t>(i)] = 1.0;
        n[static_cast<std::size_t>(j)] = -static_cast<double>(at(i, j));
        return n;
      }
    }
    throw std::logic_error("reflection_normal: element is not a reflection");
  }

  template <class T>
  std::vector<T> apply(std::span<const T> x) const {
    std::vector<T> y(static_cast<std::size_t>(dim_));
    for (int i = 0; i < dim_; ++i) {
      const int j = source(i);
      y[static_cast<std::size_t>(i)] = static_cast<T>(at(i, j)) * x[static_cast<std::size_t>(j)];
    }
    return y;
  }
  std::vector<double> apply(const std::vector<double>& x) const { return apply<double>(std::span<const double>(x)); }
  std::vector<long> apply(const std::vector<long>& x) const { return apply<long>(std::span<const long>(x)); }

  friend bool operator==(const GroupElement& a, const GroupElement& b) { return a.dim_ == b.dim_ && a.m_ == b.m_; }
  friend bool operator<(const GroupElement& a, const GroupElement& b) {
    return a.dim_ != b.dim_ ? a.dim_ < b.dim_ : a.m_ < b.m_;
  }

 private:
  int dim_ = 0;
  std::vector<int> m_;
};

/// Closed cone {x : <x, n_i> >= 0}, one normal per generator wall.
struct Chamber {
  std::vector<std::vector<double>> half_space_normals;
};

class CoxeterGroup {
 public:
  CoxeterGroup() = default;

  /// Dimension of the acted-on coordinate block.
  int dim() const { return dim_; }
  /// Number of generators.
  int rank() const { return static_cast<int>(generators_.size()); }
  std::size_t order() const { return elements_.size(); }
  const std::string& name() const { return name_; }
  void set_name(std::string n) { name_ = std::move(n); }
  const std::vector<GroupElement>& generators() const { return generators_; }
  const std::vector<GroupElement>& elements() const { return elements_; }
  const std::vector<int>& signs() const { return signs_; }
  bool trivial() const { return elements_.size() <= 1; }

  std::optional<std::size_t> index_of(const GroupElement& g) const {
    auto it = std::lower_bound(sorted_.begin(), sorted_.end(), g,
                               [&](std::size_t i, const GroupElement& v) { return elements_[i] < v; });
    if (it != sorted_.end() && elements_[*it] == g) return *it;
    return std::nullopt;
  }
  bool contains(const GroupElement& g) const { return index_of(g).has_value(); }

  /// Canonical key of the element set (independent of generator choice).
  std::vector<std::vector<int>> element_key() const {
    std::vector<std::vector<int>> key;
    for (auto i : sorted_) key.push_back(elements_[i].entries());
    return key;
  }

  /// Chamber bounded by the generator walls. Normals are oriented so that they
  /// pairwise make non-acute angles; throws if the generators are not a
  /// simple system.
  const Chamber& chamber() const {
    if (!chamber_) throw std::logic_error("CoxeterGroup: generators do not bound a chamber");
    return *chamber_;
  }
  bool has_chamber() const { return chamber_.has_value(); }
  void set_chamber(Chamber c) { chamber_ = std::move(c); }

  friend CoxeterGroup generate_group(const std::vector<GroupElement>& generators, int dim);
  friend CoxeterGroup subgroup_from_elements(const CoxeterGroup& parent, std::vector<GroupElement> elems);

 private:
  void finalize();

  int dim_ = 0;
  std::string name_;
  std::vector<GroupElement> generators_;
  std::vector<GroupElement> elements_;
  std::vector<int> signs_;
  std::vector<std::size_t> sorted_;
  std::optional<Chamber> chamber_;
};

namespace detail {

inline double dot(std::span<const double> a, std::span<const double> b) {
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) acc += a[i] * b[i];
  return acc;
}

// Orient reflection normals into a simple system: pairwise <n_i, n_j> <= 0
// and linearly independent. Returns nullopt when no orientation works.
inline std::optional<Chamber> orient_walls(const std::vector<GroupElement>& gens, int dim) {
  const std::size_t r = gens.size();
  if (r == 0) return Chamber{};
  if (r > 20) return std::nullopt;
  std::vector<std::vector<double>> base;
  for (const auto& g : gens) base.push_back(g.reflection_normal());

  // Linear independence via Gram-Schmidt.
  {
    std::vector<std::vector<double>> q;
    for (auto v : base) {
      for (const auto& e : q) {
        const double c = dot(v, e);
        for (int i = 0; i < dim; ++i) v[static_cast<std::size_t>(i)] -= c * e[static_cast<std::size_t>(i)];
      }
      const double nrm = std::sqrt(dot(v, v));
      if (nrm < 1e-9) return std::nullopt;
      for (auto& x : v) x /= nrm;
      q.push_back(std::move(v));
    }
  }

  for (std::uint32_t mask = 0; mask < (1u << r); ++mask) {
    auto n = base;
    for (std::size_t i = 0; i < r; ++i)
      if (mask & (1u << i))
        for (auto& x : n[i]) x = -x;
    bool ok = true;
    for (std::size_t i = 0; i < r && ok; ++i)
      for (std::size_t j = i + 1; j < r && ok; ++j) ok = dot(n[i], n[j]) <= 1e-12;
    if (ok) return Chamber{std::move(n)};
  }
  return std::nullopt;
}

} // namespace detail

inline void CoxeterGroup::finalize() {
  signs_.clear();
  for (const auto& g : elements_) signs_.push_back(g.determinant());
  sorted_.resize(elements_.size());
  std::iota(sorted_.begin(), sorted_.end(), std::size_t{0});
  std::sort(sorted_.begin(), sorted_.end(),
            [&](std::size_t a, std::size_t b) { return elements_[a] < elements_[b]; });
}

/// Breadth-first closure of the generators under multiplication. The sign
/// character is det(g), which sends every generator to -1.
inline CoxeterGroup generate_group(const std::vector<GroupElement>& generators, int dim) {
  for (const auto& g : generators) {
    if (g.dim() != dim) throw std::invalid_argument("generate_group: generator dimension mismatch");
    if (!g.is_reflection()) throw std::invalid_argument("generate_group: generator is not a reflection");
  }
  CoxeterGroup G;
  G.dim_ = dim;
  G.generators_ = generators;
  std::map<GroupElement, bool> seen;
  std::deque<GroupElement> queue{GroupElement::identity(dim)};
  seen[queue.front()] = true;
  while (!queue.empty()) {
    GroupElement g = queue.front();
    queue.pop_front();
    G.elements_.push_back(g);
    for (const auto& r : generators) {
      GroupElement h = g * r;
      if (!seen.count(h)) {
        seen[h] = true;
        queue.push_back(std::move(h));
      }
    }
  }
  G.finalize();
  G.chamber_ = detail::orient_walls(generators, dim);
  return G;
}

inline CoxeterGroup trivial_group(int dim) {
  auto G = generate_group({}, dim);
  G.set_name("trivial");
  return G;
}

/// Subgroup given by an explicit element list (must be closed). Generators are
/// the reflections it contains.
inline CoxeterGroup subgroup_from_elements(const CoxeterGroup& parent, std::vector<GroupElement> elems) {
  CoxeterGroup H;
  H.dim_ = parent.dim();
  H.elements_ = std::move(elems);
  for (const auto& g : H.elements_)
    if (g.is_reflection()) H.generators_.push_back(g);
  H.finalize();
  H.chamber_ = detail::orient_walls(H.generators_, H.dim_);
  return H;
}

/// Named groups: "trivial", "A1", "A1xA1", "A2", "B2", "B3". Generators are
/// listed in the order of the chamber walls e1; e1,e2; e1-e2,e2-e3;
/// e1-e2,e2; e1-e2,e2-e3,e3.
inline CoxeterGroup named_group(const std::string& name) {
  using E = GroupElement;
  CoxeterGroup G;
  if (name == "trivial") return trivial_group(0);
  if (name == "A1") G = generate_group({E::flip(1, 0)}, 1);
  else if (name == "A1xA1") G = generate_group({E::flip(2, 0), E::flip(2, 1)}, 2);
  else if (name == "A2") G = generate_group({E::swap(3, 0, 1), E::swap(3, 1, 2)}, 3);
  else if (name == "B2") G = generate_group({E::swap(2, 0, 1), E::flip(2, 1)}, 2);
  else if (name == "B3") G = generate_group({E::swap(3, 0, 1), E::swap(3, 1, 2), E::flip(3, 2)}, 3);
  else throw std::invalid_argument("unknown group name: " + name);
  G.set_name(name);
  return G;
}

/// phi(g) = det(g); throws if g is not in G.
inline int sign_character(const CoxeterGroup& G, const GroupElement& g) {
  auto idx = G.index_of(g);
  if (!idx) throw std::invalid_argument("sign_character: element not in group");
  return G.signs()[*idx];
}

inline std::vector<std::vector<double>> orbit(const CoxeterGroup& G, const std::vector<double>& x,
                                              double tol = 1e-12) {
  std::vector<std::vector<double>> out;
  for (const auto& g : G.elements()) {
    auto y = g.apply(x);
    bool dup = std::any_of(out.begin(), out.end(), [&](const auto& z) {
      for (std::size_t i = 0; i < z.size(); ++i)
        if (std::abs(z[i] - y[i]) > tol) return false;
      return true;
    });
    if (!dup) out.push_back(std::move(y));
  }
  return out;
}

/// Lattice-point orbit, exact comparison.
inline std::vector<std::vector<long>> orbit(const CoxeterGroup& G, const std::vector<long>& x) {
  std::vector<std::vector<long>> out;
  for (const auto& g : G.elements()) out.push_back(g.apply(x));
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

inline CoxeterGroup stabilizer(const CoxeterGroup& G, const std::vector<double>& x, double tol = 1e-12) {
  std::vector<GroupElement> elems;
  for (const auto& g : G.elements()) {
    auto y = g.apply(x);
    bool fixed = true;
    for (std::size_t i = 0; i < y.size(); ++i) fixed = fixed && std::abs(y[i] - x[i]) <= tol;
    if (fixed) elems.push_back(g);
  }
  return subgroup_from_elements(G, std::move(elems));
}

inline CoxeterGroup stabilizer(const CoxeterGroup& G, const std::vector<long>& x) {
  std::vector<GroupElement> elems;
  for (const auto& g : G.elements())
    if (g.apply(x) == x) elems.push_back(g);
  return subgroup_from_elements(G, std::move(elems));
}

inline bool in_fundamental_domain(const Chamber& C, const std::vector<double>& x, double tol = 0.0) {
  for (const auto& n : C.half_space_normals)
    if (detail::dot(n, x) < -tol) return false;
  return true;
}

/// Indices of walls through x (|<x, n_i>| <= tol * |n_i|).
inline std::vector<int> active_walls(const Chamber& C, const std::vector<double>& x, double tol = 1e-12) {
  std::vector<int> act;
  for (std::size_t i = 0; i < C.half_space_normals.size(); ++i) {
    const auto& n = C.half_space_normals[i];
    if (std::abs(detail::dot(n, x)) <= tol * std::sqrt(detail::dot(n, n))) act.push_back(static_cast<int>(i));
  }
  return act;
}

/// k minus the number of walls through x; x must lie in the chamber.
inline int facet_dimension(const Chamber& C, const std::vector<double>& x, double tol = 1e-12) {
  if (!in_fundamental_domain(C, x, tol)) throw std::invalid_argument("facet_dimension: point outside the chamber");
  return static_cast<int>(x.size()) - static_cast<int>(active_walls(C, x, tol).size());
}

/// Subgroup generated by the walls through x. For x in the chamber this is
/// the full stabilizer of x, and its chamber contains the parent chamber.
inline CoxeterGroup parabolic_subgroup(const CoxeterGroup& G, const std::vector<double>& x, double tol = 1e-12) {
  const auto& C = G.chamber();
  if (!in_fundamental_domain(C, x, tol)) throw std::invalid_argument("parabolic_subgroup: point outside the chamber");
  std::vector<GroupElement> gens;
  for (int i : active_walls(C, x, tol)) gens.push_back(G.generators()[static_cast<std::size_t>(i)]);
  auto H = generate_group(gens, G.dim());
  // keep the parent's orientation of the retained walls
  Chamber sub;
  for (int i : active_walls(C, x, tol)) sub.half_space_normals.push_back(C.half_space_normals[static_cast<std::size_t>(i)]);
  H.set_chamber(std::move(sub));
  return H;
}

/// Unit direction of the chamber edge opposite wall i: orthogonal to every
/// other wall, on the positive side of wall i, within the span of the normals.
inline std::vector<double> chamber_ray(const Chamber& C, std::size_t i) {
  const auto& normals = C.half_space_normals;
  if (i >= normals.size()) throw std::out_of_range("chamber_ray: wall index");
  std::vector<std::vector<double>> basis;
  for (std::size_t j = 0; j < normals.size(); ++j) {
    if (j == i) continue;
    auto v = normals[j];
    for (const auto& e : basis) {
      const double c = detail::dot(v, e);
      for (std::size_t l = 0; l < v.size(); ++l) v[l] -= c * e[l];
    }
    const double nv = std::sqrt(detail::dot(v, v));
    for (auto& a : v) a /= nv;
    basis.push_back(std::move(v));
  }
  auto q = normals[i];
  for (const auto& e : basis) {
    const double c = detail::dot(q, e);
    for (std::size_t l = 0; l < q.size(); ++l) q[l] -= c * e[l];
  }
  const double nq = std::sqrt(detail::dot(q, q));
  for (auto& a : q) a /= nq;
  return q;
}

/// Smallest integer vector on the ray through the unit direction q (entries
/// of q are rational with small denominators for signed-permutation groups).
inline std::vector<long> integer_direction(const std::vector<double>& q) {
  double mx = 0.0;
  for (double a : q) mx = std::max(mx, std::abs(a));
  for (long c = 1; c <= 64; ++c) {
    std::vector<long> v;
    bool ok = true;
    for (double a : q) {
      const double t = a / mx * static_cast<double>(c);
      const double r = std::round(t);
      ok = ok && std::abs(t - r) < 1e-9;
      v.push_back(static_cast<long>(r));
    }
    if (ok) return v;
  }
  throw std::runtime_error("integer_direction: ray is not rational");
}

} // namespace fchoq
