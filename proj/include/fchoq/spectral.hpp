#pragma once
// Fourier-multiplier operators on the periodic lattice and the truncated
// Riesz convolution on the zero-padded lattice.
//
// Frequencies are angular, xi = 2 pi m / L with m in {-M/2, ..., M/2-1}, so
// (-Delta)^s has symbol |xi|^{2s}. Discrete Parseval carries the quadrature
// weight h^d: sum_x |u|^2 h^d = h^d / M^d sum_k |u_hat_k|^2.

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <cmath>
#include <complex>
#include <functional>
#include <map>
#include <memory>
#include <numbers>
#include <stdexcept>
#include <tuple>
#include <vector>

#include "fft.hpp"
#include "grid.hpp"
#include "model_params.hpp"

namespace fchoq {

using Spectrum = std::vector<std::complex<double>>;

/// Transforms and multiplier tables for one Grid.
class Spectral {
 public:
  explicit Spectral(const Grid& g) : grid_(g), fft_(g.shape()) {
    g.validate();
    const std::size_t nc = fft_.complex_size();
    xi_abs_.resize(nc);
    weight_.resize(nc);
    const int M = g.M, half = M / 2 + 1, d = g.dims;
    const double dxi = g.dxi();
    std::vector<int> idx(static_cast<std::size_t>(d), 0);
    for (std::size_t k = 0; k < nc; ++k) {
      std::size_t r = k;
      idx[static_cast<std::size_t>(d - 1)] = static_cast<int>(r % static_cast<std::size_t>(half));
      r /= static_cast<std::size_t>(half);
      for (int a = d - 2; a >= 0; --a) {
        idx[static_cast<std::size_t>(a)] = static_cast<int>(r % static_cast<std::size_t>(M));
        r /= static_cast<std::size_t>(M);
      }
      double q = 0.0;
      for (int a = 0; a < d; ++a) {
        int m = idx[static_cast<std::size_t>(a)];
        if (a < d - 1 && m >= M / 2) m -= M;
        q += static_cast<double>(m) * m;
      }
      xi_abs_[k] = dxi * std::sqrt(q);
      const int last = idx[static_cast<std::size_t>(d - 1)];
      weight_[k] = (last == 0 || last == M / 2) ? 1.0 : 2.0;
    }
  }

  const Grid& grid() const { return grid_; }
  /// |xi| on the half-spectrum layout.
  const std::vector<double>& xi_abs() const { return xi_abs_; }
  /// Parseval multiplicity of each half-spectrum entry (1 or 2).
  const std::vector<double>& parseval_weight() const { return weight_; }

  Spectrum forward(const Field& u) {
    if (!(u.grid == grid_)) throw std::invalid_argument("Spectral: grid mismatch");
    Spectrum out;
    fft_.forward(u.values, out);
    return out;
  }

  /// Normalised inverse: backward(forward(u)) == u.
  Field backward(const Spectrum& c) {
    Field u(grid_);
    fft_.backward(c, u.values);
    const double inv = 1.0 / static_cast<double>(grid_.size());
    for (auto& v : u.values) v *= inv;
    return u;
  }

  /// Symbol sampled on the half-spectrum.
  std::vector<double> symbol(const std::function<double(double)>& m) const {
    std::vector<double> out(xi_abs_.size());
    for (std::size_t k = 0; k < out.size(); ++k) out[k] = m(xi_abs_[k]);
    return out;
  }

  Field apply(const Field& u, const std::vector<double>& sym) {
    Spectrum c = forward(u);
    for (std::size_t k = 0; k < c.size(); ++k) c[k] *= sym[k];
    return backward(c);
  }

  /// |xi|^{2s}, with the zero mode mapped to zero.
  std::vector<double> fractional_symbol(double s) const {
    return symbol([s](double xi) { return xi == 0.0 ? 0.0 : std::pow(xi, 2.0 * s); });
  }

  Field fractional_laplacian(const Field& u, double s) {
    if (!(s > 0.0 && s <= 1.0)) throw std::domain_error("fractional_laplacian: s must lie in (0, 1]");
    return apply(u, fractional_symbol(s));
  }

  /// h^d / M^d sum_k m_k |u_hat_k|^2.
  double quadratic_form(const Spectrum& c, const std::vector<double>& sym) const {
    double acc = 0.0;
    for (std::size_t k = 0; k < c.size(); ++k) acc += weight_[k] * sym[k] * std::norm(c[k]);
    return acc * grid_.cell_volume() / static_cast<double>(grid_.size());
  }

  /// ||(-Delta)^{s/2} u||^2.
  double seminorm_sq(const Field& u, double s) {
    return quadratic_form(forward(u), fractional_symbol(s));
  }

  /// ||u||^2 + ||(-Delta)^{s/2} u||^2.
  double hs_norm_sq(const Field& u, double s) {
    return quadratic_form(forward(u), symbol([s](double xi) { return 1.0 + (xi == 0.0 ? 0.0 : std::pow(xi, 2.0 * s)); }));
  }

 private:
  Grid grid_;
  RealFft fft_;
  std::vector<double> xi_abs_;
  std::vector<double> weight_;
};

namespace detail {

// Per-thread cache so the free functions below do not rebuild plans.
inline Spectral& spectral_for(const Grid& g) {
  thread_local std::map<std::tuple<int, int, double>, std::unique_ptr<Spectral>> cache;
  auto key = std::make_tuple(g.dims, g.M, g.L);
  auto it = cache.find(key);
  if (it == cache.end()) it = cache.emplace(key, std::make_unique<Spectral>(g)).first;
  return *it->second;
}

// Integral of (1 + |t|^2)^{e} over [0,1]^{n}, nested adaptive Gauss-Kronrod.
inline double unit_cube_power_integral(int n, double e, double tol) {
  using boost::math::quadrature::gauss_kronrod;
  std::function<double(int, double)> level = [&](int remaining, double acc_sq) -> double {
    if (remaining == 0) return std::pow(1.0 + acc_sq, e);
    auto f = [&](double t) { return level(remaining - 1, acc_sq + t * t); };
    return gauss_kronrod<double, 21>::integrate(f, 0.0, 1.0, 15, tol);
  };
  return level(n, 0.0);
}

} // namespace detail

inline Field fractional_laplacian(const Field& u, double s) {
  return detail::spectral_for(u.grid).fractional_laplacian(u, s);
}

inline double hs_norm_sq(const Field& u, double s) { return detail::spectral_for(u.grid).hs_norm_sq(u, s); }

inline double seminorm_sq(const Field& u, double s) { return detail::spectral_for(u.grid).seminorm_sq(u, s); }

/// Mean of |x|^{alpha-N} over the cube [-1/2, 1/2]^N. The singular corner is
/// removed by writing each of the N pyramids {x_k = max} in coordinates
/// x = r (1, t), which leaves a smooth integrand on [0,1]^{N-1}.
inline double unit_cell_riesz_mean(int N, double alpha, double tol = 1e-10) {
  const double radial = std::pow(0.5, alpha) / alpha;
  const double angular = N == 1 ? 1.0 : detail::unit_cube_power_integral(N - 1, 0.5 * (alpha - N), tol);
  return std::pow(2.0, N) * N * radial * angular;
}

/// K_alpha sampled at lattice offsets d h, d in [-M, M)^N, with the origin
/// replaced by the cell average of K_alpha; transformed once on the doubled
/// lattice for linear convolution.
class RieszKernel {
 public:
  RieszKernel(const Grid& g, double alpha)
      : grid_(g), alpha_(alpha), padded_(std::vector<int>(static_cast<std::size_t>(g.dims), 2 * g.M)) {
    const int N = g.dims;
    A_ = riesz_constant(N, alpha);
    const double h = g.h();
    origin_value_ = A_ * std::pow(h, alpha - N) * unit_cell_riesz_mean(N, alpha);
    const int P = 2 * g.M;
    std::vector<double> k(padded_.real_size());
    for (std::size_t f = 0; f < k.size(); ++f) {
      std::size_t r = f;
      long q = 0;
      for (int a = N - 1; a >= 0; --a) {
        int j = static_cast<int>(r % static_cast<std::size_t>(P));
        r /= static_cast<std::size_t>(P);
        const long off = j < g.M ? j : j - P; // circular layout
        q += off * off;
      }
      k[f] = offset_value(q);
    }
    padded_.forward(k, kernel_hat_);
  }

  const Grid& grid() const { return grid_; }
  double alpha() const { return alpha_; }
  double A_alpha() const { return A_; }
  double origin_value() const { return origin_value_; }

  /// Kernel value at the lattice offset with squared integer length q.
  double offset_value(long q) const {
    if (q == 0) return origin_value_;
    const double r = grid_.h() * std::sqrt(static_cast<double>(q));
    return A_ * std::pow(r, alpha_ - grid_.dims);
  }

  /// Kernel samples as a Field on the doubled grid covering [-L, L)^N; node
  /// j corresponds to offset j - M.
  Field as_field() const {
    Grid dg(grid_.dims, 2 * grid_.M, 2.0 * grid_.L);
    Field k(dg);
    std::vector<int> idx;
    for (std::size_t f = 0; f < k.size(); ++f) {
      dg.unflatten(f, idx);
      long q = 0;
      for (int j : idx) q += static_cast<long>(j - grid_.M) * (j - grid_.M);
      k.values[f] = offset_value(q);
    }
    return k;
  }

  /// (K * f)(x_i) = h^N sum_j K(x_i - x_j) f(x_j), no wrap-around.
  Field convolve(const Field& f) {
    if (!(f.grid == grid_)) throw std::invalid_argument("riesz_convolve: shape mismatch");
    const int N = grid_.dims, M = grid_.M, P = 2 * M;
    std::vector<double> buf(padded_.real_size(), 0.0);
    std::vector<int> idx;
    for (std::size_t i = 0; i < f.size(); ++i) {
      grid_.unflatten(i, idx);
      std::size_t pf = 0;
      for (int a = 0; a < N; ++a) pf = pf * static_cast<std::size_t>(P) + static_cast<std::size_t>(idx[static_cast<std::size_t>(a)]);
      buf[pf] = f.values[i];
    }
    Spectrum c;
    padded_.forward(buf, c);
    for (std::size_t k = 0; k < c.size(); ++k) c[k] *= kernel_hat_[k];
    padded_.backward(c, buf);
    const double scale = grid_.cell_volume() / static_cast<double>(padded_.real_size());
    Field out(grid_);
    for (std::size_t i = 0; i < out.size(); ++i) {
      grid_.unflatten(i, idx);
      std::size_t pf = 0;
      for (int a = 0; a < N; ++a) pf = pf * static_cast<std::size_t>(P) + static_cast<std::size_t>(idx[static_cast<std::size_t>(a)]);
      out.values[i] = buf[pf] * scale;
    }
    return out;
  }

 private:
  Grid grid_;
  double alpha_;
  double A_ = 0.0;
  double origin_value_ = 0.0;
  RealFft padded_;
  Spectrum kernel_hat_;
};

inline Field build_riesz_kernel(const Grid& g, double alpha) { return RieszKernel(g, alpha).as_field(); }

inline Field riesz_convolve(const Field& f, double alpha) { return RieszKernel(f.grid, alpha).convolve(f); }

/// Gagliardo seminorm in the C_{N,s} = 2 normalisation,
///   (C(N,s)/2) sum_{x != y} |u(x)-u(y)|^2 / |x-y|^{N+2s} h^{2N},
/// by direct double sum. Pairs interact through every periodic image
/// (lattice sum over |n| <= R plus a continuum tail), so that the value is
/// comparable with the spectral seminorm of the periodic field.
inline double gagliardo_norm_sq(const Field& u, double s) {
  const Grid& g = u.grid;
  if (g.size() > 4096) throw std::invalid_argument("gagliardo_norm_sq: grid too large for the direct double sum");
  if (!(s > 0.0 && s < 1.0)) throw std::domain_error("gagliardo_norm_sq: s must lie in (0, 1)");
  const int d = g.dims, M = g.M;
  const double h = g.h(), L = g.L, expo = 0.5 * (d + 2.0 * s);
  const int R = d == 1 ? 400 : d == 2 ? 16 : d == 3 ? 4 : 2;

  // Periodised kernel on offsets [0, M)^d.
  std::vector<double> kp(g.size(), 0.0);
  std::vector<int> off, img(static_cast<std::size_t>(d));
  const std::size_t nimg = static_cast<std::size_t>(std::pow(2 * R + 1, d));
  for (std::size_t f = 0; f < kp.size(); ++f) {
    g.unflatten(f, off);
    double acc = 0.0;
    for (std::size_t n = 0; n < nimg; ++n) {
      std::size_t r = n;
      double q = 0.0;
      for (int a = 0; a < d; ++a) {
        const int ia = static_cast<int>(r % static_cast<std::size_t>(2 * R + 1)) - R;
        r /= static_cast<std::size_t>(2 * R + 1);
        const double z = (off[static_cast<std::size_t>(a)] + ia * M) * h;
        q += z * z;
      }
      if (q > 0.0) acc += std::pow(q, -expo);
    }
    kp[f] = acc;
  }
  // images outside the summed block, replaced by a ball of equal volume
  const double block = std::pow((2 * R + 1) * L, d);
  const double sphere = 2.0 * std::pow(std::numbers::pi, 0.5 * d) / std::tgamma(0.5 * d);
  const double r_eff = std::pow(block * d / sphere, 1.0 / d);
  const double tail = sphere * std::pow(r_eff, -2.0 * s) / (2.0 * s) / std::pow(L, d);
  for (auto& v : kp) v += tail;

  std::vector<int> ix, iy, diff(static_cast<std::size_t>(d));
  double total = 0.0;
  for (std::size_t x = 0; x < g.size(); ++x) {
    g.unflatten(x, ix);
    for (std::size_t y = 0; y < g.size(); ++y) {
      if (x == y) continue;
      g.unflatten(y, iy);
      for (int a = 0; a < d; ++a) diff[static_cast<std::size_t>(a)] = ((iy[static_cast<std::size_t>(a)] - ix[static_cast<std::size_t>(a)]) % M + M) % M;
      const double du = u.values[x] - u.values[y];
      total += du * du * kp[g.flatten(diff)];
    }
  }
  const double C = singular_integral_constant(d, s);
  return 0.5 * C * total * std::pow(h, 2 * d);
}

} // namespace fchoq
