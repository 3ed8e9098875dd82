#pragma once
// Action functional
//   I(u) = 1/2 (||u||^2 + ||(-Delta)^{s/2}u||^2) - 1/(2p) D(u),
//   D(u) = int (K_alpha * |u|^p) |u|^p,
// its L^2 gradient and the Nehari projection along rays.

#include <cmath>
#include <map>
#include <memory>
#include <stdexcept>
#include <tuple>

#include "grid.hpp"
#include "model_params.hpp"
#include "spectral.hpp"

namespace fchoq {

struct EnergyBreakdown {
  double quad = 0.0;     // 1/2 ||u||_{2,s}^2
  double nonlocal = 0.0; // D(u)
  double total = 0.0;    // quad - nonlocal / (2p)
};

/// Energy together with the Riesz potential K*|u|^p it was computed from,
/// so the gradient at the same point needs no second convolution.
struct Evaluation {
  EnergyBreakdown energy;
  double hs_norm_sq = 0.0;
  Field potential;
};

/// (1/2 - 1/(2p)) hs^{p/(p-1)} / D^{1/(p-1)}: the value of I at the Nehari
/// point of a ray with ||u||_{2,s}^2 = hs and interaction D.
inline double nehari_level(double hs, double d, double p) {
  return (0.5 - 0.5 / p) * std::pow(hs, p / (p - 1.0)) / std::pow(d, 1.0 / (p - 1.0));
}

class ChoquardFunctional {
 public:
  ChoquardFunctional(const ModelParams& params, const Grid& grid)
      : params_(params), grid_(checked(params, grid)), spectral_(std::make_unique<Spectral>(grid)),
        kernel_(std::make_unique<RieszKernel>(grid, params.alpha)) {
    frac_sym_ = spectral_->fractional_symbol(params.s);
    hs_sym_ = spectral_->symbol([s = params.s](double xi) { return 1.0 + (xi == 0.0 ? 0.0 : std::pow(xi, 2.0 * s)); });
    precond_sym_ = hs_sym_;
    for (auto& v : precond_sym_) v = 1.0 / v;
  }

  const ModelParams& params() const { return params_; }
  const Grid& grid() const { return grid_; }
  Spectral& spectral() { return *spectral_; }
  RieszKernel& kernel() { return *kernel_; }

  Field abs_pow(const Field& u) const {
    Field r(u.grid);
    for (std::size_t i = 0; i < u.size(); ++i) r.values[i] = std::pow(std::abs(u.values[i]), params_.p);
    return r;
  }

  /// |u|^{p-2} u, continuous at u = 0.
  Field odd_pow(const Field& u) const {
    Field r(u.grid);
    const double p = params_.p;
    for (std::size_t i = 0; i < u.size(); ++i) {
      const double v = u.values[i];
      r.values[i] = p == 2.0 ? v : (v == 0.0 ? 0.0 : std::pow(std::abs(v), p - 2.0) * v);
    }
    return r;
  }

  double hs_norm_sq(const Field& u) { return spectral_->quadratic_form(spectral_->forward(u), hs_sym_); }

  Field riesz_potential(const Field& u) { return kernel_->convolve(abs_pow(u)); }

  Evaluation evaluate(const Field& u) {
    Evaluation ev;
    ev.hs_norm_sq = hs_norm_sq(u);
    Field up = abs_pow(u);
    ev.potential = kernel_->convolve(up);
    ev.energy.quad = 0.5 * ev.hs_norm_sq;
    ev.energy.nonlocal = ev.potential.dot(up);
    ev.energy.total = ev.energy.quad - ev.energy.nonlocal / (2.0 * params_.p);
    return ev;
  }

  double interaction(const Field& u) {
    Field up = abs_pow(u);
    return kernel_->convolve(up).dot(up);
  }

  EnergyBreakdown energy(const Field& u) { return evaluate(u).energy; }

  /// (-Delta)^s u + u - (K*|u|^p)|u|^{p-2}u given the potential at u.
  Field gradient(const Field& u, const Field& potential) {
    Field g = spectral_->apply(u, frac_sym_);
    Field nl = odd_pow(u);
    for (std::size_t i = 0; i < g.size(); ++i) g.values[i] += u.values[i] - potential.values[i] * nl.values[i];
    return g;
  }
  Field gradient(const Field& u) { return gradient(u, riesz_potential(u)); }

  /// Multiply by (1 + |xi|^{2s})^{-1}.
  Field precondition(const Field& g) { return spectral_->apply(g, precond_sym_); }

  /// t > 0 with <I'(tu), tu> = 0: t = (||u||_{2,s}^2 / D(u))^{1/(2p-2)}.
  double nehari_scale(const Field& u) {
    const double d = interaction(u);
    if (!(d > 0.0)) throw std::domain_error("nehari_scale: interaction vanishes");
    return std::pow(hs_norm_sq(u) / d, 1.0 / (2.0 * params_.p - 2.0));
  }

  /// I(t u) at the Nehari scale t, in closed form.
  double nehari_energy(const Field& u) {
    const double d = interaction(u);
    if (!(d > 0.0)) throw std::domain_error("nehari_energy: interaction vanishes");
    return nehari_level(hs_norm_sq(u), d, params_.p);
  }

 private:
  static const Grid& checked(const ModelParams& params, const Grid& grid) {
    if (grid.dims != params.N) throw std::invalid_argument("ChoquardFunctional: grid dimension differs from N");
    require_admissible(params);
    return grid;
  }

  ModelParams params_;
  Grid grid_;
  std::unique_ptr<Spectral> spectral_;
  std::unique_ptr<RieszKernel> kernel_;
  std::vector<double> frac_sym_, hs_sym_, precond_sym_;
};

namespace detail {
inline ChoquardFunctional& functional_for(const Grid& g, const ModelParams& m) {
  using Key = std::tuple<int, int, double, int, double, double, double, bool>;
  thread_local std::map<Key, std::unique_ptr<ChoquardFunctional>> cache;
  Key key{g.dims, g.M, g.L, m.N, m.s, m.alpha, m.p, m.experimental};
  auto it = cache.find(key);
  if (it == cache.end()) it = cache.emplace(key, std::make_unique<ChoquardFunctional>(m, g)).first;
  return *it->second;
}
} // namespace detail

inline double interaction(const Field& u, const ModelParams& m) { return detail::functional_for(u.grid, m).interaction(u); }
inline EnergyBreakdown energy(const Field& u, const ModelParams& m) { return detail::functional_for(u.grid, m).energy(u); }
inline Field gradient(const Field& u, const ModelParams& m) { return detail::functional_for(u.grid, m).gradient(u); }
inline double nehari_scale(const Field& u, const ModelParams& m) { return detail::functional_for(u.grid, m).nehari_scale(u); }
inline double nehari_energy(const Field& u, const ModelParams& m) { return detail::functional_for(u.grid, m).nehari_energy(u); }

} // namespace fchoq
