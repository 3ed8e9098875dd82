#pragma once
// s-harmonic extension to the half space {y > 0}:
//   F(U)(xi, y) = F(u)(xi) psi(|xi| y),
// the weighted Dirichlet energy int y^{1-2s} |grad U|^2 and the trace and
// energy identities it satisfies.

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "coxeter.hpp"
#include "grid.hpp"
#include "model_params.hpp"
#include "spectral.hpp"
#include "symmetry.hpp"

namespace fchoq {

/// psi(y) = 2^{1-s} / Gamma(s) y^s K_s(y), the decaying solution of
/// psi'' + (1-2s)/y psi' = psi with psi(0) = 1.
inline double psi_profile(double s, double y) {
  if (!(s > 0.0 && s < 1.0)) throw std::domain_error("psi_profile: s must lie in (0, 1)");
  if (!(y >= 0.0)) throw std::domain_error("psi_profile: y must be nonnegative");
  if (y == 0.0) return 1.0;
  if (y > 700.0) return 0.0;
  return std::pow(2.0, 1.0 - s) / std::tgamma(s) * std::pow(y, s) * std::cyl_bessel_k(s, y);
}

/// y_j = Ymax (j/J)^gamma, j = 1..J.
struct YGrid {
  int J = 256;
  double gamma = 2.0;
  double Ymax = 1.0;
  std::vector<double> nodes;

  YGrid() = default;
  YGrid(int J_, double Ymax_, double gamma_ = 2.0) : J(J_), gamma(gamma_), Ymax(Ymax_) {
    if (J < 64) throw std::invalid_argument("YGrid: J must be >= 64");
    if (!(Ymax > 0.0) || !(gamma >= 1.0)) throw std::invalid_argument("YGrid: need Ymax > 0 and gamma >= 1");
    nodes.resize(static_cast<std::size_t>(J));
    for (int j = 1; j <= J; ++j) nodes[static_cast<std::size_t>(j - 1)] = Ymax * std::pow(static_cast<double>(j) / J, gamma);
  }
};

/// Ymax = 40 / |xi_min| so that psi(|xi| Ymax) is negligible for every
/// nonzero lattice frequency.
inline YGrid default_ygrid(const Grid& g, int J = 256) { return YGrid(J, 40.0 / g.dxi()); }

/// Slices U(., y) at y = 0 (the trace) and at every node of the y-grid.
struct ExtensionField {
  Grid grid;
  YGrid ygrid;
  std::vector<Field> slices; // J + 1 entries, slices[0] at y = 0

  ExtensionField() = default;
  ExtensionField(const Grid& g, const YGrid& yg) : grid(g), ygrid(yg), slices(static_cast<std::size_t>(yg.J) + 1, Field(g)) {}

  const Field& trace() const { return slices.front(); }
  double y(std::size_t j) const { return j == 0 ? 0.0 : ygrid.nodes[j - 1]; }
};

inline ExtensionField harmonic_extend(const Field& u, double s, const YGrid& yg) {
  if (!(s > 0.0 && s < 1.0)) throw std::domain_error("harmonic_extend: s must lie in (0, 1)");
  Spectral& sp = detail::spectral_for(u.grid);
  const Spectrum uh = sp.forward(u);
  const auto& xi = sp.xi_abs();
  ExtensionField U(u.grid, yg);
  U.slices[0] = u;
  Spectrum c(uh.size());
  for (std::size_t j = 1; j < U.slices.size(); ++j) {
    const double y = U.y(j);
    for (std::size_t k = 0; k < c.size(); ++k) c[k] = uh[k] * psi_profile(s, xi[k] * y);
    U.slices[j] = sp.backward(c);
  }
  return U;
}

/// int y^{1-2s} |grad U|^2 dx dy over the slab 0 < y < Ymax.
///
/// The x part uses the spectral |grad_x U(., y_j)|^2 on each slice and a
/// trapezoid in y with the weight y^{1-2s} integrated exactly per cell.
/// The y part interpolates U linearly in z = y^{2s}, which turns the cell
/// integral into 2s (U_{j+1} - U_j)^2 / (z_{j+1} - z_j) and is exact for
/// the leading behaviour a + b y^{2s} near the boundary.
inline double extension_energy(const ExtensionField& U, double s) {
  if (!(s > 0.0 && s < 1.0)) throw std::domain_error("extension_energy: s must lie in (0, 1)");
  Spectral& sp = detail::spectral_for(U.grid);
  const std::size_t n = U.slices.size();
  std::vector<double> gx(n);
  for (std::size_t j = 0; j < n; ++j) gx[j] = sp.seminorm_sq(U.slices[j], 1.0);

  const double e = 2.0 - 2.0 * s; // y^{1-2s} integrates to y^e / e
  double ex = 0.0, ey = 0.0;
  const double dV = U.grid.cell_volume();
  for (std::size_t j = 0; j + 1 < n; ++j) {
    const double a = U.y(j), b = U.y(j + 1), hcell = b - a;
    // exact int_a^b y^{1-2s} l(y) dy for l linear with l(a) = gx[j], l(b) = gx[j+1]
    const double m0 = (std::pow(b, e) - std::pow(a, e)) / e;
    const double m1 = (std::pow(b, e + 1.0) - std::pow(a, e + 1.0)) / (e + 1.0);
    const double wb = (m1 - a * m0) / hcell, wa = m0 - wb;
    ex += wa * gx[j] + wb * gx[j + 1];

    const double dz = std::pow(b, 2.0 * s) - std::pow(a, 2.0 * s);
    const auto& ua = U.slices[j].values;
    const auto& ub = U.slices[j + 1].values;
    double acc = 0.0;
    for (std::size_t i = 0; i < ua.size(); ++i) acc += (ub[i] - ua[i]) * (ub[i] - ua[i]);
    ey += 2.0 * s * acc * dV / dz;
  }
  return ex + ey;
}

struct IdentityCheck {
  double lhs = 0.0;
  double rhs = 0.0;
  double ratio = 0.0;
};

/// lhs = extension energy of the s-harmonic extension,
/// rhs = k_s ||(-Delta)^{s/2} u||^2.
inline IdentityCheck energy_identity_check(const Field& u, double s, const YGrid& yg) {
  if (!(u.max_abs() > 0.0)) throw std::invalid_argument("energy_identity_check: u vanishes");
  IdentityCheck r;
  r.lhs = extension_energy(harmonic_extend(u, s, yg), s);
  r.rhs = extension_constant(s) * seminorm_sq(u, s);
  r.ratio = r.lhs / r.rhs;
  return r;
}

struct TraceCheck {
  double lhs = 0.0;
  double rhs = 0.0;
  bool satisfied = false;
};

/// ||(-Delta)^{s/2} Tr V||^2 <= k_s^{-1} int y^{1-2s} |grad V|^2, with a
/// relative quadrature slack.
inline TraceCheck trace_inequality_check(const ExtensionField& V, double s, double slack = 0.02) {
  TraceCheck r;
  r.lhs = seminorm_sq(V.trace(), s);
  r.rhs = extension_energy(V, s) / extension_constant(s);
  r.satisfied = r.lhs <= r.rhs * (1.0 + slack);
  return r;
}

/// Every slice of the extension of u carries the same G-symmetry as u, to
/// 1e-12 relative to max|u|.
inline bool extend_symmetry_check(const Field& u, const CoxeterGroup& G, double s, const YGrid& yg) {
  const ExtensionField U = harmonic_extend(u, s, yg);
  const double tol = 1e-12 * std::max(u.max_abs(), 1e-300);
  for (const auto& slice : U.slices)
    for (std::size_t e = 0; e < G.order(); ++e) {
      const Field gs = act(G.elements()[e], slice);
      const double sg = G.signs()[e];
      for (std::size_t i = 0; i < gs.size(); ++i)
        if (std::abs(gs.values[i] - sg * slice.values[i]) > tol) return false;
    }
  return true;
}

inline bool extend_symmetry_check(const Field& u, const CoxeterGroup& G, double s) {
  return extend_symmetry_check(u, G, s, default_ygrid(u.grid, 64));
}

} // namespace fchoq
