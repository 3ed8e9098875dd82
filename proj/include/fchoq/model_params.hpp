#pragma once
// Problem parameters for (-Delta)^s u + u = (K_alpha * |u|^p)|u|^{p-2}u and
// the analytic constants that go with them.

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace fchoq {

struct ModelParams {
  int N = 3;          // spatial dimension
  double s = 0.5;     // order of the fractional Laplacian
  double alpha = 2.0; // Riesz order
  double p = 2.0;     // nonlinearity exponent
  // N = 2 is accepted only with this flag set; recorded in run metadata.
  bool experimental = false;
};

/// Normalisation constants derived from (N, s, alpha).
struct Constants {
  double A_alpha = 0.0; // Riesz potential normalisation
  double k_s = 0.0;     // extension constant
  double C_Ns = 2.0;    // Gagliardo normalisation, fixed
};

inline double critical_exponent(int N, double s, double alpha) {
  if (!(N - 2.0 * s > 0.0))
    throw std::domain_error("critical exponent undefined: N - 2s <= 0");
  return (N + alpha) / (N - 2.0 * s);
}

inline double critical_exponent(const ModelParams& p) {
  return critical_exponent(p.N, p.s, p.alpha);
}

/// True iff 0<s<1, 0<alpha<N, N>=3 (or N=2 flagged experimental) and
/// 2 <= p < (N+alpha)/(N-2s).
inline bool admissible(const ModelParams& m) {
  if (!std::isfinite(m.s) || !std::isfinite(m.alpha) || !std::isfinite(m.p)) return false;
  if (m.N < 2) return false;
  if (m.N == 2 && !m.experimental) return false;
  if (!(m.s > 0.0 && m.s < 1.0)) return false;
  if (!(m.alpha > 0.0 && m.alpha < m.N)) return false;
  if (!(m.p >= 2.0)) return false;
  return m.p < critical_exponent(m);
}

/// Human-readable reason for rejecting a parameter set; empty if admissible.
inline std::string admissibility_error(const ModelParams& m) {
  if (m.N < 2) return "N must be >= 2";
  if (m.N == 2 && !m.experimental) return "N = 2 requires the experimental flag";
  if (!(m.s > 0.0 && m.s < 1.0)) return "s must lie in (0, 1)";
  if (!(m.alpha > 0.0 && m.alpha < m.N)) return "alpha must lie in (0, N)";
  if (!(m.p >= 2.0)) return "p must be >= 2";
  if (!(m.p < critical_exponent(m)))
    return "p is not admissible: need 2 <= p < (N+alpha)/(N-2s) = " +
           std::to_string(critical_exponent(m));
  return {};
}

/// A_alpha = Gamma((N-alpha)/2) / (Gamma(alpha/2) pi^{N/2} 2^alpha).
inline double riesz_constant(int N, double alpha) {
  if (!(alpha > 0.0 && alpha < N))
    throw std::domain_error("riesz_constant: alpha must lie in (0, N)");
  return std::tgamma(0.5 * (N - alpha)) /
         (std::tgamma(0.5 * alpha) * std::pow(std::numbers::pi, 0.5 * N) * std::pow(2.0, alpha));
}

/// k_s = 2^{1-2s} Gamma(1-s) / Gamma(s).
inline double extension_constant(double s) {
  if (!(s > 0.0 && s < 1.0)) throw std::domain_error("extension_constant: s must lie in (0, 1)");
  return std::pow(2.0, 1.0 - 2.0 * s) * std::tgamma(1.0 - s) / std::tgamma(s);
}

/// Constant C(N,s) of the singular-integral representation of (-Delta)^s for
/// the symbol |xi|^{2s}: s 4^s Gamma(N/2+s) / (pi^{N/2} Gamma(1-s)).
inline double singular_integral_constant(int N, double s) {
  if (!(s > 0.0 && s < 1.0)) throw std::domain_error("singular_integral_constant: s must lie in (0, 1)");
  return s * std::pow(4.0, s) * std::tgamma(0.5 * N + s) /
         (std::pow(std::numbers::pi, 0.5 * N) * std::tgamma(1.0 - s));
}

inline Constants constants(const ModelParams& m) {
  Constants c;
  c.A_alpha = riesz_constant(m.N, m.alpha);
  c.k_s = extension_constant(m.s);
  return c;
}

inline void require_admissible(const ModelParams& m) {
  if (auto why = admissibility_error(m); !why.empty()) throw std::invalid_argument(why);
}

} // namespace fchoq
