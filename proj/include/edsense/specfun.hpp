#pragma once
// ============================================================================
// specfun.hpp -- incomplete gamma family and the extended incomplete gamma
// function Gamma(alpha, x, b; 1) = int_x^inf t^(alpha-1) exp(-t - b/t) dt
// ============================================================================
#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <vector>

#include <boost/math/special_functions/gamma.hpp>

#include "edsense/errors.hpp"
#include "edsense/quadrature.hpp"

namespace edsense {

/// P(s, z) = gamma(s, z) / Gamma(s).
inline double reg_lower_gamma(double s, double z) {
  detail::require(std::isfinite(s) && s > 0.0, "reg_lower_gamma: s must be finite and > 0");
  detail::require(std::isfinite(z) && z >= 0.0, "reg_lower_gamma: z must be finite and >= 0");
  if (z == 0.0) return 0.0;
  return boost::math::gamma_p(s, z);
}

/// Q(s, z) = 1 - P(s, z), computed directly so small tails keep full precision.
inline double reg_upper_gamma(double s, double z) {
  detail::require(std::isfinite(s) && s > 0.0, "reg_upper_gamma: s must be finite and > 0");
  detail::require(std::isfinite(z) && z >= 0.0, "reg_upper_gamma: z must be finite and >= 0");
  if (z == 0.0) return 1.0;
  return boost::math::gamma_q(s, z);
}

namespace detail {

// Log of the integrand after substituting t = e^w (dt = t dw).
template <class Real>
struct ExtGammaLogIntegrand {
  Real alpha;
  Real b;
  Real operator()(Real w) const {
    const Real t = fp::exp(w);
    return alpha * w - t - (b > 0 ? b / t : Real{0});
  }
};

// Walks outward from `from` in steps that double until the log-integrand has
// fallen `drop` below `peak`. `direction` is +1 or -1. Relies on unimodality.
template <class Real>
Real find_cutoff(const ExtGammaLogIntegrand<Real>& phi, Real from, Real peak, Real drop, int direction, Real limit) {
  Real step = 0.5;
  Real w = from;
  for (int iter = 0; iter < 200; ++iter) {
    w = from + direction * step;
    if (direction < 0 && w <= limit) return limit;
    if (phi(w) < peak - drop) return w;
    step *= 2.0;
  }
  return w;
}

}  // namespace detail

/// Natural log of Gamma(alpha, x, b; 1), evaluated in the floating type Real.
///
/// The integral is taken in w = ln t, normalised by the integrand's peak so
/// that neither large b nor large lower limits underflow. The range is split
/// at max(x, 1 + sqrt(b)) and at the mode, then truncated where the integrand
/// has dropped below the peak by e^-60, or by more for types whose epsilon
/// is smaller than e^-50. Tolerances apply to the peak-normalised integral.
template <class Real>
Real basic_log_ext_inc_gamma(Real alpha, Real x, Real b, const QuadratureSettings& settings = {}) {
  detail::require(fp::isfinite(alpha), "ext_inc_gamma: alpha must be finite");
  detail::require(fp::isfinite(x) && x > 0, "ext_inc_gamma: x must be finite and > 0");
  detail::require(fp::isfinite(b) && b >= 0, "ext_inc_gamma: b must be finite and >= 0");
  settings.validate();

  const detail::ExtGammaLogIntegrand<Real> phi{alpha, b};
  const Real w_lo_limit = fp::log(x);

  // Stationary point of phi: t^2 - alpha t - b = 0.
  Real w_mode = w_lo_limit;
  const Real t_star = (alpha + fp::sqrt(alpha * alpha + 4 * b)) / 2;
  if (t_star > x) w_mode = fp::log(t_star);
  const Real peak = phi(w_mode);

  const Real drop = std::max<Real>(60, 10 - fp::log(fp::epsilon<Real>()));
  const Real w_split = fp::log(std::max<Real>(x, 1 + fp::sqrt(b)));
  const Real w_hi = detail::find_cutoff<Real>(phi, std::max(w_mode, w_split), peak, drop, +1, 0);
  const Real w_lo = w_mode > w_lo_limit ? detail::find_cutoff<Real>(phi, w_mode, peak, drop, -1, w_lo_limit)
                                        : w_lo_limit;

  std::vector<Real> breaks{w_lo, w_hi};
  for (Real w : {w_split, w_mode}) {
    if (w > w_lo && w < w_hi) breaks.push_back(w);
  }
  std::sort(breaks.begin(), breaks.end());
  breaks.erase(std::unique(breaks.begin(), breaks.end()), breaks.end());

  auto integrand = [&](Real w) { return fp::exp(phi(w) - peak); };
  const auto result = integrate_adaptive(integrand, std::span<const Real>(breaks), settings);
  if (!(result.value > 0) || !fp::isfinite(result.value)) {
    throw ConvergenceError("ext_inc_gamma: quadrature produced a non-positive value");
  }
  return peak + fp::log(result.value);
}

/// Natural log of Gamma(alpha, x, b; 1).
inline double log_ext_inc_gamma(double alpha, double x, double b, const QuadratureSettings& settings = {}) {
  return basic_log_ext_inc_gamma<double>(alpha, x, b, settings);
}

/// Extended incomplete gamma function Gamma(alpha, x, b; 1), x > 0, b >= 0.
/// Underflows to 0 for very large arguments; use log_ext_inc_gamma there.
inline double ext_inc_gamma(double alpha, double x, double b, const QuadratureSettings& settings = {}) {
  return std::exp(log_ext_inc_gamma(alpha, x, b, settings));
}

}  // namespace edsense
