#pragma once
// ============================================================================
// quadrature.hpp -- globally adaptive Gauss-Kronrod (7/15) integration
// ============================================================================
#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <queue>
#include <span>
#include <string>
#include <vector>

#include "edsense/errors.hpp"
#include "edsense/numeric.hpp"

namespace edsense {

struct QuadratureSettings {
  double rel_tol = 1e-10;
  double abs_tol = 1e-14;
  std::size_t max_subdivisions = 400;

  void validate() const {
    detail::require(rel_tol > 0.0 && std::isfinite(rel_tol), "QuadratureSettings: rel_tol must be > 0");
    detail::require(abs_tol > 0.0 && std::isfinite(abs_tol), "QuadratureSettings: abs_tol must be > 0");
    detail::require(max_subdivisions >= 1, "QuadratureSettings: max_subdivisions must be >= 1");
  }
};

template <class Real>
struct BasicQuadratureResult {
  Real value = 0;
  Real error = 0;
  std::size_t intervals = 0;
};

using QuadratureResult = BasicQuadratureResult<double>;

namespace detail {

// Kronrod abscissae (positive half) and weights; Gauss weights sit on the odd nodes.
inline constexpr std::array<long double, 8> kKronrodNodes = {
    0.991455371120812639206854697526329L, 0.949107912342758524526189684047851L,
    0.864864423359769072789712788640926L, 0.741531185599394439863864773280788L,
    0.586087235467691130294144845693013L, 0.405845151377397166906606412076961L,
    0.207784955007898467600689403773245L, 0.000000000000000000000000000000000L};
inline constexpr std::array<long double, 8> kKronrodWeights = {
    0.022935322010529224963732008058970L, 0.063092092629978553290700663189204L,
    0.104790010322250183839876322541518L, 0.140653259715525918745189590510238L,
    0.169004726639267902826583426598550L, 0.190350578064785409913256402421014L,
    0.204432940075298892414161999234649L, 0.209482141084727828012999174891714L};
inline constexpr std::array<long double, 4> kGaussWeights = {
    0.129484966168869693270611432679082L, 0.279705391489276667901467771423780L,
    0.381830050505118944950369775488975L, 0.417959183673469387755102040816327L};

template <class Real>
struct Panel {
  Real lo;
  Real hi;
  Real value;
  Real error;
  bool operator<(const Panel& other) const { return error < other.error; }
};

template <class Real, class F>
Panel<Real> gauss_kronrod_15(F& f, Real lo, Real hi) {
  const Real center = (lo + hi) / 2;
  const Real half = (hi - lo) / 2;
  const Real fc = f(center);
  Real kronrod = fc * static_cast<Real>(kKronrodWeights[7]);
  Real gauss = fc * static_cast<Real>(kGaussWeights[3]);
  for (std::size_t j = 0; j < 7; ++j) {
    const Real dx = half * static_cast<Real>(kKronrodNodes[j]);
    const Real sum = f(center - dx) + f(center + dx);
    kronrod += static_cast<Real>(kKronrodWeights[j]) * sum;
    if (j % 2 == 1) gauss += static_cast<Real>(kGaussWeights[j / 2]) * sum;
  }
  return {lo, hi, kronrod * half, fp::abs((kronrod - gauss) * half)};
}

}  // namespace detail

/// Integrates f over the union of [b_k, b_{k+1}] for consecutive breakpoints,
/// bisecting the panel with the largest error estimate until
/// error <= max(abs_tol, rel_tol * |value|). Throws ConvergenceError if the
/// panel budget is exhausted first.
template <class Real, class F>
BasicQuadratureResult<Real> integrate_adaptive(F&& f, std::span<const Real> breakpoints,
                                               const QuadratureSettings& settings = {}) {
  settings.validate();
  detail::require(breakpoints.size() >= 2, "integrate_adaptive: need at least two breakpoints");
  std::priority_queue<detail::Panel<Real>> panels;
  Real value = 0;
  Real error = 0;
  for (std::size_t k = 0; k + 1 < breakpoints.size(); ++k) {
    detail::require(fp::isfinite(breakpoints[k]) && fp::isfinite(breakpoints[k + 1]) &&
                        breakpoints[k] <= breakpoints[k + 1],
                    "integrate_adaptive: breakpoints must be finite and sorted");
    if (breakpoints[k] == breakpoints[k + 1]) continue;
    auto p = detail::gauss_kronrod_15(f, breakpoints[k], breakpoints[k + 1]);
    value += p.value;
    error += p.error;
    panels.push(p);
  }
  auto converged = [&] {
    return error <= std::max<Real>(settings.abs_tol, settings.rel_tol * fp::abs(value));
  };
  while (!converged()) {
    if (panels.size() >= settings.max_subdivisions) {
      throw ConvergenceError("integrate_adaptive: tolerance not met within " +
                             std::to_string(settings.max_subdivisions) + " panels (error " +
                             std::to_string(static_cast<double>(error)) + ", value " +
                             std::to_string(static_cast<double>(value)) + ")");
    }
    const auto worst = panels.top();
    const Real mid = (worst.lo + worst.hi) / 2;
    if (!(mid > worst.lo && mid < worst.hi)) {
      throw ConvergenceError("integrate_adaptive: panel width reached machine resolution");
    }
    panels.pop();
    const auto left = detail::gauss_kronrod_15(f, worst.lo, mid);
    const auto right = detail::gauss_kronrod_15(f, mid, worst.hi);
    value += left.value + right.value - worst.value;
    error += left.error + right.error - worst.error;
    panels.push(left);
    panels.push(right);
  }
  // Re-sum from the panels to shed the drift of the incremental updates.
  BasicQuadratureResult<Real> out;
  out.intervals = panels.size();
  while (!panels.empty()) {
    out.value += panels.top().value;
    out.error += panels.top().error;
    panels.pop();
  }
  return out;
}

template <class Real, class F>
BasicQuadratureResult<Real> integrate_adaptive(F&& f, Real lo, Real hi, const QuadratureSettings& settings = {}) {
  const std::array<Real, 2> bp{lo, hi};
  return integrate_adaptive(std::forward<F>(f), std::span<const Real>(bp), settings);
}

}  // namespace edsense
