#pragma once
// ============================================================================
// closed_form.hpp -- exact distribution of the energy statistic
//
//   T = (1/Ns) sum_{n<Ns} |y(n)|^2
//
// Given the per-dimension variance sigma^2, T is sigma^2/Ns times a
// chi-square variate with 2 Ns degrees of freedom. Averaging over block
// Nakagami-m fading of the active PUs turns sigma^2 into an offset gamma sum,
// and the average over that law is a finite sum of extended incomplete gamma
// functions. Detection and false-alarm probabilities mix those conditional
// laws over the interferer occupancy patterns.
// ============================================================================
#include <cmath>
#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "edsense/errors.hpp"
#include "edsense/gamma_mixture.hpp"
#include "edsense/scenario.hpp"
#include "edsense/specfun.hpp"

namespace edsense {

/// Decision threshold on T, in the same energy units as T.
class EnergyThreshold {
 public:
  explicit EnergyThreshold(double gamma) : gamma_(gamma) {
    detail::require(std::isfinite(gamma) && gamma >= 0.0, "EnergyThreshold: must be finite and >= 0");
  }
  [[nodiscard]] double value() const noexcept { return gamma_; }

 private:
  double gamma_;
};

struct SensingProbabilities {
  double p_fa = 0.0;
  double p_d = 0.0;
};

namespace detail {

inline double clamp_probability(double p) { return std::min(1.0, std::max(0.0, p)); }

template <class Real = double>
Real log_binomial(int n, int k) {
  return fp::lgamma(static_cast<Real>(n + 1)) - fp::lgamma(static_cast<Real>(k + 1)) -
         fp::lgamma(static_cast<Real>(n - k + 1));
}

inline void check_energy(double x, const char* who) {
  require(std::isfinite(x) && x >= 0.0, std::string(who) + ": x must be finite and >= 0");
}

inline void check_samples(int ns, const char* who) { require(ns >= 1, std::string(who) + ": ns must be >= 1"); }

// P(T > x | mixture) from the quadruple sum over n, i, k, j, accumulated in
// the floating type Real.
template <class Real>
double survival_theorem_in(double x, const GammaMixture& mix, const XiTable& xi, int ns,
                           const QuadratureSettings& q) {
  const Real c = mix.offset();
  const Real log_half_nsx = fp::log(static_cast<Real>(ns) * x / 2);
  const Real log_c = c > 0 ? fp::log(c) : Real{0};
  const auto& comps = mix.components();

  BasicCompensatedSum<Real> total;
  for (std::size_t i = 0; i < comps.size(); ++i) {
    const int ai = comps[i].shape;
    const Real bi = comps[i].scale;
    const Real log_bi = fp::log(bi);
    const Real lower = c / bi;
    const Real bessel_arg = static_cast<Real>(ns) * x / (2 * bi);

    // alpha = -n + j + 1 spans [2 - ns, ai]; evaluate each once per component.
    const int alpha_min = 2 - ns;
    std::vector<Real> log_ext(static_cast<std::size_t>(ai - alpha_min + 1));
    for (int alpha = alpha_min; alpha <= ai; ++alpha) {
      log_ext[static_cast<std::size_t>(alpha - alpha_min)] = basic_log_ext_inc_gamma<Real>(alpha, lower, bessel_arg, q);
    }

    for (int k = 1; k <= ai; ++k) {
      const auto xik = static_cast<Real>(xi.exact(i, k));
      if (xik == 0) continue;
      const Real log_xik = fp::log(fp::abs(xik));
      for (int j = 0; j <= k - 1; ++j) {
        const int c_power = k - 1 - j;
        const Real sign = ((c_power % 2 == 0) ? 1 : -1) * (xik > 0 ? 1 : -1);
        const Real log_j = log_xik + log_binomial<Real>(k - 1, j) + c_power * log_c - fp::lgamma(static_cast<Real>(k)) + lower;
        for (int n = 0; n < ns; ++n) {
          const int alpha = -n + j + 1;
          const Real log_term = log_j - fp::lgamma(static_cast<Real>(n + 1)) - (k + n - j - 1) * log_bi +
                                n * log_half_nsx + log_ext[static_cast<std::size_t>(alpha - alpha_min)];
          total.add(sign * fp::exp(log_term));
        }
      }
    }
  }
  return static_cast<double>(total.value());
}

// Terms alternate in sign and reach sum |Xi| times the result, so both the
// working precision and the tolerance of each extended gamma integral follow
// that condition number.
inline constexpr double kQuadPrecisionCondition = 1e6;

template <class Real>
QuadratureSettings conditioned_settings(const QuadratureSettings& q, double condition) {
  const double floor = 50.0 * static_cast<double>(fp::epsilon<Real>());
  const double scale = std::max(1.0, condition);
  return {std::max(floor, q.rel_tol / scale), std::max(floor, q.abs_tol / scale), q.max_subdivisions};
}

inline double survival_theorem(double x, const GammaMixture& mix, const XiTable& xi, int ns,
                               const QuadratureSettings& q) {
  if (x == 0.0) return 1.0;
  const double condition = xi.condition();
  if (condition > kQuadPrecisionCondition) {
    return survival_theorem_in<quad>(x, mix, xi, ns, conditioned_settings<quad>(q, condition));
  }
  return survival_theorem_in<long double>(x, mix, xi, ns, conditioned_settings<long double>(q, condition));
}

}  // namespace detail

/// P(T <= x | sigma^2) = P(Ns, Ns x / (2 sigma^2)).
inline double cdf_given_sigma(double x, double sigma2, int ns) {
  detail::check_energy(x, "cdf_given_sigma");
  detail::check_samples(ns, "cdf_given_sigma");
  detail::require(std::isfinite(sigma2) && sigma2 > 0.0, "cdf_given_sigma: sigma2 must be > 0");
  return reg_lower_gamma(ns, ns * x / (2.0 * sigma2));
}

inline double survival_given_sigma(double x, double sigma2, int ns) {
  detail::check_energy(x, "survival_given_sigma");
  detail::check_samples(ns, "survival_given_sigma");
  detail::require(std::isfinite(sigma2) && sigma2 > 0.0, "survival_given_sigma: sigma2 must be > 0");
  return reg_upper_gamma(ns, ns * x / (2.0 * sigma2));
}

/// CDF of T when every PU is idle: sigma^2 = sigma_w^2 / 2.
inline double cdf_all_idle(double x, const Scenario& scn) {
  detail::check_energy(x, "cdf_all_idle");
  scn.validate();
  return reg_lower_gamma(scn.num_samples, scn.num_samples * x / scn.noise_var);
}

inline double survival_all_idle(double x, const Scenario& scn) {
  detail::check_energy(x, "survival_all_idle");
  scn.validate();
  return reg_upper_gamma(scn.num_samples, scn.num_samples * x / scn.noise_var);
}

/// P(T > x) for a fixed set of active PUs, faded independently.
inline double survival_given_occupancy(double x, const GammaMixture& mix, const XiTable& xi, int ns,
                                       const QuadratureSettings& q = {}) {
  detail::check_energy(x, "survival_given_occupancy");
  detail::check_samples(ns, "survival_given_occupancy");
  return detail::clamp_probability(detail::survival_theorem(x, mix, xi, ns, q));
}

/// P(T <= x) for a fixed set of active PUs (the general integer-m closed form).
inline double cdf_given_occupancy(double x, const GammaMixture& mix, const XiTable& xi, int ns,
                                  const QuadratureSettings& q = {}) {
  detail::check_energy(x, "cdf_given_occupancy");
  detail::check_samples(ns, "cdf_given_occupancy");
  if (x == 0.0) return 0.0;
  return detail::clamp_probability(1.0 - detail::survival_theorem(x, mix, xi, ns, q));
}

namespace detail {

template <class Real>
double rayleigh_survival_in(double x, const GammaMixture& mix, const XiTable& xi, int ns, const QuadratureSettings& q) {
  const Real c = mix.offset();
  const Real log_half_nsx = fp::log(static_cast<Real>(ns) * x / 2);
  BasicCompensatedSum<Real> total;
  const auto& comps = mix.components();
  for (std::size_t i = 0; i < comps.size(); ++i) {
    const Real bi = comps[i].scale;
    const auto xi1 = static_cast<Real>(xi.exact(i, 1));
    const Real sign = xi1 > 0 ? 1 : -1;
    for (int n = 0; n < ns; ++n) {
      const Real log_term = fp::log(fp::abs(xi1)) - fp::lgamma(static_cast<Real>(n + 1)) - n * fp::log(bi) +
                            n * log_half_nsx + c / bi +
                            basic_log_ext_inc_gamma<Real>(1 - n, c / bi, static_cast<Real>(ns) * x / (2 * bi), q);
      total.add(sign * fp::exp(log_term));
    }
  }
  return static_cast<double>(total.value());
}

template <class Real>
double single_pu_cdf_in(double x, int m, double s, double noise_var, int ns, const QuadratureSettings& q) {
  const Real ln2 = fp::log(Real{2});
  const Real lower = static_cast<Real>(m) * noise_var / s;
  const Real bessel_arg = static_cast<Real>(m) * ns * x / s;
  const Real log_prefactor = ln2 + m * fp::log(static_cast<Real>(m)) - m * fp::log(static_cast<Real>(s)) -
                             fp::lgamma(static_cast<Real>(m)) + lower;
  BasicCompensatedSum<Real> total;
  for (int k = 0; k <= m - 1; ++k) {
    const Real sign = ((m - 1 - k) % 2 == 0) ? 1 : -1;
    for (int n = 0; n < ns; ++n) {
      const Real log_term = log_prefactor + log_binomial<Real>(m - 1, k) + (k - n) * ln2 -
                            fp::lgamma(static_cast<Real>(n + 1)) + (m - 1 - k) * fp::log(static_cast<Real>(noise_var)) +
                            n * fp::log(static_cast<Real>(ns) * x) + (k - n + 1) * fp::log(s / (Real{2} * m)) +
                            basic_log_ext_inc_gamma<Real>(k - n + 1, lower, bessel_arg, q);
      total.add(sign * fp::exp(log_term));
    }
  }
  return static_cast<double>(Real{1} - total.value());
}

}  // namespace detail

/// Rayleigh special case (every shape equal to 1): a triple sum.
inline double cdf_rayleigh(double x, const GammaMixture& mix, const XiTable& xi, int ns,
                           const QuadratureSettings& q = {}) {
  detail::check_energy(x, "cdf_rayleigh");
  detail::check_samples(ns, "cdf_rayleigh");
  if (!mix.all_exponential()) throw DomainError("cdf_rayleigh: every component must have shape 1");
  if (x == 0.0) return 0.0;
  const double condition = xi.condition();
  const double survival =
      condition > detail::kQuadPrecisionCondition
          ? detail::rayleigh_survival_in<quad>(x, mix, xi, ns, detail::conditioned_settings<quad>(q, condition))
          : detail::rayleigh_survival_in<long double>(x, mix, xi, ns,
                                                      detail::conditioned_settings<long double>(q, condition));
  return detail::clamp_probability(1.0 - survival);
}

/// Single-PU special case written directly in the link parameters, with
/// S = d^-xi sigma_h^2 sigma_s^2 = snr * sigma_w^2. The binomial expansion
/// alternates in sign, with terms up to about 2^(m-1) times the result.
inline double cdf_single_pu(double x, const PuProfile& profile, double noise_var, int ns,
                            const QuadratureSettings& q = {}) {
  detail::check_energy(x, "cdf_single_pu");
  detail::check_samples(ns, "cdf_single_pu");
  profile.validate();
  detail::require(std::isfinite(noise_var) && noise_var > 0.0, "cdf_single_pu: noise_var must be > 0");
  if (x == 0.0) return 0.0;
  const int m = profile.nakagami_m;
  const double condition = std::ldexp(1.0, m - 1);
  return detail::clamp_probability(detail::single_pu_cdf_in<long double>(
      x, m, profile.avg_snr * noise_var, noise_var, ns, detail::conditioned_settings<long double>(q, condition)));
}

// ============================================================================
// ClosedFormModel -- occupancy mixtures of a scenario, built once
// ============================================================================
class ClosedFormModel {
 public:
  struct Term {
    double prior;
    std::optional<GammaMixture> mixture;  ///< empty for the all-idle pattern
    std::optional<XiTable> xi;
  };

  explicit ClosedFormModel(Scenario scn, QuadratureSettings q = {}) : scn_(std::move(scn)), q_(q) {
    scn_.validate();
    q_.validate();
    busy_ = build(Hypothesis::pu1_busy);
    idle_ = build(Hypothesis::pu1_idle);
  }

  [[nodiscard]] const Scenario& scenario() const noexcept { return scn_; }
  [[nodiscard]] const std::vector<Term>& terms(Hypothesis h) const noexcept {
    return h == Hypothesis::pu1_busy ? busy_ : idle_;
  }

  /// Sum over in-cell-busy patterns of prior * P(T > gamma | pattern).
  [[nodiscard]] double detection_probability(EnergyThreshold gamma) const { return mix(busy_, gamma.value()); }

  /// Same over in-cell-idle patterns, including the all-idle chi-square term.
  [[nodiscard]] double false_alarm_probability(EnergyThreshold gamma) const { return mix(idle_, gamma.value()); }

  [[nodiscard]] SensingProbabilities probabilities(EnergyThreshold gamma) const {
    return {false_alarm_probability(gamma), detection_probability(gamma)};
  }

  /// Threshold achieving the target false-alarm probability to within 1e-9:
  /// doubles an upper bracket until Pfa < target, then bisects.
  [[nodiscard]] EnergyThreshold solve_threshold(double target_pfa) const {
    detail::require(std::isfinite(target_pfa) && target_pfa > 0.0 && target_pfa < 1.0,
                    "solve_threshold: target_pfa must lie in (0, 1)");
    constexpr double kTolerance = 1e-9;
    constexpr int kMaxBisections = 200;
    double lo = 0.0;
    double hi = scn_.noise_var;
    for (int i = 0;; ++i) {
      const double p = false_alarm_probability(EnergyThreshold(hi));
      if (std::abs(p - target_pfa) <= kTolerance) return EnergyThreshold(hi);
      if (p < target_pfa) break;
      if (i >= 1000) throw ConvergenceError("solve_threshold: could not bracket the target");
      lo = hi;
      hi *= 2.0;
    }
    for (int i = 0; i < kMaxBisections; ++i) {
      const double mid = 0.5 * (lo + hi);
      const double p = false_alarm_probability(EnergyThreshold(mid));
      if (std::abs(p - target_pfa) <= kTolerance) return EnergyThreshold(mid);
      (p > target_pfa ? lo : hi) = mid;
    }
    throw ConvergenceError("solve_threshold: no convergence after 200 bisection steps for target " +
                           std::to_string(target_pfa));
  }

 private:
  std::vector<Term> build(Hypothesis h) const {
    std::vector<Term> out;
    for (auto& w : enumerate_occupancies(scn_, h)) {
      if (w.prior == 0.0) continue;
      if (!w.set.any_active()) {
        out.push_back({w.prior, std::nullopt, std::nullopt});
        continue;
      }
      auto mix = active_mixture(scn_, w.set);
      auto xi = xi_coefficients(mix);
      out.push_back({w.prior, std::move(mix), std::move(xi)});
    }
    return out;
  }

  double mix(const std::vector<Term>& terms, double gamma) const {
    if (gamma == 0.0) return 1.0;
    detail::CompensatedSum acc;
    for (const auto& t : terms) {
      const double survival = t.mixture ? survival_given_occupancy(gamma, *t.mixture, *t.xi, scn_.num_samples, q_)
                                        : survival_all_idle(gamma, scn_);
      acc.add(t.prior * survival);
    }
    return detail::clamp_probability(acc.value());
  }

  Scenario scn_;
  QuadratureSettings q_;
  std::vector<Term> busy_;
  std::vector<Term> idle_;
};

inline double detection_probability(const Scenario& scn, EnergyThreshold gamma) {
  return ClosedFormModel(scn).detection_probability(gamma);
}

inline double false_alarm_probability(const Scenario& scn, EnergyThreshold gamma) {
  return ClosedFormModel(scn).false_alarm_probability(gamma);
}

inline EnergyThreshold solve_threshold(const Scenario& scn, double target_pfa) {
  return ClosedFormModel(scn).solve_threshold(target_pfa);
}

}  // namespace edsense
