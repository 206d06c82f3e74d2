#pragma once
// ============================================================================
// monte_carlo.hpp -- signal-level simulation of the energy detector
//
// One trial draws the interferer occupancy, one block-fading channel power
// per active PU (held over the sensing window), Ns complex Gaussian samples
// per active PU plus noise, and returns T = (1/Ns) sum |y(n)|^2.
// ============================================================================
#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numeric>
#include <random>
#include <span>
#include <thread>
#include <vector>

#include "edsense/closed_form.hpp"
#include "edsense/errors.hpp"
#include "edsense/rng.hpp"
#include "edsense/scenario.hpp"

namespace edsense {

enum class SimHypothesis { pu1_busy, pu1_idle, draw_all };

struct SimConfig {
  std::uint64_t trials = 10000;
  std::uint64_t seed = 1;
  SimHypothesis hypothesis = SimHypothesis::pu1_busy;

  void validate() const { detail::require(trials >= 1, "SimConfig: trials must be >= 1"); }
};

struct EstimateWithCI {
  double estimate = 0.0;
  double ci_low = 0.0;
  double ci_high = 0.0;
  std::uint64_t trials = 0;
  std::uint64_t successes = 0;

  [[nodiscard]] bool contains(double p) const noexcept { return p >= ci_low && p <= ci_high; }
};

struct McProbabilities {
  EstimateWithCI pd;
  EstimateWithCI pfa;
};

inline constexpr double kWilsonZ95 = 1.959963984540054;

/// Wilson score interval for a binomial proportion.
inline EstimateWithCI wilson_interval(std::uint64_t successes, std::uint64_t trials, double z = kWilsonZ95) {
  detail::require(trials >= 1 && successes <= trials, "wilson_interval: need 0 <= successes <= trials, trials >= 1");
  const double n = static_cast<double>(trials);
  const double p = static_cast<double>(successes) / n;
  const double z2 = z * z;
  const double denom = 1.0 + z2 / n;
  const double center = (p + z2 / (2.0 * n)) / denom;
  const double half = z / denom * std::sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n));
  EstimateWithCI out;
  out.estimate = p;
  out.ci_low = std::min(p, std::max(0.0, center - half));
  out.ci_high = std::max(p, std::min(1.0, center + half));
  out.trials = trials;
  out.successes = successes;
  return out;
}

namespace detail {

enum StreamTag : std::uint32_t { kStreamBusy = 1, kStreamIdle = 2, kStreamDrawAll = 3, kStreamFixed = 4 };

inline std::uint32_t stream_for(SimHypothesis h) {
  switch (h) {
    case SimHypothesis::pu1_busy: return kStreamBusy;
    case SimHypothesis::pu1_idle: return kStreamIdle;
    case SimHypothesis::draw_all: return kStreamDrawAll;
  }
  return kStreamDrawAll;
}

// Runs body(first, last, worker) over contiguous chunks of [0, trials).
template <class Body>
void run_chunked(std::uint64_t trials, unsigned workers, Body&& body) {
  workers = std::max(1U, workers);
  if (workers == 1 || trials < workers) {
    body(std::uint64_t{0}, trials, 0U);
    return;
  }
  std::vector<std::jthread> pool;
  pool.reserve(workers);
  const std::uint64_t chunk = (trials + workers - 1) / workers;
  for (unsigned w = 0; w < workers; ++w) {
    const std::uint64_t first = std::min(trials, w * chunk);
    const std::uint64_t last = std::min(trials, first + chunk);
    pool.emplace_back([&body, first, last, w] { body(first, last, w); });
  }
}

}  // namespace detail

/// |h|^2 for a Nakagami-m amplitude with E|h|^2 = channel_var.
template <class Rng>
double draw_channel_power(int m, double channel_var, Rng& rng) {
  std::gamma_distribution<double> g(static_cast<double>(m), channel_var / m);
  return g(rng);
}

/// In-cell flag from the hypothesis (or its own prior under draw_all);
/// interferers from their activity priors.
template <class Rng>
OccupancySet draw_occupancy(const Scenario& scn, SimHypothesis hyp, Rng& rng) {
  OccupancySet occ;
  occ.flags.assign(scn.size(), false);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  switch (hyp) {
    case SimHypothesis::pu1_busy: occ.flags[0] = true; break;
    case SimHypothesis::pu1_idle: occ.flags[0] = false; break;
    case SimHypothesis::draw_all: occ.flags[0] = u(rng) < scn.pus[0].activity_prior; break;
  }
  for (std::size_t j = 1; j < scn.size(); ++j) occ.flags[j] = u(rng) < scn.pus[j].activity_prior;
  return occ;
}

/// One sensing window under a fixed occupancy.
template <class Rng>
double simulate_statistic(const Scenario& scn, const OccupancySet& occ, Rng& rng) {
  detail::require(occ.flags.size() == scn.size(), "simulate_statistic: occupancy length must equal the PU count");
  std::normal_distribution<double> normal(0.0, 1.0);

  // Per active PU: amplitude of h * sqrt(d^-xi) and the signal std per dimension.
  struct Active {
    double amplitude;
    double signal_std;
  };
  std::vector<Active> active;
  for (std::size_t i = 0; i < scn.size(); ++i) {
    if (!occ.flags[i]) continue;
    const auto& pu = scn.pus[i];
    const double path_gain = pu.link ? std::pow(pu.link->distance, -pu.link->path_loss_exp) : 1.0;
    const double signal_var = pu.link ? pu.link->signal_var : pu.avg_snr * scn.noise_var;
    const double h2 = draw_channel_power(pu.nakagami_m, pu.channel_var(), rng);
    active.push_back({std::sqrt(h2 * path_gain), std::sqrt(signal_var / 2.0)});
  }

  const double noise_std = std::sqrt(scn.noise_var / 2.0);
  double energy = 0.0;
  for (int n = 0; n < scn.num_samples; ++n) {
    double re = noise_std * normal(rng);
    double im = noise_std * normal(rng);
    for (const auto& a : active) {
      re += a.amplitude * a.signal_std * normal(rng);
      im += a.amplitude * a.signal_std * normal(rng);
    }
    energy += re * re + im * im;
  }
  return energy / scn.num_samples;
}

/// T for trials 0..cfg.trials-1 under cfg.hypothesis, in trial order.
inline std::vector<double> sample_statistics(const Scenario& scn, const SimConfig& cfg, unsigned workers = 1) {
  scn.validate();
  cfg.validate();
  std::vector<double> out(cfg.trials);
  const auto stream = detail::stream_for(cfg.hypothesis);
  detail::run_chunked(cfg.trials, workers, [&](std::uint64_t first, std::uint64_t last, unsigned) {
    for (std::uint64_t t = first; t < last; ++t) {
      CounterRng rng(cfg.seed, stream, t);
      const auto occ = draw_occupancy(scn, cfg.hypothesis, rng);
      out[t] = simulate_statistic(scn, occ, rng);
    }
  });
  return out;
}

/// T for trials 0..cfg.trials-1 with the occupancy held fixed.
inline std::vector<double> sample_statistics(const Scenario& scn, const OccupancySet& occ, const SimConfig& cfg,
                                             unsigned workers = 1) {
  scn.validate();
  cfg.validate();
  std::vector<double> out(cfg.trials);
  detail::run_chunked(cfg.trials, workers, [&](std::uint64_t first, std::uint64_t last, unsigned) {
    for (std::uint64_t t = first; t < last; ++t) {
      CounterRng rng(cfg.seed, detail::kStreamFixed, t);
      out[t] = simulate_statistic(scn, occ, rng);
    }
  });
  return out;
}

namespace detail {

// Exceedance counts of T over each threshold, for one hypothesis. Each trial
// is simulated once and compared against every threshold.
inline std::vector<std::uint64_t> exceedance_counts(const Scenario& scn, std::span<const double> gammas,
                                                    SimHypothesis hyp, const SimConfig& cfg, unsigned workers) {
  std::vector<double> sorted(gammas.begin(), gammas.end());
  std::sort(sorted.begin(), sorted.end());
  workers = std::max(1U, workers);
  // hist[w][r]: trials in worker w whose T exceeds exactly the r smallest thresholds.
  std::vector<std::vector<std::uint64_t>> hist(workers, std::vector<std::uint64_t>(sorted.size() + 1, 0));
  const auto stream = stream_for(hyp);
  run_chunked(cfg.trials, workers, [&](std::uint64_t first, std::uint64_t last, unsigned w) {
    auto& h = hist[w];
    for (std::uint64_t t = first; t < last; ++t) {
      CounterRng rng(cfg.seed, stream, t);
      const auto occ = draw_occupancy(scn, hyp, rng);
      const double stat = simulate_statistic(scn, occ, rng);
      const auto below = std::lower_bound(sorted.begin(), sorted.end(), stat) - sorted.begin();
      ++h[static_cast<std::size_t>(below)];
    }
  });
  std::vector<std::uint64_t> total(sorted.size() + 1, 0);
  for (const auto& h : hist)
    for (std::size_t r = 0; r < h.size(); ++r) total[r] += h[r];

  std::vector<std::uint64_t> counts(gammas.size(), 0);
  for (std::size_t g = 0; g < gammas.size(); ++g) {
    const auto rank = static_cast<std::size_t>(std::lower_bound(sorted.begin(), sorted.end(), gammas[g]) - sorted.begin());
    // T > gamma  <=>  more than `rank` thresholds lie strictly below T.
    std::uint64_t c = 0;
    for (std::size_t r = rank + 1; r < total.size(); ++r) c += total[r];
    counts[g] = c;
  }
  return counts;
}

}  // namespace detail

/// Empirical (Pd, Pfa) at every threshold from shared trials; Wilson 95% intervals.
inline std::vector<McProbabilities> estimate_roc(const Scenario& scn, std::span<const double> gammas,
                                                 const SimConfig& cfg, unsigned workers = 1) {
  scn.validate();
  cfg.validate();
  for (double g : gammas) detail::require(std::isfinite(g) && g >= 0.0, "estimate_roc: thresholds must be >= 0");
  const auto busy = detail::exceedance_counts(scn, gammas, SimHypothesis::pu1_busy, cfg, workers);
  const auto idle = detail::exceedance_counts(scn, gammas, SimHypothesis::pu1_idle, cfg, workers);
  std::vector<McProbabilities> out;
  out.reserve(gammas.size());
  for (std::size_t g = 0; g < gammas.size(); ++g) {
    out.push_back({wilson_interval(busy[g], cfg.trials), wilson_interval(idle[g], cfg.trials)});
  }
  return out;
}

inline McProbabilities estimate_pd_pfa(const Scenario& scn, EnergyThreshold gamma, const SimConfig& cfg,
                                       unsigned workers = 1) {
  detail::require(cfg.trials >= 100, "estimate_pd_pfa: at least 100 trials required");
  const double g = gamma.value();
  return estimate_roc(scn, std::span<const double>(&g, 1), cfg, workers).front();
}

}  // namespace edsense
