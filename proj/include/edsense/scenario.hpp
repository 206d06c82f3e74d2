#pragma once
// ============================================================================
// scenario.hpp -- multi-PU sensing environment and occupancy enumeration
// ============================================================================
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "edsense/errors.hpp"
#include "edsense/gamma_mixture.hpp"

namespace edsense {

/// Physical description of one PU-to-SU link.
struct LinkBudget {
  double distance = 1.0;       ///< d_i > 0
  double path_loss_exp = 0.0;  ///< xi_i >= 0
  double signal_var = 1.0;     ///< sigma_s^2 > 0
  double channel_var = 1.0;    ///< sigma_h^2 > 0

  void validate() const {
    detail::require(std::isfinite(distance) && distance > 0.0, "LinkBudget: distance must be > 0");
    detail::require(std::isfinite(path_loss_exp) && path_loss_exp >= 0.0, "LinkBudget: path_loss_exp must be >= 0");
    detail::require(std::isfinite(signal_var) && signal_var > 0.0, "LinkBudget: signal_var must be > 0");
    detail::require(std::isfinite(channel_var) && channel_var > 0.0, "LinkBudget: channel_var must be > 0");
  }

  /// d^-xi sigma_h^2 sigma_s^2, the mean received signal power.
  [[nodiscard]] double mean_received_power() const { return std::pow(distance, -path_loss_exp) * channel_var * signal_var; }
};

struct PuProfile {
  int nakagami_m = 1;
  double avg_snr = 1.0;  ///< linear mean received power over noise power
  double activity_prior = 0.0;
  std::optional<LinkBudget> link;

  static PuProfile from_snr(int m, double snr_linear, double activity_prior) {
    PuProfile p{m, snr_linear, activity_prior, std::nullopt};
    p.validate();
    return p;
  }

  static PuProfile from_snr_db(int m, double snr_db, double activity_prior) {
    return from_snr(m, std::pow(10.0, snr_db / 10.0), activity_prior);
  }

  static PuProfile from_link(int m, const LinkBudget& link, double noise_var, double activity_prior) {
    link.validate();
    detail::require(std::isfinite(noise_var) && noise_var > 0.0, "PuProfile: noise_var must be > 0");
    PuProfile p{m, link.mean_received_power() / noise_var, activity_prior, link};
    p.validate();
    return p;
  }

  void validate() const {
    detail::require(nakagami_m >= 1, "PuProfile: nakagami_m must be a positive integer");
    detail::require(std::isfinite(avg_snr) && avg_snr > 0.0, "PuProfile: avg_snr must be finite and > 0");
    detail::require(activity_prior >= 0.0 && activity_prior <= 1.0, "PuProfile: activity_prior must lie in [0, 1]");
    if (link) link->validate();
  }

  /// sigma_h^2; unit when the profile was given as an SNR.
  [[nodiscard]] double channel_var() const { return link ? link->channel_var : 1.0; }
};

struct Scenario {
  double noise_var = 1.0;  ///< sigma_w^2
  int num_samples = 1;     ///< N_s
  std::vector<PuProfile> pus;  ///< index 0 is the in-cell PU

  void validate() const {
    detail::require(std::isfinite(noise_var) && noise_var > 0.0, "Scenario: noise_var must be finite and > 0");
    detail::require(num_samples >= 1, "Scenario: num_samples must be >= 1");
    detail::require(!pus.empty(), "Scenario: at least one PU required");
    for (const auto& p : pus) p.validate();
  }

  [[nodiscard]] std::size_t size() const noexcept { return pus.size(); }
};

enum class Hypothesis { pu1_busy, pu1_idle };

struct OccupancySet {
  std::vector<bool> flags;

  [[nodiscard]] bool any_active() const {
    for (bool f : flags)
      if (f) return true;
    return false;
  }
  [[nodiscard]] std::size_t active_count() const {
    std::size_t n = 0;
    for (bool f : flags) n += f ? 1 : 0;
    return n;
  }
  friend bool operator==(const OccupancySet&, const OccupancySet&) = default;
};

struct WeightedOccupancy {
  OccupancySet set;
  double prior = 0.0;
};

inline constexpr std::size_t kMaxEnumeratedPus = 20;

/// All 2^(M-1) interferer patterns with the in-cell flag fixed by the
/// hypothesis. prior = prod_{j>=2} p_j^theta_j (1 - p_j)^(1 - theta_j).
/// Interferer j is bit (j - 1) of the pattern index.
inline std::vector<WeightedOccupancy> enumerate_occupancies(const Scenario& scn, Hypothesis hyp) {
  scn.validate();
  const std::size_t m = scn.size();
  if (m > kMaxEnumeratedPus) {
    throw SizeError("enumerate_occupancies: M = " + std::to_string(m) + " exceeds the enumeration limit of " +
                    std::to_string(kMaxEnumeratedPus));
  }
  const std::uint64_t patterns = std::uint64_t{1} << (m - 1);
  std::vector<WeightedOccupancy> out;
  out.reserve(patterns);
  for (std::uint64_t bits = 0; bits < patterns; ++bits) {
    WeightedOccupancy w;
    w.set.flags.assign(m, false);
    w.set.flags[0] = hyp == Hypothesis::pu1_busy;
    double prior = 1.0;
    for (std::size_t j = 1; j < m; ++j) {
      const bool on = (bits >> (j - 1)) & 1U;
      w.set.flags[j] = on;
      const double p = scn.pus[j].activity_prior;
      prior *= on ? p : 1.0 - p;
    }
    w.prior = prior;
    out.push_back(std::move(w));
  }
  return out;
}

/// Gamma-sum form of the conditional variance for the active PUs:
/// a_i = m_i, b_i = snr_i sigma_w^2 / (2 m_i), offset sigma_w^2 / 2.
inline GammaMixture active_mixture(const Scenario& scn, const OccupancySet& occ) {
  detail::require(occ.flags.size() == scn.size(), "active_mixture: occupancy length must equal the PU count");
  if (!occ.any_active()) {
    throw DomainError("active_mixture: degenerate occupancy, no PU is active (use the all-idle law)");
  }
  std::vector<GammaComponent> comps;
  for (std::size_t i = 0; i < scn.size(); ++i) {
    if (!occ.flags[i]) continue;
    const auto& pu = scn.pus[i];
    comps.push_back({pu.nakagami_m, pu.avg_snr * scn.noise_var / (2.0 * pu.nakagami_m)});
  }
  return GammaMixture(comps, scn.noise_var / 2.0);
}

}  // namespace edsense
