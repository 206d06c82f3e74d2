#pragma once
// ============================================================================
// validation.hpp -- closed form vs. Monte Carlo agreement report
// ============================================================================
#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "edsense/closed_form.hpp"
#include "edsense/monte_carlo.hpp"
#include "edsense/roc.hpp"
#include "edsense/scenario_json.hpp"

namespace edsense {

struct ValidationOptions {
  std::uint64_t trials = 100000;
  std::uint64_t seed = 1;
  int gamma_count = 20;
  unsigned workers = 1;
  /// Fraction of interval misses tolerated before the verdict is FAIL.
  double allowed_miss_fraction = 0.05;
};

struct ValidationPoint {
  double gamma = 0.0;
  double pfa_cf = 0.0;
  double pd_cf = 0.0;
  EstimateWithCI pfa_mc;
  EstimateWithCI pd_mc;
  [[nodiscard]] bool pfa_inside() const { return pfa_mc.contains(pfa_cf); }
  [[nodiscard]] bool pd_inside() const { return pd_mc.contains(pd_cf); }
};

struct ValidationReport {
  Scenario scenario;
  ValidationOptions options;
  std::vector<ValidationPoint> points;
  std::size_t comparisons = 0;
  std::size_t misses = 0;
  std::size_t allowed_misses = 0;
  [[nodiscard]] bool pass() const { return misses <= allowed_misses; }
};

inline constexpr std::uint64_t kMinValidationTrials = 10000;

/// Compares closed-form Pfa/Pd with Wilson 95% intervals at `gamma_count`
/// log-spaced thresholds between Pfa = 0.999 and Pfa = 0.001.
inline ValidationReport run_validation(const Scenario& scn, const ValidationOptions& opt) {
  detail::require(opt.trials >= kMinValidationTrials, "validate: at least 10^4 trials required");
  detail::require(opt.gamma_count >= 2, "validate: gamma count must be >= 2");
  const ClosedFormModel model(scn);
  const auto gammas = make_gamma_grid(model, {true, 0.0, 0.0, opt.gamma_count});
  const auto mc = estimate_roc(scn, gammas, {opt.trials, opt.seed, SimHypothesis::pu1_busy}, opt.workers);

  ValidationReport rep{scn, opt, {}, 0, 0, 0};
  for (std::size_t i = 0; i < gammas.size(); ++i) {
    const auto cf = model.probabilities(EnergyThreshold(gammas[i]));
    ValidationPoint pt{gammas[i], cf.p_fa, cf.p_d, mc[i].pfa, mc[i].pd};
    rep.misses += (pt.pfa_inside() ? 0 : 1) + (pt.pd_inside() ? 0 : 1);
    rep.comparisons += 2;
    rep.points.push_back(pt);
  }
  rep.allowed_misses = static_cast<std::size_t>(opt.allowed_miss_fraction * static_cast<double>(rep.comparisons));
  return rep;
}

inline nlohmann::json estimate_to_json(const EstimateWithCI& e) {
  return {{"estimate", e.estimate}, {"ci_low", e.ci_low}, {"ci_high", e.ci_high}, {"successes", e.successes},
          {"trials", e.trials}};
}

/// Worker count is deliberately absent: the report depends only on the
/// scenario, seed, trial count and grid size.
inline nlohmann::json report_to_json(const ValidationReport& rep) {
  nlohmann::json points = nlohmann::json::array();
  for (const auto& p : rep.points) {
    points.push_back({{"gamma", p.gamma},
                      {"pfa_cf", p.pfa_cf},
                      {"pd_cf", p.pd_cf},
                      {"pfa_mc", estimate_to_json(p.pfa_mc)},
                      {"pd_mc", estimate_to_json(p.pd_mc)},
                      {"pfa_inside", p.pfa_inside()},
                      {"pd_inside", p.pd_inside()}});
  }
  return {{"scenario", scenario_to_json(rep.scenario)},
          {"trials", rep.options.trials},
          {"seed", rep.options.seed},
          {"gamma_count", rep.options.gamma_count},
          {"confidence", 0.95},
          {"comparisons", rep.comparisons},
          {"misses", rep.misses},
          {"allowed_misses", rep.allowed_misses},
          {"verdict", rep.pass() ? "PASS" : "FAIL"},
          {"points", std::move(points)}};
}

inline std::string report_to_string(const ValidationReport& rep) { return report_to_json(rep).dump(2) + "\n"; }

}  // namespace edsense
