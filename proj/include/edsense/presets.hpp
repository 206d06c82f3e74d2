#pragma once
// ============================================================================
// presets.hpp -- reference sensing scenarios
//
// All presets use Ns = 5, unit noise variance and unit channel variance.
//   fig1: one PU, m in {1,2,3}, SNR in {0,5} dB
//   fig2: in-cell PU at 0 dB plus five Rayleigh interferers at INR
//         {0,-1,-2,-3,-5} dB, common interferer activity p
//   fig3: M = 1..6 PUs from the fig2 set, p = 0.5
// ============================================================================
#include <array>
#include <cstdio>
#include <string>
#include <vector>

#include "edsense/errors.hpp"
#include "edsense/scenario.hpp"

namespace edsense {

struct CurvePreset {
  std::string name;
  std::string description;
  Scenario scenario;
};

inline constexpr int kPresetSamples = 5;
inline constexpr double kPresetNoiseVar = 1.0;
inline constexpr double kInCellActivity = 0.5;
inline constexpr std::array<double, 5> kInterfererInrDb = {0.0, -1.0, -2.0, -3.0, -5.0};
inline constexpr std::array<double, 5> kFig2Activities = {0.0, 0.25, 0.5, 0.75, 1.0};

/// In-cell PU at `snr_db` followed by the first `interferers` entries of the
/// INR list, all Rayleigh, all interferers active with probability p.
inline Scenario interference_scenario(double snr_db, std::size_t interferers, double p) {
  detail::require(interferers <= kInterfererInrDb.size(), "interference_scenario: at most five interferers");
  Scenario scn;
  scn.noise_var = kPresetNoiseVar;
  scn.num_samples = kPresetSamples;
  scn.pus.push_back(PuProfile::from_snr_db(1, snr_db, kInCellActivity));
  for (std::size_t j = 0; j < interferers; ++j) scn.pus.push_back(PuProfile::from_snr_db(1, kInterfererInrDb[j], p));
  return scn;
}

inline Scenario single_pu_scenario(int m, double snr_db) {
  Scenario scn;
  scn.noise_var = kPresetNoiseVar;
  scn.num_samples = kPresetSamples;
  scn.pus.push_back(PuProfile::from_snr_db(m, snr_db, kInCellActivity));
  return scn;
}

inline std::vector<std::string> figure_names() { return {"fig1", "fig2", "fig3"}; }

inline std::vector<CurvePreset> figure_presets(const std::string& figure) {
  std::vector<CurvePreset> out;
  char name[64];
  char description[160];
  if (figure == "fig1") {
    for (double snr_db : {0.0, 5.0}) {
      for (int m : {1, 2, 3}) {
        std::snprintf(name, sizeof name, "fig1_m%d_snr%gdB", m, snr_db);
        std::snprintf(description, sizeof description, "single PU, Nakagami m = %d, SNR %g dB", m, snr_db);
        out.push_back({name, description, single_pu_scenario(m, snr_db)});
      }
    }
  } else if (figure == "fig2") {
    for (double p : kFig2Activities) {
      std::snprintf(name, sizeof name, "fig2_p%.2f", p);
      std::snprintf(description, sizeof description,
                    "6 PUs, Rayleigh, SNR 0 dB, INR {0,-1,-2,-3,-5} dB, interferer activity %g", p);
      out.push_back({name, description, interference_scenario(0.0, 5, p)});
    }
  } else if (figure == "fig3") {
    for (std::size_t m = 1; m <= 6; ++m) {
      std::snprintf(name, sizeof name, "fig3_M%zu", m);
      std::snprintf(description, sizeof description, "%zu PUs, Rayleigh, SNR 0 dB, interferer activity 0.5", m);
      out.push_back({name, description, interference_scenario(0.0, m - 1, 0.5)});
    }
  } else {
    throw ConfigError("unknown figure '" + figure + "' (expected fig1, fig2 or fig3)");
  }
  return out;
}

}  // namespace edsense
