#pragma once
// ============================================================================
// scenario_json.hpp -- scenario file schema
//
//   {
//     "noise_var": 1.0,
//     "num_samples": 5,
//     "pus": [
//       {"snr_db": 0.0, "m": 1, "activity_prior": 1.0},
//       {"distance": 120.0, "path_loss_exp": 3.0, "signal_var": 2e6,
//        "channel_var": 1.0, "m": 2, "activity_prior": 0.5}
//     ]
//   }
//
// Unknown keys are rejected. A PU carries either `snr_db` or all four link
// fields, never both.
// ============================================================================
#include <fstream>
#include <set>
#include <sstream>
#include <string>

#include <json.hpp>

#include "edsense/errors.hpp"
#include "edsense/scenario.hpp"

namespace edsense {

namespace detail {

inline void reject_unknown_keys(const nlohmann::json& obj, const std::set<std::string>& allowed, const std::string& where) {
  for (const auto& [key, _] : obj.items()) {
    if (!allowed.count(key)) throw ConfigError(where + ": unknown key '" + key + "'");
  }
}

inline double number_field(const nlohmann::json& obj, const char* key, const std::string& where) {
  if (!obj.contains(key)) throw ConfigError(where + ": missing required key '" + key + "'");
  const auto& v = obj.at(key);
  if (!v.is_number()) throw ConfigError(where + ": '" + key + "' must be a number");
  return v.get<double>();
}

inline int integer_field(const nlohmann::json& obj, const char* key, const std::string& where) {
  if (!obj.contains(key)) throw ConfigError(where + ": missing required key '" + key + "'");
  const auto& v = obj.at(key);
  if (!v.is_number_integer()) throw ConfigError(where + ": '" + key + "' must be an integer");
  return v.get<int>();
}

}  // namespace detail

inline Scenario scenario_from_json(const nlohmann::json& doc) {
  if (!doc.is_object()) throw ConfigError("scenario: top level must be a JSON object");
  detail::reject_unknown_keys(doc, {"noise_var", "num_samples", "pus"}, "scenario");

  Scenario scn;
  scn.noise_var = detail::number_field(doc, "noise_var", "scenario");
  scn.num_samples = detail::integer_field(doc, "num_samples", "scenario");
  if (!doc.contains("pus") || !doc.at("pus").is_array()) throw ConfigError("scenario: 'pus' must be an array");

  const auto& pus = doc.at("pus");
  for (std::size_t i = 0; i < pus.size(); ++i) {
    const std::string where = "scenario.pus[" + std::to_string(i) + "]";
    const auto& p = pus.at(i);
    if (!p.is_object()) throw ConfigError(where + ": must be an object");
    detail::reject_unknown_keys(
        p, {"snr_db", "distance", "path_loss_exp", "signal_var", "channel_var", "m", "activity_prior"}, where);
    const int m = detail::integer_field(p, "m", where);
    const double prior = detail::number_field(p, "activity_prior", where);

    const bool has_snr = p.contains("snr_db");
    const int link_fields = static_cast<int>(p.contains("distance")) + static_cast<int>(p.contains("path_loss_exp")) +
                            static_cast<int>(p.contains("signal_var")) + static_cast<int>(p.contains("channel_var"));
    try {
      if (has_snr && link_fields == 0) {
        scn.pus.push_back(PuProfile::from_snr_db(m, detail::number_field(p, "snr_db", where), prior));
      } else if (!has_snr && link_fields == 4) {
        LinkBudget link{detail::number_field(p, "distance", where), detail::number_field(p, "path_loss_exp", where),
                        detail::number_field(p, "signal_var", where), detail::number_field(p, "channel_var", where)};
        if (!(scn.noise_var > 0.0)) throw ConfigError("scenario: noise_var must be > 0");
        scn.pus.push_back(PuProfile::from_link(m, link, scn.noise_var, prior));
      } else {
        throw ConfigError(where + ": give either 'snr_db' or all of distance/path_loss_exp/signal_var/channel_var");
      }
    } catch (const DomainError& e) {
      throw ConfigError(where + ": " + e.what());
    }
  }
  try {
    scn.validate();
  } catch (const DomainError& e) {
    throw ConfigError(e.what());
  }
  return scn;
}

inline Scenario scenario_from_string(const std::string& text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError(std::string("scenario: JSON parse error: ") + e.what());
  }
  return scenario_from_json(doc);
}

inline Scenario load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("scenario: cannot open '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return scenario_from_string(buf.str());
}

/// Serialises with SNRs in dB unless the profile came from a link budget.
inline nlohmann::json scenario_to_json(const Scenario& scn) {
  nlohmann::json pus = nlohmann::json::array();
  for (const auto& p : scn.pus) {
    nlohmann::json j;
    if (p.link) {
      j["distance"] = p.link->distance;
      j["path_loss_exp"] = p.link->path_loss_exp;
      j["signal_var"] = p.link->signal_var;
      j["channel_var"] = p.link->channel_var;
    } else {
      j["snr_db"] = 10.0 * std::log10(p.avg_snr);
    }
    j["m"] = p.nakagami_m;
    j["activity_prior"] = p.activity_prior;
    pus.push_back(std::move(j));
  }
  return {{"noise_var", scn.noise_var}, {"num_samples", scn.num_samples}, {"pus", std::move(pus)}};
}

}  // namespace edsense
