#pragma once
// ============================================================================
// roc.hpp -- ROC tables: threshold grids, closed-form / simulated columns,
// and the CSV format
//
//   gamma,pfa_cf,pd_cf[,pfa_mc,pfa_lo,pfa_hi,pd_mc,pd_lo,pd_hi]
//
// Numbers are written with 12 significant digits. Lines starting with '#'
// are comments.
// ============================================================================
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <istream>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "edsense/closed_form.hpp"
#include "edsense/errors.hpp"
#include "edsense/monte_carlo.hpp"

namespace edsense {

struct McColumns {
  double pfa = 0.0;
  double pfa_lo = 0.0;
  double pfa_hi = 0.0;
  double pd = 0.0;
  double pd_lo = 0.0;
  double pd_hi = 0.0;
  friend bool operator==(const McColumns&, const McColumns&) = default;
};

struct RocPoint {
  double gamma = 0.0;
  double pfa_cf = 0.0;
  double pd_cf = 0.0;
  std::optional<McColumns> mc;
  friend bool operator==(const RocPoint&, const RocPoint&) = default;
};

struct RocTable {
  std::vector<std::string> comments;  ///< written as "# ..." lines
  std::vector<RocPoint> rows;

  [[nodiscard]] bool has_mc() const { return !rows.empty() && rows.front().mc.has_value(); }
  friend bool operator==(const RocTable&, const RocTable&) = default;

  void validate() const {
    for (std::size_t i = 0; i < rows.size(); ++i) {
      const auto& r = rows[i];
      if (i > 0) detail::require(r.gamma > rows[i - 1].gamma, "RocTable: gamma must be strictly increasing");
      detail::require(r.mc.has_value() == has_mc(), "RocTable: every row must carry the same columns");
      for (double p : {r.pfa_cf, r.pd_cf}) detail::require(p >= 0.0 && p <= 1.0, "RocTable: probability outside [0,1]");
      if (r.mc) {
        for (double p : {r.mc->pfa, r.mc->pfa_lo, r.mc->pfa_hi, r.mc->pd, r.mc->pd_lo, r.mc->pd_hi}) {
          detail::require(p >= 0.0 && p <= 1.0, "RocTable: probability outside [0,1]");
        }
      }
    }
  }
};

/// Threshold grid: either `points` evenly spaced values on [min, max], or
/// automatic, which spans solve_threshold(0.999)..solve_threshold(0.001)
/// with log-spaced points.
struct GammaGridSpec {
  bool automatic = true;
  double min = 0.0;
  double max = 0.0;
  int points = 50;
};

inline constexpr double kAutoPfaHigh = 0.999;
inline constexpr double kAutoPfaLow = 0.001;

inline std::vector<double> log_spaced(double lo, double hi, int points) {
  detail::require(lo > 0.0 && hi > lo && points >= 2, "log_spaced: need 0 < lo < hi and points >= 2");
  std::vector<double> out(static_cast<std::size_t>(points));
  const double a = std::log(lo);
  const double b = std::log(hi);
  for (int i = 0; i < points; ++i) out[static_cast<std::size_t>(i)] = std::exp(a + (b - a) * i / (points - 1));
  out.front() = lo;
  out.back() = hi;
  return out;
}

inline std::vector<double> make_gamma_grid(const ClosedFormModel& model, const GammaGridSpec& grid) {
  if (grid.automatic) {
    const double lo = model.solve_threshold(kAutoPfaHigh).value();
    const double hi = model.solve_threshold(kAutoPfaLow).value();
    return log_spaced(lo, hi, grid.points);
  }
  detail::require(std::isfinite(grid.min) && std::isfinite(grid.max) && grid.min >= 0.0,
                  "gamma grid: bounds must be finite and >= 0");
  detail::require(grid.points >= 1, "gamma grid: points must be >= 1");
  if (grid.points == 1) {
    detail::require(grid.min == grid.max, "gamma grid: a single point needs min == max");
    return {grid.min};
  }
  detail::require(grid.max > grid.min, "gamma grid: max must exceed min");
  std::vector<double> out(static_cast<std::size_t>(grid.points));
  for (int i = 0; i < grid.points; ++i) {
    out[static_cast<std::size_t>(i)] = grid.min + (grid.max - grid.min) * i / (grid.points - 1);
  }
  out.back() = grid.max;
  return out;
}

struct McRequest {
  SimConfig config;
  unsigned workers = 1;
};

/// Closed-form columns at every threshold, plus simulated columns if requested.
inline RocTable build_roc(const ClosedFormModel& model, const std::vector<double>& gammas,
                          const std::optional<McRequest>& mc = std::nullopt) {
  RocTable table;
  table.rows.reserve(gammas.size());
  for (double g : gammas) {
    const auto p = model.probabilities(EnergyThreshold(g));
    table.rows.push_back({g, p.p_fa, p.p_d, std::nullopt});
  }
  if (mc) {
    const auto est = estimate_roc(model.scenario(), gammas, mc->config, mc->workers);
    for (std::size_t i = 0; i < gammas.size(); ++i) {
      table.rows[i].mc = McColumns{est[i].pfa.estimate, est[i].pfa.ci_low, est[i].pfa.ci_high,
                                   est[i].pd.estimate,  est[i].pd.ci_low,  est[i].pd.ci_high};
    }
  }
  table.validate();
  return table;
}

// ============================================================================
// CSV
// ============================================================================
inline std::string format_number(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

inline void write_csv(const RocTable& table, std::ostream& out) {
  table.validate();
  for (const auto& c : table.comments) out << "# " << c << '\n';
  out << "gamma,pfa_cf,pd_cf";
  if (table.has_mc()) out << ",pfa_mc,pfa_lo,pfa_hi,pd_mc,pd_lo,pd_hi";
  out << '\n';
  for (const auto& r : table.rows) {
    out << format_number(r.gamma) << ',' << format_number(r.pfa_cf) << ',' << format_number(r.pd_cf);
    if (r.mc) {
      for (double v : {r.mc->pfa, r.mc->pfa_lo, r.mc->pfa_hi, r.mc->pd, r.mc->pd_lo, r.mc->pd_hi}) {
        out << ',' << format_number(v);
      }
    }
    out << '\n';
  }
}

inline std::string to_csv(const RocTable& table) {
  std::ostringstream out;
  write_csv(table, out);
  return out.str();
}

inline RocTable parse_csv(std::istream& in) {
  RocTable table;
  std::string line;
  std::optional<std::size_t> columns;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line.front() == '#') {
      table.comments.push_back(line.size() > 2 && line[1] == ' ' ? line.substr(2) : line.substr(1));
      continue;
    }
    if (!columns) {
      if (line == "gamma,pfa_cf,pd_cf") {
        columns = 3;
      } else if (line == "gamma,pfa_cf,pd_cf,pfa_mc,pfa_lo,pfa_hi,pd_mc,pd_lo,pd_hi") {
        columns = 9;
      } else {
        throw ConfigError("roc csv: unrecognised header '" + line + "'");
      }
      continue;
    }
    std::vector<double> values;
    std::stringstream fields(line);
    std::string field;
    while (std::getline(fields, field, ',')) {
      char* end = nullptr;
      const double v = std::strtod(field.c_str(), &end);
      if (field.empty() || end != field.c_str() + field.size()) {
        throw ConfigError("roc csv: bad number '" + field + "' on line " + std::to_string(lineno));
      }
      values.push_back(v);
    }
    if (values.size() != *columns) throw ConfigError("roc csv: wrong field count on line " + std::to_string(lineno));
    RocPoint r{values[0], values[1], values[2], std::nullopt};
    if (*columns == 9) r.mc = McColumns{values[3], values[4], values[5], values[6], values[7], values[8]};
    table.rows.push_back(r);
  }
  if (!columns) throw ConfigError("roc csv: missing header");
  return table;
}

}  // namespace edsense
