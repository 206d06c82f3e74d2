// ============================================================================
// edsense -- energy-detector sensing probabilities from the command line
//
//   edsense roc       --config scn.json [--gamma-min A --gamma-max B --points N]
//                     [--mc --trials N --seed S] [--out roc.csv]
//   edsense threshold --config scn.json --target-pfa 0.1
//   edsense validate  --config scn.json [--trials N --seed S --points N] [--out report.json]
//   edsense figure    fig1|fig2|fig3 --out DIR [--mc --trials N --seed S]
//
// Exit codes: 0 ok, 2 configuration error, 3 numerical failure,
// 4 validation FAIL.
// ============================================================================
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "edsense/edsense.hpp"

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitNumerical = 3;
constexpr int kExitValidationFail = 4;

// Writes via a sibling temporary and renames, so a failed run leaves no file.
void write_file_atomically(const std::filesystem::path& path, const std::string& content) {
  auto tmp = path;
  tmp += ".partial";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw edsense::ConfigError("cannot write '" + tmp.string() + "'");
    out << content;
    if (!out) throw edsense::ConfigError("write failed for '" + tmp.string() + "'");
  }
  std::filesystem::rename(tmp, path);
}

void emit(const std::string& out_path, const std::string& content) {
  if (out_path.empty() || out_path == "-") {
    std::cout << content;
  } else {
    write_file_atomically(out_path, content);
  }
}

std::string print12(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

struct GridOptions {
  std::optional<double> gamma_min;
  std::optional<double> gamma_max;
  int points = 50;
};

edsense::GammaGridSpec grid_spec(const GridOptions& g) {
  if (!g.gamma_min && !g.gamma_max) return {true, 0.0, 0.0, g.points};
  if (!g.gamma_min || !g.gamma_max) throw edsense::ConfigError("--gamma-min and --gamma-max must be given together");
  return {false, *g.gamma_min, *g.gamma_max, g.points};
}

struct McOptions {
  bool enabled = false;
  std::uint64_t trials = 10000;
  std::uint64_t seed = 1;
  unsigned workers = 1;

  [[nodiscard]] std::optional<edsense::McRequest> request() const {
    if (!enabled) return std::nullopt;
    return edsense::McRequest{{trials, seed, edsense::SimHypothesis::pu1_busy}, workers};
  }
};

int cmd_roc(const std::string& config, const GridOptions& grid, const McOptions& mc, const std::string& out) {
  const auto scn = edsense::load_scenario(config);
  const edsense::ClosedFormModel model(scn);
  auto table = edsense::build_roc(model, edsense::make_gamma_grid(model, grid_spec(grid)), mc.request());
  table.comments.push_back("scenario: " + edsense::scenario_to_json(scn).dump());
  emit(out, edsense::to_csv(table));
  return 0;
}

int cmd_threshold(const std::string& config, double target) {
  const auto scn = edsense::load_scenario(config);
  const edsense::ClosedFormModel model(scn);
  const auto gamma = model.solve_threshold(target);
  std::cout << "gamma " << print12(gamma.value()) << '\n'
            << "achieved_pfa " << print12(model.false_alarm_probability(gamma)) << '\n';
  return 0;
}

int cmd_validate(const std::string& config, const edsense::ValidationOptions& opt, const std::string& out) {
  const auto scn = edsense::load_scenario(config);
  const auto report = edsense::run_validation(scn, opt);
  emit(out, edsense::report_to_string(report));
  std::cerr << (report.pass() ? "PASS" : "FAIL") << ": " << report.misses << " of " << report.comparisons
            << " closed-form values outside the 95% Wilson interval (allowed " << report.allowed_misses << ")\n";
  return report.pass() ? 0 : kExitValidationFail;
}

int cmd_figure(const std::string& name, const std::string& out_dir, const McOptions& mc) {
  const auto presets = edsense::figure_presets(name);
  std::filesystem::create_directories(out_dir);
  for (const auto& preset : presets) {
    const edsense::ClosedFormModel model(preset.scenario);
    auto table = edsense::build_roc(model, edsense::make_gamma_grid(model, {}), mc.request());
    table.comments.push_back("figure: " + name);
    table.comments.push_back("curve: " + preset.name);
    table.comments.push_back("description: " + preset.description);
    table.comments.push_back("scenario: " + edsense::scenario_to_json(preset.scenario).dump());
    if (mc.enabled) {
      table.comments.push_back("monte_carlo: trials=" + std::to_string(mc.trials) + " seed=" + std::to_string(mc.seed));
    }
    write_file_atomically(std::filesystem::path(out_dir) / (preset.name + ".csv"), edsense::to_csv(table));
  }
  return 0;
}

void add_mc_flags(CLI::App* cmd, McOptions& mc) {
  cmd->add_flag("--mc", mc.enabled, "Add Monte Carlo columns with Wilson 95% intervals");
  cmd->add_option("--trials", mc.trials, "Monte Carlo trials per hypothesis")->check(CLI::PositiveNumber);
  cmd->add_option("--seed", mc.seed, "Monte Carlo seed");
  cmd->add_option("--workers", mc.workers, "Worker threads")->check(CLI::PositiveNumber);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Energy-detector spectrum sensing with multiple primary users over Nakagami-m fading"};
  app.require_subcommand(1);

  std::string config;
  std::string out;

  GridOptions grid;
  McOptions roc_mc;
  auto* roc = app.add_subcommand("roc", "Closed-form (and optional Monte Carlo) ROC table as CSV");
  roc->add_option("--config", config, "Scenario JSON file")->required();
  roc->add_option("--gamma-min", grid.gamma_min, "Smallest threshold (linear grid)");
  roc->add_option("--gamma-max", grid.gamma_max, "Largest threshold (linear grid)");
  roc->add_option("--points", grid.points, "Number of thresholds")->check(CLI::PositiveNumber);
  roc->add_option("--out", out, "Output CSV path (default stdout)");
  add_mc_flags(roc, roc_mc);

  double target_pfa = 0.1;
  auto* threshold = app.add_subcommand("threshold", "Threshold achieving a target false-alarm probability");
  threshold->add_option("--config", config, "Scenario JSON file")->required();
  threshold->add_option("--target-pfa", target_pfa, "Target false-alarm probability in (0,1)")->required();

  edsense::ValidationOptions vopt;
  auto* validate = app.add_subcommand("validate", "Check closed form against Monte Carlo; JSON report");
  validate->add_option("--config", config, "Scenario JSON file")->required();
  validate->add_option("--trials", vopt.trials, "Monte Carlo trials per hypothesis (>= 10000)");
  validate->add_option("--seed", vopt.seed, "Monte Carlo seed");
  validate->add_option("--points", vopt.gamma_count, "Number of thresholds compared");
  validate->add_option("--workers", vopt.workers, "Worker threads")->check(CLI::PositiveNumber);
  validate->add_option("--out", out, "Output JSON path (default stdout)");

  std::string figure_name;
  std::string figure_dir = ".";
  McOptions fig_mc;
  auto* figure = app.add_subcommand("figure", "Write the CSV curves of a reference figure");
  figure->add_option("name", figure_name, "fig1, fig2 or fig3")->required();
  figure->add_option("--out", figure_dir, "Output directory");
  add_mc_flags(figure, fig_mc);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfig;
  }

  try {
    if (*roc) return cmd_roc(config, grid, roc_mc, out);
    if (*threshold) return cmd_threshold(config, target_pfa);
    if (*validate) return cmd_validate(config, vopt, out);
    if (*figure) return cmd_figure(figure_name, figure_dir, fig_mc);
  } catch (const edsense::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const edsense::SizeError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const edsense::DomainError& e) {
    std::cerr << "invalid argument: " << e.what() << '\n';
    return kExitConfig;
  } catch (const edsense::ConvergenceError& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return kExitNumerical;
  } catch (const edsense::ConditioningError& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return kExitNumerical;
  } catch (const std::filesystem::filesystem_error& e) {
    std::cerr << "io error: " << e.what() << '\n';
    return kExitConfig;
  }
  return 0;
}
