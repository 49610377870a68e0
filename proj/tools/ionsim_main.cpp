#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "ionsim/errors.hpp"
#include "ionsim/version.hpp"
#include "ionsim_app/config.hpp"
#include "ionsim_app/dataset.hpp"
#include "ionsim_app/presets.hpp"
#include "ionsim_app/selftest.hpp"

namespace {

enum Exit { kOk = 0, kSelftestFailed = 1, kConfigError = 2, kInfeasible = 3 };

int emit(ionsim::app::RunConfig cfg, const std::optional<std::string>& out, std::optional<int> workers) {
  if (out) cfg.prefix = *out;
  if (workers) cfg.workers = *workers;
  ionsim::app::finalize(cfg);
  const auto data = ionsim::app::run_dataset(cfg);
  ionsim::app::write_dataset(data, cfg.prefix);
  std::cout << "wrote " << cfg.prefix << ".csv (" << data.series.size() * cfg.times.size() << " rows) and "
            << cfg.prefix << ".json\n";
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Two trapped three-level ions coupled to a vibrational mode"};
  app.set_version_flag("--version", std::string("ionsim ") + ionsim::kVersion);
  app.require_subcommand(1);

  std::string config_path;
  std::optional<std::string> out;
  std::optional<int> workers;
  auto* simulate = app.add_subcommand("simulate", "Run a configured sweep and write CSV + JSON sidecar");
  simulate->add_option("--config", config_path, "Config file (INI grammar or JSON sidecar)")->required();
  simulate->add_option("--out", out, "Output path prefix");
  simulate->add_option("--workers", workers, "Worker threads")->check(CLI::PositiveNumber);

  std::string figure_name;
  std::optional<double> tau;
  auto* figure = app.add_subcommand("figure", "Run a figure preset");
  figure->add_option("name", figure_name, "fig1, fig2, fig3 or fig4")->required();
  figure->add_option("--tau", tau, "Switching time for the sech profile (fig4)");
  figure->add_option("--out", out, "Output path prefix");
  figure->add_option("--workers", workers, "Worker threads")->check(CLI::PositiveNumber);

  bool no_claims = false;
  auto* selftest = app.add_subcommand("selftest", "Run the oracle checks");
  selftest->add_flag("--no-claims", no_claims, "Skip the qualitative reports");
#ifdef IONSIM_MUTATION_HOOKS
  double mutate = 0.0;
  selftest->add_option("--mutate-mode-strength", mutate, "Negative control: add an offset to mode_strength");
#endif

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfigError;
  }

  try {
    if (*simulate) return emit(ionsim::app::load_config(config_path), out, workers);
    if (*figure) return emit(ionsim::app::figure_preset(figure_name, tau), out, workers);
    if (*selftest) {
#ifdef IONSIM_MUTATION_HOOKS
      std::optional<ionsim::testing::ScopedModeStrengthMutation> mutation;
      if (mutate != 0.0) {
        mutation.emplace(mutate);
        std::cout << "mutation hook active: mode_strength offset " << mutate << "\n";
      }
#endif
      return ionsim::app::run_selftest(std::cout, !no_claims) == 0 ? kOk : kSelftestFailed;
    }
  } catch (const ionsim::app::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kConfigError;
  } catch (const ionsim::UnsupportedRegime& e) {
    std::cerr << "infeasible run: " << e.what() << "\n";
    return kInfeasible;
  } catch (const ionsim::CutoffError& e) {
    std::cerr << "cutoff error: " << e.what() << "\n";
    return kInfeasible;
  } catch (const std::invalid_argument& e) {
    std::cerr << "invalid input: " << e.what() << "\n";
    return kConfigError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInfeasible;
  }
  return kOk;
}
