#pragma once

// Run configuration for the command-line tool: an INI-style text grammar and
// a JSON form (the sidecar's "config" member). Both map onto RunConfig.

#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "ionsim/experiments.hpp"

namespace ionsim::app {

// Invalid configuration; the message carries the line and field.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct RunConfig {
  std::string label;   // preset name or empty
  SimParams params;    // theta and gamma come from the grids
  bool auto_cutoff = true;
  double deficit = 1e-10;
  Measure measure = Measure::i_concurrence;
  Bipartition cut = default_cut(Measure::i_concurrence);
  std::vector<double> thetas = linspace(0.0, M_PI, 121);
  std::vector<double> gammas{0.0};
  std::vector<double> times = linspace(0.0, 30.0, 601);
  double event_threshold = 1e-3;
  std::string prefix = "ionsim_out";
  int workers = 1;  // execution knob, not serialized
};

// "1.5", "pi", "-pi/2", "3*pi/4", "1e-3".
double parse_real(std::string_view text);
// "linspace(a, b, n)" or a comma-separated list of reals.
std::vector<double> parse_grid(std::string_view text);

RunConfig parse_config_text(std::string_view text);
// Dispatches on content: a file starting with '{' is JSON (a bare config or
// a sidecar with a "config" member), anything else is the INI grammar.
RunConfig load_config(const std::string& path);

// Resolves the Fock cutoff and checks every value; throws ConfigError.
void finalize(RunConfig& cfg);

nlohmann::ordered_json to_json(const RunConfig& cfg);
RunConfig config_from_json(const nlohmann::json& j);

SweepRequest to_sweep(const RunConfig& cfg);

}  // namespace ionsim::app
