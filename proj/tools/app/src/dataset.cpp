#include "ionsim_app/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <stdexcept>
#include <tuple>

#include "ionsim/version.hpp"

namespace ionsim::app {

namespace {

std::string g12(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

bool is_half_pi_multiple(double theta) {
  const double k = std::round(theta / (M_PI / 2));
  return std::abs(theta - k * M_PI / 2) <= 1e-12;
}

void write_file(const std::string& path, const std::string& bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write '" + path + "'");
  out << bytes;
  if (!out) throw std::runtime_error("write to '" + path + "' failed");
}

}  // namespace

Dataset run_dataset(const RunConfig& cfg) {
  Dataset d;
  d.config = cfg;
  d.field = coherent_amplitudes_for_cutoff(cfg.params.nbar, cfg.params.fock_cutoff);
  d.series = run_sweep(to_sweep(cfg));
  d.events.reserve(d.series.size());
  for (const auto& s : d.series) {
    d.events.push_back(s.times.size() >= 3 ? detect_sudden_events(s, cfg.event_threshold)
                                           : SuddenEvents{cfg.event_threshold, {}, {}});
  }
  return d;
}

std::string render_csv(const Dataset& d) {
  std::vector<std::size_t> order(d.series.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&d](std::size_t a, std::size_t b) {
    return std::tie(d.series[a].params.theta, d.series[a].params.gamma) <
           std::tie(d.series[b].params.theta, d.series[b].params.gamma);
  });
  std::string out = "theta,gamma,nbar,scaled_time,measure,value\n";
  for (std::size_t idx : order) {
    const auto& s = d.series[idx];
    const std::string head = g12(s.params.theta) + "," + g12(s.params.gamma) + "," + g12(s.params.nbar) + ",";
    const std::string name(to_string(s.measure));
    for (std::size_t i = 0; i < s.times.size(); ++i) {
      out += head;
      out += g12(s.times[i]);
      out += ',';
      out += name;
      out += ',';
      out += g12(s.values[i]);
      out += '\n';
    }
  }
  return out;
}

nlohmann::ordered_json render_sidecar(const Dataset& d) {
  nlohmann::ordered_json j;
  j["version"] = std::string(kVersion);
  j["config"] = to_json(d.config);
  j["truncation"] = {{"fock_cutoff", d.field.cutoff},
                     {"tail_deficit", d.field.tail_deficit},
                     {"deficit_target", d.config.deficit}};

  auto series = nlohmann::ordered_json::array();
  bool any_half_pi = false;
  double half_pi_max = 0.0;
  for (std::size_t i = 0; i < d.series.size(); ++i) {
    const auto& s = d.series[i];
    const auto& ev = d.events[i];
    const double peak = *std::max_element(s.values.begin(), s.values.end());
    nlohmann::ordered_json entry;
    entry["theta"] = s.params.theta;
    entry["gamma"] = s.params.gamma;
    entry["max_value"] = peak;
    entry["births"] = ev.births;
    entry["deaths"] = ev.deaths;
    entry["first_birth"] = ev.births.empty() ? nlohmann::ordered_json(nullptr) : nlohmann::ordered_json(ev.births.front());
    series.push_back(std::move(entry));
    if (is_half_pi_multiple(s.params.theta)) {
      any_half_pi = true;
      half_pi_max = std::max(half_pi_max, peak);
    }
  }
  j["events"] = {{"threshold", d.config.event_threshold}, {"hysteresis_points", 2}, {"series", std::move(series)}};

  nlohmann::ordered_json flag;
  flag["present_in_grid"] = any_half_pi;
  if (any_half_pi) {
    flag["max_value"] = half_pi_max;
    flag["always_zero"] = half_pi_max <= 1e-10;
  }
  j["theta_multiple_of_half_pi"] = std::move(flag);

  j["notes"] = {
      "scaled_time is lambda1 * t",
      "runs start at t0 = 0, the peak of the modulation profile",
      std::string("cut ") + d.config.cut.to_string() + "; factors outside the cut are traced out first",
      "nu, omega1, omega2 are recorded but do not enter the interaction-picture dynamics",
  };
  return j;
}

void write_dataset(const Dataset& d, const std::string& prefix) {
  write_file(prefix + ".csv", render_csv(d));
  write_file(prefix + ".json", render_sidecar(d).dump(2) + "\n");
}

}  // namespace ionsim::app
