#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "ionsim_app/config.hpp"

namespace ionsim::app {

struct Dataset {
  RunConfig config;
  FieldPreparation field;
  std::vector<MeasureSeries> series;  // theta index major, gamma index minor
  std::vector<SuddenEvents> events;   // parallel to series
};

Dataset run_dataset(const RunConfig& cfg);

// Header theta,gamma,nbar,scaled_time,measure,value; rows sorted by
// (theta, gamma, scaled_time); values with 12 significant digits; LF endings.
std::string render_csv(const Dataset& d);
nlohmann::ordered_json render_sidecar(const Dataset& d);

// Writes <prefix>.csv and <prefix>.json.
void write_dataset(const Dataset& d, const std::string& prefix);

}  // namespace ionsim::app
