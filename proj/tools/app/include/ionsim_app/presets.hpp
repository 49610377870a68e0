#pragma once

#include <optional>
#include <string_view>
#include <vector>

#include "ionsim_app/config.hpp"

namespace ionsim::app {

// fig1..fig4. fig4 requires tau; throws ConfigError otherwise.
RunConfig figure_preset(std::string_view name, std::optional<double> tau = std::nullopt);
std::vector<std::string_view> figure_names();

}  // namespace ionsim::app
