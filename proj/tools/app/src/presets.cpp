#include "ionsim_app/presets.hpp"

#include <string>

namespace ionsim::app {

namespace {

RunConfig surface(std::string_view name, double nbar) {
  RunConfig cfg;
  cfg.label = std::string(name);
  cfg.prefix = std::string(name);
  cfg.params.lambda1 = 1.0;
  cfg.params.lambda2 = 0.01;
  cfg.params.phi = 0.0;
  cfg.params.nbar = nbar;
  cfg.measure = Measure::i_concurrence;
  cfg.cut = default_cut(Measure::i_concurrence);
  cfg.thetas = linspace(0.0, M_PI, 121);
  cfg.gammas = {0.0};
  cfg.times = linspace(0.0, 30.0, 601);
  return cfg;
}

}  // namespace

std::vector<std::string_view> figure_names() { return {"fig1", "fig2", "fig3", "fig4"}; }

RunConfig figure_preset(std::string_view name, std::optional<double> tau) {
  RunConfig cfg;
  if (name == "fig1") {
    cfg = surface(name, 5.0);
  } else if (name == "fig2") {
    cfg = surface(name, 15.0);
  } else if (name == "fig3") {
    cfg = surface(name, 5.0);
    cfg.thetas = {M_PI / 4};
    cfg.gammas = linspace(0.0, 0.1, 11);
    cfg.measure = Measure::relative_entropy;
    cfg.cut = Bipartition::parse("ion1|ion2");
  } else if (name == "fig4") {
    if (!tau) throw ConfigError("fig4 needs an explicit --tau (no default switching time)");
    cfg = surface(name, 5.0);
    cfg.params.modulation = SechModulation{*tau};
  } else {
    throw ConfigError("unknown figure '" + std::string(name) + "' (fig1, fig2, fig3, fig4)");
  }
  if (tau && name != "fig4") throw ConfigError("--tau applies to fig4 only");
  finalize(cfg);
  return cfg;
}

}  // namespace ionsim::app
