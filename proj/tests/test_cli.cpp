#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <gtest/gtest.h>

#include "ionsim/errors.hpp"
#include "ionsim_app/config.hpp"
#include "ionsim_app/dataset.hpp"
#include "ionsim_app/presets.hpp"

using namespace ionsim;
using namespace ionsim::app;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("ionsim_cli_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

void write(const fs::path& p, const std::string& text) { std::ofstream(p, std::ios::binary) << text; }

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

int run_cli(const std::string& args) {
  const std::string cmd = std::string(IONSIM_CLI_PATH) + " " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

int run_cli_capture(const std::string& args, std::string& output) {
  const fs::path log = fs::temp_directory_path() / "ionsim_cli_capture.txt";
  const std::string cmd = std::string(IONSIM_CLI_PATH) + " " + args + " > " + log.string() + " 2>&1";
  const int status = std::system(cmd.c_str());
  output = slurp(log);
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

const char* kMinimal = R"(# three time points at a separable start
[state]
nbar = 2

[sweep]
theta = 0
time = 0, 0.5, 1
)";

}  // namespace

TEST(ConfigGrammar, Reals) {
  EXPECT_DOUBLE_EQ(parse_real("1.5"), 1.5);
  EXPECT_DOUBLE_EQ(parse_real("pi"), M_PI);
  EXPECT_DOUBLE_EQ(parse_real("-pi/2"), -M_PI / 2);
  EXPECT_DOUBLE_EQ(parse_real(" 3*pi/4 "), 3 * M_PI / 4);
  EXPECT_DOUBLE_EQ(parse_real("1e-3"), 1e-3);
  EXPECT_THROW(parse_real("abc"), std::invalid_argument);
  EXPECT_THROW(parse_real(""), std::invalid_argument);
  EXPECT_THROW(parse_real("1/0"), std::invalid_argument);
}

TEST(ConfigGrammar, Grids) {
  EXPECT_EQ(parse_grid("linspace(0, pi, 121)"), linspace(0.0, M_PI, 121));
  EXPECT_EQ(parse_grid("0, 0.5, 1"), (std::vector<double>{0.0, 0.5, 1.0}));
  EXPECT_EQ(parse_grid("pi/4"), std::vector<double>{M_PI / 4});
  EXPECT_THROW(parse_grid("linspace(0, 1, 0)"), std::invalid_argument);
  EXPECT_THROW(parse_grid("0,,1"), std::invalid_argument);
}

TEST(ConfigGrammar, MinimalConfigDefaults) {
  const auto cfg = parse_config_text(kMinimal);
  EXPECT_EQ(cfg.thetas, std::vector<double>{0.0});
  EXPECT_EQ(cfg.times.size(), 3u);
  EXPECT_EQ(cfg.params.lambda2, Complex(0.01, 0.0));
  EXPECT_EQ(cfg.params.fock_cutoff, coherent_amplitudes(2.0, 1e-10).cutoff);
  EXPECT_EQ(cfg.measure, Measure::i_concurrence);
}

TEST(ConfigGrammar, DiagnosticsNameLineAndField) {
  try {
    parse_config_text("[model]\neta = 0.2\nzeta = 1\n");
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("line 3"), std::string::npos) << e.what();
    EXPECT_NE(std::string(e.what()).find("zeta"), std::string::npos);
  }
  try {
    parse_config_text("[state]\nphi = 4\n");
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("line 2"), std::string::npos) << e.what();
    EXPECT_NE(std::string(e.what()).find("state.phi"), std::string::npos) << e.what();
  }
  EXPECT_THROW(parse_config_text("[physics]\n"), ConfigError);
  EXPECT_THROW(parse_config_text("eta = 1\n"), ConfigError);
  EXPECT_THROW(parse_config_text("[model]\neta = 1\neta = 2\n"), ConfigError);
  EXPECT_THROW(parse_config_text("[modulation]\nkind = sech\n"), ConfigError);
  EXPECT_THROW(parse_config_text("[sweep]\ntime = 1, 2\n"), ConfigError);
  EXPECT_THROW(parse_config_text("[sweep]\ncut = ion1|spin\n"), ConfigError);
  EXPECT_THROW(parse_config_text("[sweep]\nmeasure = concurrence\n"), ConfigError);
  EXPECT_THROW(parse_config_text("[model]\nfock_cutoff = 3\n[state]\nnbar = 5\n"), CutoffError);
}

TEST(ConfigJson, RoundTrip) {
  auto cfg = parse_config_text(
      "[model]\nlambda2 = 0.2\nfock_cutoff = 30\n[state]\nnbar = 3\nphi = pi/3\n"
      "[modulation]\nkind = sech\ntau = 2.5\n[sweep]\ntheta = 0, pi/4\ntime = linspace(0, 3, 7)\n"
      "measure = negativity\ncut = ion1|ion2\nthreshold = 0.01\n[output]\nprefix = run\n");
  const auto back = config_from_json(nlohmann::json::parse(to_json(cfg).dump()));
  EXPECT_EQ(to_json(back).dump(), to_json(cfg).dump());
  EXPECT_EQ(back.params.modulation, Modulation(SechModulation{2.5}));
  EXPECT_EQ(back.cut, Bipartition::parse("ion1|ion2"));
  nlohmann::json bad = nlohmann::json::parse(to_json(cfg).dump());
  bad["model"]["unknown"] = 1;
  EXPECT_THROW(config_from_json(bad), ConfigError);
}

TEST(Dataset, CsvLayout) {
  auto cfg = parse_config_text(kMinimal);
  cfg.thetas = {M_PI / 4, 0.0};
  cfg.gammas = {0.0};
  const auto d = run_dataset(cfg);
  const std::string csv = render_csv(d);
  std::istringstream in(csv);
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, "theta,gamma,nbar,scaled_time,measure,value");
  int rows = 0;
  std::string first;
  while (std::getline(in, line)) {
    if (rows == 0) first = line;
    ++rows;
  }
  EXPECT_EQ(rows, 6);
  EXPECT_EQ(first, "0,0,2,0,i_concurrence,0");  // sorted by theta
  EXPECT_EQ(csv.find('\r'), std::string::npos);
}

TEST(Dataset, FigurePresets) {
  const auto f1 = figure_preset("fig1");
  const auto f2 = figure_preset("fig2");
  EXPECT_EQ(f1.params.nbar, 5.0);
  EXPECT_EQ(f2.params.nbar, 15.0);
  EXPECT_EQ(f1.thetas.size(), 121u);
  EXPECT_EQ(f1.times.size(), 601u);
  EXPECT_EQ(f1.params.lambda2, Complex(0.01, 0.0));
  EXPECT_EQ(f1.params.phi, 0.0);
  auto j1 = to_json(f1), j2 = to_json(f2);
  j1.erase("label");
  j2.erase("label");
  j1["output"].erase("prefix");
  j2["output"].erase("prefix");
  j1["model"].erase("fock_cutoff");
  j2["model"].erase("fock_cutoff");
  j2["state"]["nbar"] = 5.0;
  EXPECT_EQ(j1.dump(), j2.dump());

  const auto f3 = figure_preset("fig3");
  EXPECT_EQ(f3.thetas, std::vector<double>{M_PI / 4});
  EXPECT_EQ(f3.gammas.size(), 11u);
  EXPECT_EQ(f3.measure, Measure::relative_entropy);
  EXPECT_THROW(figure_preset("fig4"), ConfigError);
  EXPECT_EQ(figure_preset("fig4", 5.0).params.modulation, Modulation(SechModulation{5.0}));
  EXPECT_THROW(figure_preset("fig5"), ConfigError);
}

TEST(Cli, MinimalSimulate) {
  const auto dir = scratch("minimal");
  write(dir / "run.ini", kMinimal);
  ASSERT_EQ(run_cli("simulate --config " + (dir / "run.ini").string() + " --out " + (dir / "out").string()), 0);
  std::istringstream in(slurp(dir / "out.csv"));
  std::string line;
  std::getline(in, line);
  int rows = 0;
  while (std::getline(in, line)) {
    ++rows;
    if (rows == 1) EXPECT_EQ(line.substr(line.rfind(',') + 1), "0");
  }
  EXPECT_EQ(rows, 3);
  const auto side = nlohmann::json::parse(slurp(dir / "out.json"));
  EXPECT_EQ(side["config"]["model"]["lambda2"], 0.01);
  EXPECT_EQ(side["config"]["state"]["phi"], 0.0);
  EXPECT_TRUE(side.contains("truncation"));
  EXPECT_TRUE(side.contains("events"));
}

TEST(Cli, SidecarRoundTrip) {
  const auto dir = scratch("roundtrip");
  write(dir / "run.ini",
        "[state]\nnbar = 1.5\n[sweep]\ntheta = 0, pi/6, pi/4\ngamma = 0, 0.02\n"
        "time = linspace(0, 10, 21)\nmeasure = relative_entropy\ncut = ion1|ion2\n");
  ASSERT_EQ(run_cli("simulate --config " + (dir / "run.ini").string() + " --out " + (dir / "a").string()), 0);
  ASSERT_EQ(run_cli("simulate --config " + (dir / "a.json").string() + " --out " + (dir / "b").string()), 0);
  EXPECT_EQ(slurp(dir / "a.csv"), slurp(dir / "b.csv"));
  auto ja = nlohmann::json::parse(slurp(dir / "a.json"));
  auto jb = nlohmann::json::parse(slurp(dir / "b.json"));
  ja["config"]["output"].erase("prefix");
  jb["config"]["output"].erase("prefix");
  EXPECT_EQ(ja, jb);
}

TEST(Cli, ExitCodes) {
  const auto dir = scratch("exit");
  write(dir / "sech.ini",
        "[modulation]\nkind = sech\ntau = 5\n[sweep]\ngamma = 0.05\nmeasure = negativity\ncut = ion1|ion2\n"
        "theta = pi/4\ntime = 0, 1, 2\n");
  std::string out;
  EXPECT_EQ(run_cli_capture("simulate --config " + (dir / "sech.ini").string() + " --out " + (dir / "x").string(), out), 3);
  EXPECT_NE(out.find("time-independent"), std::string::npos) << out;

  write(dir / "bad.ini", "[model]\nfoo = 1\n");
  EXPECT_EQ(run_cli_capture("simulate --config " + (dir / "bad.ini").string(), out), 2);
  EXPECT_NE(out.find("line 2"), std::string::npos) << out;
  EXPECT_EQ(run_cli("simulate --config " + (dir / "missing.ini").string()), 2);
  EXPECT_EQ(run_cli("figure fig4 --out " + (dir / "f4").string()), 2);
  EXPECT_EQ(run_cli("--version"), 0);
}

TEST(Cli, Selftest) {
  std::string out;
  EXPECT_EQ(run_cli_capture("selftest", out), 0);
  EXPECT_NE(out.find("max_dev="), std::string::npos);
  EXPECT_EQ(out.find("[FAIL]"), std::string::npos) << out;
#ifdef IONSIM_MUTATION_HOOKS
  EXPECT_EQ(run_cli_capture("selftest --no-claims --mutate-mode-strength 1e-6", out), 1);
  EXPECT_NE(out.find("[FAIL] mode_strength closed form"), std::string::npos) << out;
#endif
}

TEST(Cli, Fig4SidecarHasFirstBirths) {
  const auto dir = scratch("fig4");
  ASSERT_EQ(run_cli("figure fig4 --tau 5 --out " + (dir / "f4").string()), 0);
  const auto side = nlohmann::json::parse(slurp(dir / "f4.json"));
  const auto& series = side["events"]["series"];
  ASSERT_EQ(series.size(), 121u);
  for (const auto& s : series) EXPECT_TRUE(s.contains("first_birth"));
  EXPECT_EQ(side["config"]["modulation"]["tau"], 5.0);
}
