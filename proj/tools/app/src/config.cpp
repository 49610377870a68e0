#include "ionsim_app/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <optional>
#include <regex>
#include <sstream>

#include "ionsim/errors.hpp"

namespace ionsim::app {

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

double parse_number(const std::string& tok) {
  if (tok == "pi") return M_PI;
  double v = 0.0;
  const auto* end = tok.data() + tok.size();
  const auto [ptr, ec] = std::from_chars(tok.data(), end, v);
  if (ec != std::errc() || ptr != end || tok.empty()) {
    throw std::invalid_argument("'" + tok + "' is not a number");
  }
  return v;
}

int parse_int(const std::string& text) {
  int v = 0;
  const auto* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, v);
  if (ec != std::errc() || ptr != end || text.empty()) {
    throw std::invalid_argument("'" + text + "' is not an integer");
  }
  return v;
}

bool parse_bool(const std::string& text) {
  if (text == "true") return true;
  if (text == "false") return false;
  throw std::invalid_argument("'" + text + "' is not true or false");
}

// A field-level failure; turned into ConfigError with line context.
struct FieldError {
  std::string field;
  std::string message;
};

struct Pending {
  std::string modulation_kind = "constant";
  std::optional<double> tau;
  std::optional<std::string> cutoff;  // "auto" or an integer
};

Modulation make_modulation(const Pending& p) {
  if (p.modulation_kind == "constant") {
    if (p.tau) throw FieldError{"modulation.tau", "tau is only meaningful for kind = sech"};
    return ConstantModulation{};
  }
  if (p.modulation_kind == "sech") {
    if (!p.tau) throw FieldError{"modulation.tau", "sech modulation requires an explicit tau"};
    return SechModulation{*p.tau};
  }
  throw FieldError{"modulation.kind", "unknown modulation '" + p.modulation_kind + "' (constant, sech)"};
}

void apply_cutoff(RunConfig& cfg, const Pending& p) {
  if (!p.cutoff || *p.cutoff == "auto") {
    cfg.auto_cutoff = true;
    return;
  }
  cfg.auto_cutoff = false;
  try {
    cfg.params.fock_cutoff = parse_int(*p.cutoff);
  } catch (const std::invalid_argument& e) {
    throw FieldError{"model.fock_cutoff", std::string(e.what()) + " (expected an integer or auto)"};
  }
}

// Config key named by a SimParams validation message.
std::string field_of(const std::string& message, const char* fallback) {
  static const std::vector<std::pair<std::string, std::string>> prefixes{
      {"eta", "model.eta"},     {"epsilon", "model.epsilon"}, {"couplings", "model.lambda1"},
      {"nbar", "state.nbar"},   {"phi", "state.phi"},         {"sech", "modulation.tau"},
      {"theta", "sweep.theta"}, {"gamma", "sweep.gamma"},     {"fock_cutoff", "model.fock_cutoff"}};
  for (const auto& [word, field] : prefixes) {
    if (message.rfind(word, 0) == 0) return field;
  }
  return fallback;
}

void check(RunConfig& cfg) {
  auto need = [](bool ok, const char* field, const std::string& msg) {
    if (!ok) throw FieldError{field, msg};
  };
  need(cfg.deficit > 0.0 && cfg.deficit < 1.0, "state.deficit", "deficit must lie in (0, 1)");
  need(cfg.event_threshold > 0.0, "sweep.threshold", "threshold must be > 0");
  need(cfg.workers >= 1, "sweep.workers", "workers must be >= 1");
  need(!cfg.thetas.empty(), "sweep.theta", "grid is empty");
  need(!cfg.gammas.empty(), "sweep.gamma", "grid is empty");
  need(!cfg.prefix.empty(), "output.prefix", "prefix is empty");
  try {
    validate_time_grid(cfg.times);
  } catch (const std::invalid_argument& e) {
    throw FieldError{"sweep.time", e.what()};
  }

  if (cfg.auto_cutoff) {
    try {
      cfg.params.fock_cutoff = coherent_amplitudes(cfg.params.nbar, cfg.deficit).cutoff;
    } catch (const std::invalid_argument& e) {
      throw FieldError{"state.nbar", e.what()};
    }
  } else {
    need(cfg.params.fock_cutoff >= 2, "model.fock_cutoff", "fock_cutoff must be >= 2");
    const double tail = coherent_amplitudes_for_cutoff(cfg.params.nbar, cfg.params.fock_cutoff).tail_deficit;
    if (tail > cfg.deficit) {
      std::ostringstream msg;
      msg << "fock_cutoff " << cfg.params.fock_cutoff << " leaves a Poisson tail of " << tail
          << " above the deficit target " << cfg.deficit;
      throw CutoffError(msg.str());
    }
  }

  const HilbertLayout layout = ion_layout(cfg.params.fock_cutoff);
  for (const auto& l : cfg.cut.labels()) {
    need(layout.contains(l), "sweep.cut", "unknown factor '" + l + "' (ion1, ion2, field)");
  }

  SimParams p = cfg.params;
  auto validate_as = [&p](const char* fallback) {
    try {
      p.validate();
    } catch (const std::invalid_argument& e) {
      throw FieldError{field_of(e.what(), fallback), e.what()};
    }
  };
  validate_as("model");
  for (double th : cfg.thetas) {
    p.theta = th;
    validate_as("sweep.theta");
  }
  for (double g : cfg.gammas) {
    p.gamma = g;
    validate_as("sweep.gamma");
  }
}

using Setter = std::function<void(RunConfig&, Pending&, const std::string&)>;

const std::map<std::string, Setter>& setters() {
  static const std::map<std::string, Setter> table = {
      {"model.lambda1", [](RunConfig& c, Pending&, const std::string& v) { c.params.lambda1 = parse_real(v); }},
      {"model.lambda2", [](RunConfig& c, Pending&, const std::string& v) { c.params.lambda2 = parse_real(v); }},
      {"model.eta", [](RunConfig& c, Pending&, const std::string& v) { c.params.eta = parse_real(v); }},
      {"model.epsilon", [](RunConfig& c, Pending&, const std::string& v) { c.params.epsilon = parse_real(v); }},
      {"model.fock_cutoff", [](RunConfig&, Pending& p, const std::string& v) { p.cutoff = v; }},
      {"model.standard_matrix_element",
       [](RunConfig& c, Pending&, const std::string& v) { c.params.standard_matrix_element = parse_bool(v); }},
      {"model.nu", [](RunConfig& c, Pending&, const std::string& v) { c.params.nu = parse_real(v); }},
      {"model.omega1", [](RunConfig& c, Pending&, const std::string& v) { c.params.omega1 = parse_real(v); }},
      {"model.omega2", [](RunConfig& c, Pending&, const std::string& v) { c.params.omega2 = parse_real(v); }},
      {"state.nbar", [](RunConfig& c, Pending&, const std::string& v) { c.params.nbar = parse_real(v); }},
      {"state.phi", [](RunConfig& c, Pending&, const std::string& v) { c.params.phi = parse_real(v); }},
      {"state.deficit", [](RunConfig& c, Pending&, const std::string& v) { c.deficit = parse_real(v); }},
      {"modulation.kind", [](RunConfig&, Pending& p, const std::string& v) { p.modulation_kind = v; }},
      {"modulation.tau", [](RunConfig&, Pending& p, const std::string& v) { p.tau = parse_real(v); }},
      {"sweep.theta", [](RunConfig& c, Pending&, const std::string& v) { c.thetas = parse_grid(v); }},
      {"sweep.gamma", [](RunConfig& c, Pending&, const std::string& v) { c.gammas = parse_grid(v); }},
      {"sweep.time", [](RunConfig& c, Pending&, const std::string& v) { c.times = parse_grid(v); }},
      {"sweep.measure", [](RunConfig& c, Pending&, const std::string& v) { c.measure = parse_measure(v); }},
      {"sweep.cut", [](RunConfig& c, Pending&, const std::string& v) { c.cut = Bipartition::parse(v); }},
      {"sweep.threshold", [](RunConfig& c, Pending&, const std::string& v) { c.event_threshold = parse_real(v); }},
      {"sweep.workers", [](RunConfig& c, Pending&, const std::string& v) { c.workers = parse_int(v); }},
      {"output.prefix", [](RunConfig& c, Pending&, const std::string& v) { c.prefix = v; }},
      {"output.label", [](RunConfig& c, Pending&, const std::string& v) { c.label = v; }},
  };
  return table;
}

const std::vector<std::string> kSections{"model", "state", "modulation", "sweep", "output"};

}  // namespace

double parse_real(std::string_view text) {
  std::string s = trim(text);
  if (s.empty()) throw std::invalid_argument("empty number");
  double sign = 1.0;
  if (s.front() == '-' || s.front() == '+') {
    if (s.front() == '-') sign = -1.0;
    s = trim(std::string_view(s).substr(1));
  }
  double acc = 1.0;
  char op = '*';
  std::size_t start = 0;
  while (true) {
    const auto pos = s.find_first_of("*/", start);
    const std::string tok = trim(std::string_view(s).substr(start, pos == std::string::npos ? std::string::npos : pos - start));
    const double v = parse_number(tok);
    acc = op == '*' ? acc * v : acc / v;
    if (pos == std::string::npos) break;
    op = s[pos];
    start = pos + 1;
  }
  if (!std::isfinite(acc)) throw std::invalid_argument("'" + std::string(text) + "' is not finite");
  return sign * acc;
}

std::vector<double> parse_grid(std::string_view text) {
  static const std::regex linspace_re(R"(^\s*linspace\s*\(([^,]+),([^,]+),([^,]+)\)\s*$)");
  const std::string s(text);
  std::smatch m;
  if (std::regex_match(s, m, linspace_re)) {
    const int n = parse_int(trim(m[3].str()));
    if (n < 1) throw std::invalid_argument("linspace needs at least one point");
    return linspace(parse_real(m[1].str()), parse_real(m[2].str()), static_cast<std::size_t>(n));
  }
  std::vector<double> out;
  std::size_t start = 0;
  while (true) {
    const auto comma = s.find(',', start);
    out.push_back(parse_real(std::string_view(s).substr(start, comma == std::string::npos ? std::string::npos : comma - start)));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return out;
}

RunConfig parse_config_text(std::string_view text) {
  RunConfig cfg;
  Pending pending;
  std::map<std::string, int> line_of;
  std::string section;
  std::istringstream in{std::string(text)};
  std::string raw;
  int line_no = 0;
  auto fail = [&line_no](const std::string& msg) {
    throw ConfigError("line " + std::to_string(line_no) + ": " + msg);
  };
  while (std::getline(in, raw)) {
    ++line_no;
    const auto hash = raw.find_first_of("#;");
    const std::string line = trim(std::string_view(raw).substr(0, hash));
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') fail("malformed section header");
      section = trim(std::string_view(line).substr(1, line.size() - 2));
      if (std::find(kSections.begin(), kSections.end(), section) == kSections.end()) {
        fail("unknown section [" + section + "]");
      }
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) fail("expected key = value");
    if (section.empty()) fail("key outside of any section");
    const std::string key = trim(std::string_view(line).substr(0, eq));
    const std::string value = trim(std::string_view(line).substr(eq + 1));
    const std::string field = section + "." + key;
    const auto it = setters().find(field);
    if (it == setters().end()) fail("unknown key '" + key + "' in [" + section + "]");
    if (line_of.count(field)) fail("duplicate key '" + field + "'");
    line_of[field] = line_no;
    try {
      it->second(cfg, pending, value);
    } catch (const std::invalid_argument& e) {
      fail("field '" + field + "': " + e.what());
    }
  }
  try {
    cfg.params.modulation = make_modulation(pending);
    apply_cutoff(cfg, pending);
    check(cfg);
  } catch (const FieldError& e) {
    const auto it = line_of.find(e.field);
    const std::string where = it != line_of.end() ? "line " + std::to_string(it->second) + ": " : "";
    throw ConfigError(where + "field '" + e.field + "': " + e.message);
  }
  return cfg;
}

namespace {

template <class T>
T get(const nlohmann::json& obj, const char* key, const std::string& field) {
  try {
    return obj.at(key).get<T>();
  } catch (const nlohmann::json::exception& e) {
    throw FieldError{field, e.what()};
  }
}

void reject_unknown(const nlohmann::json& obj, std::initializer_list<const char*> known, const std::string& where) {
  if (!obj.is_object()) throw FieldError{where, "expected an object"};
  for (const auto& [k, v] : obj.items()) {
    if (std::none_of(known.begin(), known.end(), [&k](const char* s) { return k == s; })) {
      throw FieldError{where.empty() ? k : where + "." + k, "unknown key"};
    }
  }
}

}  // namespace

RunConfig config_from_json(const nlohmann::json& j) {
  RunConfig cfg;
  Pending pending;
  try {
    reject_unknown(j, {"label", "model", "state", "modulation", "sweep", "output"}, "");
    if (j.contains("label")) cfg.label = get<std::string>(j, "label", "label");
    if (j.contains("model")) {
      const auto& m = j["model"];
      reject_unknown(m, {"lambda1", "lambda2", "eta", "epsilon", "fock_cutoff", "standard_matrix_element", "nu",
                         "omega1", "omega2"},
                     "model");
      if (m.contains("lambda1")) cfg.params.lambda1 = get<double>(m, "lambda1", "model.lambda1");
      if (m.contains("lambda2")) cfg.params.lambda2 = get<double>(m, "lambda2", "model.lambda2");
      if (m.contains("eta")) cfg.params.eta = get<double>(m, "eta", "model.eta");
      if (m.contains("epsilon")) cfg.params.epsilon = get<double>(m, "epsilon", "model.epsilon");
      if (m.contains("fock_cutoff")) {
        const auto& fc = m["fock_cutoff"];
        pending.cutoff = fc.is_string() ? fc.get<std::string>() : std::to_string(get<int>(m, "fock_cutoff", "model.fock_cutoff"));
      }
      if (m.contains("standard_matrix_element")) {
        cfg.params.standard_matrix_element = get<bool>(m, "standard_matrix_element", "model.standard_matrix_element");
      }
      if (m.contains("nu")) cfg.params.nu = get<double>(m, "nu", "model.nu");
      if (m.contains("omega1")) cfg.params.omega1 = get<double>(m, "omega1", "model.omega1");
      if (m.contains("omega2")) cfg.params.omega2 = get<double>(m, "omega2", "model.omega2");
    }
    if (j.contains("state")) {
      const auto& s = j["state"];
      reject_unknown(s, {"nbar", "phi", "deficit"}, "state");
      if (s.contains("nbar")) cfg.params.nbar = get<double>(s, "nbar", "state.nbar");
      if (s.contains("phi")) cfg.params.phi = get<double>(s, "phi", "state.phi");
      if (s.contains("deficit")) cfg.deficit = get<double>(s, "deficit", "state.deficit");
    }
    if (j.contains("modulation")) {
      const auto& md = j["modulation"];
      reject_unknown(md, {"kind", "tau"}, "modulation");
      if (md.contains("kind")) pending.modulation_kind = get<std::string>(md, "kind", "modulation.kind");
      if (md.contains("tau")) pending.tau = get<double>(md, "tau", "modulation.tau");
    }
    if (j.contains("sweep")) {
      const auto& sw = j["sweep"];
      reject_unknown(sw, {"theta", "gamma", "time", "measure", "cut", "threshold", "workers"}, "sweep");
      if (sw.contains("theta")) cfg.thetas = get<std::vector<double>>(sw, "theta", "sweep.theta");
      if (sw.contains("gamma")) cfg.gammas = get<std::vector<double>>(sw, "gamma", "sweep.gamma");
      if (sw.contains("time")) cfg.times = get<std::vector<double>>(sw, "time", "sweep.time");
      try {
        if (sw.contains("measure")) cfg.measure = parse_measure(get<std::string>(sw, "measure", "sweep.measure"));
      } catch (const std::invalid_argument& e) {
        throw FieldError{"sweep.measure", e.what()};
      }
      try {
        if (sw.contains("cut")) cfg.cut = Bipartition::parse(get<std::string>(sw, "cut", "sweep.cut"));
      } catch (const std::invalid_argument& e) {
        throw FieldError{"sweep.cut", e.what()};
      }
      if (sw.contains("threshold")) cfg.event_threshold = get<double>(sw, "threshold", "sweep.threshold");
      if (sw.contains("workers")) cfg.workers = get<int>(sw, "workers", "sweep.workers");
    }
    if (j.contains("output")) {
      const auto& o = j["output"];
      reject_unknown(o, {"prefix"}, "output");
      if (o.contains("prefix")) cfg.prefix = get<std::string>(o, "prefix", "output.prefix");
    }
    cfg.params.modulation = make_modulation(pending);
    apply_cutoff(cfg, pending);
    check(cfg);
  } catch (const FieldError& e) {
    throw ConfigError("field '" + e.field + "': " + e.message);
  }
  return cfg;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read config file '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  const std::string text = buf.str();
  const auto first = text.find_first_not_of(" \t\r\n");
  if (first != std::string::npos && text[first] == '{') {
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
      throw ConfigError(std::string("JSON: ") + e.what());
    }
    return config_from_json(j.contains("config") ? j["config"] : j);
  }
  return parse_config_text(text);
}

void finalize(RunConfig& cfg) {
  try {
    check(cfg);
  } catch (const FieldError& e) {
    throw ConfigError("field '" + e.field + "': " + e.message);
  }
}

nlohmann::ordered_json to_json(const RunConfig& cfg) {
  nlohmann::ordered_json j;
  j["label"] = cfg.label;
  const SimParams& p = cfg.params;
  j["model"] = {{"lambda1", p.lambda1.real()},
                {"lambda2", p.lambda2.real()},
                {"eta", p.eta},
                {"epsilon", p.epsilon},
                {"fock_cutoff", p.fock_cutoff},
                {"standard_matrix_element", p.standard_matrix_element},
                {"nu", p.nu},
                {"omega1", p.omega1},
                {"omega2", p.omega2}};
  j["state"] = {{"nbar", p.nbar}, {"phi", p.phi}, {"deficit", cfg.deficit}};
  if (const auto* s = std::get_if<SechModulation>(&p.modulation)) {
    j["modulation"] = {{"kind", "sech"}, {"tau", s->tau}};
  } else {
    j["modulation"] = {{"kind", "constant"}};
  }
  j["sweep"] = {{"theta", cfg.thetas},
                {"gamma", cfg.gammas},
                {"time", cfg.times},
                {"measure", std::string(to_string(cfg.measure))},
                {"cut", cfg.cut.to_string()},
                {"threshold", cfg.event_threshold}};
  j["output"] = {{"prefix", cfg.prefix}};
  return j;
}

SweepRequest to_sweep(const RunConfig& cfg) {
  SweepRequest req;
  req.base = cfg.params;
  req.measure = cfg.measure;
  req.cut = cfg.cut;
  req.thetas = cfg.thetas;
  req.gammas = cfg.gammas;
  req.times = cfg.times;
  req.workers = cfg.workers;
  return req;
}

}  // namespace ionsim::app
