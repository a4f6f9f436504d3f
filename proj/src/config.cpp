#include "fracsmo/config.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include "fracsmo/errors.hpp"
#include "fracsmo/expr.hpp"

namespace fracsmo {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

std::string_view strip_comment(std::string_view line) {
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    if (line[i] == '"') quoted = !quoted;
    if (line[i] == '#' && !quoted) return line.substr(0, i);
  }
  return line;
}

std::string fmt_number(double v) {
  char buf[40];
  const auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

std::string fmt_list(const std::vector<double>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) s += ", ";
    s += fmt_number(v[i]);
  }
  return s;
}

struct Value {
  std::string_view raw;
  std::size_t line;
  std::string key;

  [[noreturn]] void fail(const std::string& why) const {
    throw ConfigError(key + ": " + why, line);
  }

  double number() const { return parse_number(trim(raw)); }

  double parse_number(std::string_view tok) const {
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (tok.empty() || ec != std::errc{} || ptr != tok.data() + tok.size() || !std::isfinite(v)) {
      fail("malformed number '" + std::string(tok) + "'");
    }
    return v;
  }

  std::size_t integer() const {
    const auto tok = trim(raw);
    std::size_t v = 0;
    auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (tok.empty() || ec != std::errc{} || ptr != tok.data() + tok.size()) {
      fail("malformed integer '" + std::string(tok) + "'");
    }
    return v;
  }

  std::vector<double> list() const {
    std::vector<double> out;
    std::string_view rest = raw;
    for (;;) {
      const auto comma = rest.find(',');
      out.push_back(parse_number(trim(rest.substr(0, comma))));
      if (comma == std::string_view::npos) break;
      rest.remove_prefix(comma + 1);
    }
    return out;
  }

  std::string string() const {
    const auto tok = trim(raw);
    if (tok.size() < 2 || tok.front() != '"' || tok.back() != '"') {
      fail("expected a double-quoted string");
    }
    const auto inner = tok.substr(1, tok.size() - 2);
    if (inner.find('"') != std::string_view::npos) fail("stray quote in string");
    return std::string(inner);
  }
};

using Setter = std::function<void(ScenarioConfig&, const Value&)>;

const std::map<std::string, Setter>& setters() {
  static const std::map<std::string, Setter> table = {
      {"plant.n", [](auto& c, const Value& v) { c.plant.n = v.integer(); }},
      {"plant.alpha", [](auto& c, const Value& v) { c.plant.alpha = v.number(); }},
      {"plant.f1", [](auto& c, const Value& v) { c.plant.f1 = v.string(); }},
      {"plant.f2", [](auto& c, const Value& v) { c.plant.f2 = v.string(); }},
      {"plant.fault", [](auto& c, const Value& v) { c.plant.fault = v.string(); }},
      {"plant.x0", [](auto& c, const Value& v) { c.plant.x0 = v.list(); }},
      {"observer.lambda", [](auto& c, const Value& v) { c.observer.lambda = v.list(); }},
      {"observer.alpha_gain", [](auto& c, const Value& v) { c.observer.alpha_gain = v.list(); }},
      {"observer.epsilon", [](auto& c, const Value& v) { c.observer.epsilon = v.number(); }},
      {"observer.flag_dwell_steps",
       [](auto& c, const Value& v) {
         const auto k = v.integer();
         if (k < 1 || k > 1000000) v.fail("must be between 1 and 1000000");
         c.observer.flag_dwell_steps = static_cast<std::uint32_t>(k);
       }},
      {"observer.xhat0", [](auto& c, const Value& v) { c.observer.xhat0 = v.list(); }},
      {"observer.xtilde0", [](auto& c, const Value& v) { c.observer.xtilde0 = v.list(); }},
      {"observer.ftilde0", [](auto& c, const Value& v) { c.observer.ftilde0 = v.number(); }},
      {"observer.fhat0", [](auto& c, const Value& v) { c.observer.fhat0 = v.number(); }},
      {"observer.thetatilde0",
       [](auto& c, const Value& v) { c.observer.thetatilde0 = v.number(); }},
      {"sim.h", [](auto& c, const Value& v) { c.sim.h = v.number(); }},
      {"sim.horizon", [](auto& c, const Value& v) { c.sim.horizon = v.number(); }},
      {"sim.memory_length",
       [](auto& c, const Value& v) {
         const auto L = v.integer();
         c.sim.memory_length = L == 0 ? std::nullopt : std::optional<std::size_t>(L);
       }},
      {"output.csv", [](auto& c, const Value& v) { c.output.csv = v.string(); }},
      {"output.svg_dir", [](auto& c, const Value& v) { c.output.svg_dir = v.string(); }},
      {"output.metrics_band", [](auto& c, const Value& v) { c.output.metrics_band = v.number(); }},
      {"bounds.a", [](auto& c, const Value& v) { c.bounds->a = v.list(); }},
      {"bounds.A1", [](auto& c, const Value& v) { c.bounds->A1 = v.number(); }},
      {"bounds.A2", [](auto& c, const Value& v) { c.bounds->A2 = v.number(); }},
      {"bounds.A3", [](auto& c, const Value& v) { c.bounds->A3 = v.number(); }},
      {"bounds.Adot1", [](auto& c, const Value& v) { c.bounds->Adot1 = v.number(); }},
      {"bounds.Adot2", [](auto& c, const Value& v) { c.bounds->Adot2 = v.number(); }},
      {"bounds.Adot3", [](auto& c, const Value& v) { c.bounds->Adot3 = v.number(); }},
      {"analysis.P", [](auto& c, const Value& v) { c.analysis.P = v.list(); }},
      {"analysis.lemma_tolerance",
       [](auto& c, const Value& v) { c.analysis.lemma_tolerance = v.number(); }},
  };
  return table;
}

const char* kSections[] = {"plant", "observer", "sim", "output", "bounds", "analysis"};

// Line lookup for validation messages; 0 when a key was not written.
using LineOf = std::function<std::size_t(const std::string&)>;

void validate_with(const ScenarioConfig& c, const LineOf& line_of) {
  auto fail = [&](const std::string& key, const std::string& why) {
    throw ConfigError(key + ": " + why, line_of(key));
  };
  const auto n = c.plant.n;
  if (n < 2) fail("plant.n", "dimension must be at least 2");
  if (!(c.plant.alpha > 0.0 && c.plant.alpha < 1.0)) fail("plant.alpha", "must lie in (0, 1)");
  if (c.plant.x0.size() != n) {
    fail("plant.x0", "has " + std::to_string(c.plant.x0.size()) + " entries, expected n = " +
                         std::to_string(n));
  }
  auto check_expr = [&](const std::string& key, const std::string& text, bool state_allowed) {
    if (trim(text).empty()) fail(key, "expression is empty");
    try {
      const auto e = Expr::parse(text);
      if (!state_allowed && e.max_state_index() > 0) fail(key, "may reference t only");
      if (e.max_state_index() > n) {
        fail(key, "references x" + std::to_string(e.max_state_index()) + " but n = " +
                      std::to_string(n));
      }
    } catch (const ParseError& err) {
      fail(key, err.what());
    }
  };
  check_expr("plant.f1", c.plant.f1, true);
  check_expr("plant.f2", c.plant.f2, true);
  check_expr("plant.fault", c.plant.fault, false);

  auto check_gains = [&](const std::string& key, const std::vector<double>& g) {
    if (g.size() != n + 1) {
      fail(key, "has " + std::to_string(g.size()) + " entries, expected n + 1 = " +
                    std::to_string(n + 1));
    }
    for (double v : g)
      if (v < 0.0) fail(key, "gains must be non-negative");
  };
  check_gains("observer.lambda", c.observer.lambda);
  check_gains("observer.alpha_gain", c.observer.alpha_gain);
  if (!(c.observer.epsilon > 0.0)) fail("observer.epsilon", "must be positive");
  if (!c.observer.xhat0.empty() && c.observer.xhat0.size() != n) {
    fail("observer.xhat0", "expected n = " + std::to_string(n) + " entries");
  }
  if (!c.observer.xtilde0.empty() && c.observer.xtilde0.size() != n - 1) {
    fail("observer.xtilde0", "expected n - 1 = " + std::to_string(n - 1) + " entries");
  }
  if (!(c.sim.h > 0.0)) fail("sim.h", "must be positive");
  if (!(c.sim.horizon > c.sim.h)) fail("sim.horizon", "must exceed h");
  if (c.output.metrics_band && !(*c.output.metrics_band > 0.0)) {
    fail("output.metrics_band", "must be positive");
  }
  if (c.bounds) {
    if (c.bounds->a.size() != n) fail("bounds.a", "expected n = " + std::to_string(n) + " entries");
    try {
      c.bounds->validate();
    } catch (const PreconditionError& err) {
      fail("bounds", err.what());
    }
  }
  if (!c.analysis.P.empty() && c.analysis.P.size() != (n + 1) * (n + 1)) {
    fail("analysis.P", "expected (n + 1)^2 = " + std::to_string((n + 1) * (n + 1)) + " entries");
  }
  if (c.analysis.lemma_tolerance && !(*c.analysis.lemma_tolerance >= 0.0)) {
    fail("analysis.lemma_tolerance", "must be non-negative");
  }
}

}  // namespace

ScenarioConfig paper_example() {
  ScenarioConfig c;
  c.plant.n = 3;
  c.plant.alpha = 0.7;
  c.plant.f1 = "-0.5*x1 - sin(x2) - x3*abs(x3)";
  c.plant.f2 = "1";
  c.plant.fault = "0.5*cos(0.5*pi*t)";
  c.plant.x0 = {0.1, 0.1, -0.1};
  c.observer.lambda = {0.1, 0.1, 0.1, 0.1};
  c.observer.alpha_gain = {1.0, 2.0, 5.0, 10.0};
  c.observer.epsilon = 0.05;
  c.observer.flag_dwell_steps = 1;
  c.observer.xhat0 = {0.0, 0.0, 0.0};
  c.observer.xtilde0 = {0.0, 0.0};
  c.sim.h = 1e-3;
  c.sim.horizon = 30.0;
  return c;
}

PlantModel ScenarioConfig::plant_model() const {
  return PlantModel(plant.n, FractionalOrder(plant.alpha), Expr::parse(plant.f1),
                    Expr::parse(plant.f2), Expr::parse(plant.fault), plant.x0);
}

GainSet ScenarioConfig::gains() const {
  return GainSet{observer.lambda, observer.alpha_gain, observer.epsilon};
}

ObserverState ScenarioConfig::observer_initial_state() const {
  auto s = ObserverState::zero(plant.n);
  if (!observer.xhat0.empty()) s.xhat = observer.xhat0;
  if (!observer.xtilde0.empty()) s.xtilde = observer.xtilde0;
  s.ftilde = observer.ftilde0;
  s.fhat = observer.fhat0;
  s.thetatilde = observer.thetatilde0;
  return s;
}

double ScenarioConfig::metrics_band() const {
  return output.metrics_band.value_or(2.0 * observer.epsilon);
}

std::size_t ScenarioConfig::steps() const {
  return static_cast<std::size_t>(std::llround(sim.horizon / sim.h));
}

void ScenarioConfig::validate() const {
  validate_with(*this, [](const std::string&) { return std::size_t{0}; });
}

ScenarioConfig load_config(std::string_view text) {
  ScenarioConfig cfg;
  bool preset = false;
  std::string section;
  std::map<std::string, std::size_t> key_line;
  std::map<std::string, std::size_t> section_line;

  std::size_t lineno = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto nl = text.find('\n', pos);
    const auto raw = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos
                                                                    : nl - pos);
    pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
    ++lineno;

    const auto line = trim(strip_comment(raw));
    if (line.empty()) continue;

    if (line.front() == '[') {
      if (line.back() != ']') throw ConfigError("unterminated section header", lineno);
      section = std::string(trim(line.substr(1, line.size() - 2)));
      bool known = false;
      for (const char* s : kSections) known |= section == s;
      if (!known) throw ConfigError("unknown section [" + section + "]", lineno);
      if (section_line.count(section)) {
        throw ConfigError("duplicate section [" + section + "]", lineno);
      }
      section_line[section] = lineno;
      if (section == "bounds") cfg.bounds = Bounds{};
      continue;
    }

    const auto eq = line.find('=');
    if (eq == std::string_view::npos) throw ConfigError("expected 'key = value'", lineno);
    const auto key = std::string(trim(line.substr(0, eq)));
    const Value value{trim(line.substr(eq + 1)), lineno, key};
    if (key.empty()) throw ConfigError("missing key before '='", lineno);
    if (value.raw.empty()) throw ConfigError(key + ": missing value", lineno);

    if (section.empty()) {
      if (key != "preset") throw ConfigError("key '" + key + "' outside any section", lineno);
      if (preset) throw ConfigError("preset given twice", lineno);
      const auto name = value.string();
      if (name != kPaperPreset) throw ConfigError("unknown preset '" + name + "'", lineno);
      cfg = paper_example();
      preset = true;
      continue;
    }

    const std::string full = section + "." + key;
    const auto it = setters().find(full);
    if (it == setters().end()) throw ConfigError("unknown key '" + key + "' in [" + section + "]", lineno);
    if (key_line.count(full)) throw ConfigError("duplicate key '" + full + "'", lineno);
    key_line[full] = lineno;
    it->second(cfg, value);
  }

  auto line_of = [&](const std::string& key) -> std::size_t {
    if (auto it = key_line.find(key); it != key_line.end()) return it->second;
    const auto sec = key.substr(0, key.find('.'));
    if (auto it = section_line.find(sec); it != section_line.end()) return it->second;
    return 0;
  };

  if (!preset) {
    for (const char* key : {"plant.n", "plant.alpha", "plant.f1", "plant.f2", "plant.fault",
                            "plant.x0", "observer.lambda", "observer.alpha_gain",
                            "observer.epsilon"}) {
      if (!key_line.count(key)) throw ConfigError(std::string("missing key ") + key, line_of(key));
    }
  }
  if (cfg.bounds) {
    for (const char* key : {"bounds.a", "bounds.A1", "bounds.A2", "bounds.A3", "bounds.Adot1",
                            "bounds.Adot2", "bounds.Adot3"}) {
      if (!key_line.count(key)) throw ConfigError(std::string("missing key ") + key, line_of(key));
    }
  }
  validate_with(cfg, line_of);
  // Omitted initial estimates start at zero.
  if (cfg.observer.xhat0.empty()) cfg.observer.xhat0.assign(cfg.plant.n, 0.0);
  if (cfg.observer.xtilde0.empty()) cfg.observer.xtilde0.assign(cfg.plant.n - 1, 0.0);
  return cfg;
}

ScenarioConfig load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'", 0);
  std::ostringstream ss;
  ss << in.rdbuf();
  return load_config(ss.str());
}

std::string to_text(const ScenarioConfig& c) {
  std::ostringstream os;
  os << "[plant]\n"
     << "n = " << c.plant.n << '\n'
     << "alpha = " << fmt_number(c.plant.alpha) << '\n'
     << "f1 = \"" << c.plant.f1 << "\"\n"
     << "f2 = \"" << c.plant.f2 << "\"\n"
     << "fault = \"" << c.plant.fault << "\"\n"
     << "x0 = " << fmt_list(c.plant.x0) << "\n\n";

  const auto init = c.observer_initial_state();
  os << "[observer]\n"
     << "lambda = " << fmt_list(c.observer.lambda) << '\n'
     << "alpha_gain = " << fmt_list(c.observer.alpha_gain) << '\n'
     << "epsilon = " << fmt_number(c.observer.epsilon) << '\n'
     << "flag_dwell_steps = " << c.observer.flag_dwell_steps << '\n'
     << "xhat0 = " << fmt_list(init.xhat) << '\n'
     << "xtilde0 = " << fmt_list(init.xtilde) << '\n'
     << "ftilde0 = " << fmt_number(c.observer.ftilde0) << '\n'
     << "fhat0 = " << fmt_number(c.observer.fhat0) << '\n'
     << "thetatilde0 = " << fmt_number(c.observer.thetatilde0) << "\n\n";

  os << "[sim]\n"
     << "h = " << fmt_number(c.sim.h) << '\n'
     << "horizon = " << fmt_number(c.sim.horizon) << '\n'
     << "memory_length = " << c.sim.memory_length.value_or(0) << "\n\n";

  os << "[output]\n"
     << "csv = \"" << c.output.csv << "\"\n"
     << "svg_dir = \"" << c.output.svg_dir << "\"\n";
  if (c.output.metrics_band) os << "metrics_band = " << fmt_number(*c.output.metrics_band) << '\n';

  if (c.bounds) {
    const auto& b = *c.bounds;
    os << "\n[bounds]\n"
       << "a = " << fmt_list(b.a) << '\n'
       << "A1 = " << fmt_number(b.A1) << '\n'
       << "A2 = " << fmt_number(b.A2) << '\n'
       << "A3 = " << fmt_number(b.A3) << '\n'
       << "Adot1 = " << fmt_number(b.Adot1) << '\n'
       << "Adot2 = " << fmt_number(b.Adot2) << '\n'
       << "Adot3 = " << fmt_number(b.Adot3) << '\n';
  }
  if (!c.analysis.P.empty() || c.analysis.lemma_tolerance) {
    os << "\n[analysis]\n";
    if (!c.analysis.P.empty()) os << "P = " << fmt_list(c.analysis.P) << '\n';
    if (c.analysis.lemma_tolerance) {
      os << "lemma_tolerance = " << fmt_number(*c.analysis.lemma_tolerance) << '\n';
    }
  }
  return os.str();
}

}  // namespace fracsmo
