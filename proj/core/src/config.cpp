#include "urnkit/config.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

namespace urnkit {

namespace {

std::string trim(const std::string& s) {
  std::size_t b = 0;
  std::size_t e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

}  // namespace

ConfigMap ConfigMap::parse_string(const std::string& text, const std::string& origin) {
  ConfigMap config;
  std::istringstream in(text);
  std::string line;
  std::string section;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string t = trim(line);
    if (t.empty() || t[0] == '#' || t[0] == ';') continue;
    if (t.front() == '[') {
      if (t.back() != ']') {
        throw ConfigError(origin + ":" + std::to_string(line_no) + ": malformed section header");
      }
      section = trim(t.substr(1, t.size() - 2));
      if (section.empty()) {
        throw ConfigError(origin + ":" + std::to_string(line_no) + ": empty section name");
      }
      continue;
    }
    const auto eq = t.find('=');
    if (eq == std::string::npos) {
      throw ConfigError(origin + ":" + std::to_string(line_no) + ": expected key = value");
    }
    const std::string key = trim(t.substr(0, eq));
    const std::string value = trim(t.substr(eq + 1));
    if (key.empty()) {
      throw ConfigError(origin + ":" + std::to_string(line_no) + ": empty key");
    }
    if (section.empty()) {
      throw ConfigError(origin + ":" + std::to_string(line_no) +
                        ": key outside any [section]");
    }
    config.entries_[section + "." + key] = value;
  }
  return config;
}

ConfigMap ConfigMap::parse_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_string(buffer.str(), path);
}

void ConfigMap::set(const std::string& dotted_key, const std::string& value) {
  if (dotted_key.find('.') == std::string::npos) {
    throw ConfigError("override key must be section.key: " + dotted_key);
  }
  entries_[dotted_key] = trim(value);
}

bool ConfigMap::contains(const std::string& key) const { return entries_.count(key) > 0; }

std::optional<std::string> ConfigMap::get(const std::string& key) const {
  const auto it = entries_.find(key);
  if (it == entries_.end()) return std::nullopt;
  return it->second;
}

std::string ConfigMap::get_string(const std::string& key) const {
  const auto v = get(key);
  if (!v) throw ConfigError("missing config key: " + key);
  return *v;
}

double ConfigMap::get_double(const std::string& key) const {
  const std::string v = get_string(key);
  try {
    std::size_t pos = 0;
    const double x = std::stod(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return x;
  } catch (const std::exception&) {
    throw ConfigError("config key " + key + " is not a number: '" + v + "'");
  }
}

std::int64_t ConfigMap::get_int(const std::string& key) const {
  const double x = get_double(key);
  if (x != std::floor(x) || std::abs(x) > 9.0e18) {
    throw ConfigError("config key " + key + " must be an integer");
  }
  return static_cast<std::int64_t>(x);
}

std::uint64_t ConfigMap::get_uint64(const std::string& key) const {
  const std::string v = get_string(key);
  std::uint64_t out = 0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || ptr != v.data() + v.size()) {
    throw ConfigError("config key " + key + " must be an unsigned 64-bit integer");
  }
  return out;
}

bool ConfigMap::get_bool(const std::string& key) const {
  const std::string v = get_string(key);
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  throw ConfigError("config key " + key + " must be a boolean");
}

std::vector<double> ConfigMap::get_double_list(const std::string& key) const {
  const std::string v = get_string(key);
  std::vector<double> out;
  std::string item;
  std::istringstream in(v);
  while (std::getline(in, item, ',')) {
    const std::string t = trim(item);
    if (t.empty()) continue;
    try {
      std::size_t pos = 0;
      out.push_back(std::stod(t, &pos));
      if (pos != t.size()) throw std::invalid_argument(t);
    } catch (const std::exception&) {
      throw ConfigError("config key " + key + " has a non-numeric entry: '" + t + "'");
    }
  }
  if (out.empty()) throw ConfigError("config key " + key + " is an empty list");
  return out;
}

double ConfigMap::get_double_or(const std::string& key, double fallback) const {
  return contains(key) ? get_double(key) : fallback;
}

std::int64_t ConfigMap::get_int_or(const std::string& key, std::int64_t fallback) const {
  return contains(key) ? get_int(key) : fallback;
}

std::uint64_t ConfigMap::get_uint64_or(const std::string& key, std::uint64_t fallback) const {
  return contains(key) ? get_uint64(key) : fallback;
}

bool ConfigMap::get_bool_or(const std::string& key, bool fallback) const {
  return contains(key) ? get_bool(key) : fallback;
}

std::vector<double> load_weight_values(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open weights file: " + path);
  std::vector<double> values;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    try {
      std::size_t pos = 0;
      values.push_back(std::stod(t, &pos));
      if (pos != t.size()) throw std::invalid_argument(t);
    } catch (const std::exception&) {
      throw ConfigError(path + ":" + std::to_string(line_no) + ": not a number: '" + t + "'");
    }
  }
  if (values.empty()) throw ConfigError("weights file is empty: " + path);
  return values;
}

namespace {

TailRule tail_rule_from_string(const std::string& name) {
  if (name == "repeat-last") return TailRule::RepeatLast;
  if (name == "extend-polynomial") return TailRule::ExtendPolynomial;
  if (name == "extend-exponential") return TailRule::ExtendExponential;
  throw ConfigError("unknown weights.tail_rule: " + name);
}

}  // namespace

WeightSequence weights_from_config(const ConfigMap& config, int default_d) {
  const std::string kind = config.get_string("weights.kind");
  try {
    if (kind == "constant") {
      return WeightSequence::constant(config.get_double_or("weights.c", 1.0));
    }
    if (kind == "polynomial") {
      return WeightSequence::polynomial(config.get_double("weights.rho"));
    }
    if (kind == "exponential") {
      return WeightSequence::exponential(config.get_double("weights.rho"));
    }
    if (kind == "counterexample") {
      const int d = static_cast<int>(config.get_int_or("weights.d", default_d));
      return WeightSequence::counterexample(config.get_double("weights.rho"), d);
    }
    if (kind == "table") {
      std::vector<double> values;
      std::string source;
      if (config.contains("weights.values")) {
        values = config.get_double_list("weights.values");
      } else if (config.contains("weights.values_file")) {
        source = config.get_string("weights.values_file");
        values = load_weight_values(source);
      } else {
        throw ConfigError("table weights need weights.values or weights.values_file");
      }
      const TailRule rule =
          tail_rule_from_string(config.get("weights.tail_rule").value_or("repeat-last"));
      const double tail_rho = config.get_double_or("weights.tail_rho", 0.0);
      return WeightSequence::table(std::move(values), rule, tail_rho, std::move(source));
    }
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("invalid weights: ") + e.what());
  }
  throw ConfigError("unknown weights.kind: " + kind);
}

ExperimentConfig experiment_from_config(const ConfigMap& config) {
  ExperimentConfig cfg;
  cfg.d = static_cast<int>(config.get_int_or("run.d", 1));
  cfg.seq = weights_from_config(config, cfg.d);
  cfg.horizon_ticks = config.get_int("run.horizon_ticks");
  cfg.runs = config.get_int_or("run.runs", 100);
  cfg.master_seed = config.get_uint64_or("run.master_seed", 0);
  cfg.fixation_window = config.get_int_or("run.fixation_window", 0);
  cfg.diagnostics = config.get_bool_or("run.diagnostics", true);
  cfg.threads = static_cast<int>(config.get_int_or("run.threads", 1));
  cfg.validate();
  return cfg;
}

}  // namespace urnkit
