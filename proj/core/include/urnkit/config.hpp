#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "urnkit/montecarlo.hpp"
#include "urnkit/weights.hpp"

namespace urnkit {

/// Flat view of a sectioned key-value config file:
///
///   # comment
///   [weights]
///   kind = polynomial
///   rho = 2
///   [run]
///   d = 2
///   horizon_ticks = 100000
///
/// Keys are addressed as "section.key". Overrides applied through set()
/// replace file values, so the map always holds the effective config.
class ConfigMap {
 public:
  static ConfigMap parse_file(const std::string& path);
  static ConfigMap parse_string(const std::string& text, const std::string& origin = "<string>");

  void set(const std::string& dotted_key, const std::string& value);

  bool contains(const std::string& key) const;
  std::optional<std::string> get(const std::string& key) const;

  std::string get_string(const std::string& key) const;  // throws ConfigError if absent
  double get_double(const std::string& key) const;
  std::int64_t get_int(const std::string& key) const;
  std::uint64_t get_uint64(const std::string& key) const;
  bool get_bool(const std::string& key) const;
  std::vector<double> get_double_list(const std::string& key) const;

  double get_double_or(const std::string& key, double fallback) const;
  std::int64_t get_int_or(const std::string& key, std::int64_t fallback) const;
  std::uint64_t get_uint64_or(const std::string& key, std::uint64_t fallback) const;
  bool get_bool_or(const std::string& key, bool fallback) const;

  const std::map<std::string, std::string>& entries() const { return entries_; }

 private:
  std::map<std::string, std::string> entries_;
};

/// Build the weight sequence from the [weights] section. `default_d` seeds
/// the counterexample block length when weights.d is absent.
WeightSequence weights_from_config(const ConfigMap& config, int default_d);

/// Build the experiment from [weights] + [run].
ExperimentConfig experiment_from_config(const ConfigMap& config);

/// One-value-per-line weights file ('#' comments allowed).
std::vector<double> load_weight_values(const std::string& path);

}  // namespace urnkit
