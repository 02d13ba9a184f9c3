#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "urnkit/urn.hpp"
#include "urnkit/weights.hpp"

namespace urnkit {

inline constexpr int kResultSchemaVersion = 1;

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// One batch experiment: `runs` independent fine simulations of
/// `horizon_ticks` ticks each. Run i draws from the counter-based stream
/// (master_seed, i), so results do not depend on the thread count.
struct ExperimentConfig {
  WeightSequence seq = WeightSequence::constant(1.0);
  int d = 1;
  std::int64_t horizon_ticks = 0;
  std::int64_t runs = 1;
  std::uint64_t master_seed = 0;
  std::int64_t fixation_window = 0;  // 0 -> default_fixation_window(d, horizon)
  bool diagnostics = true;
  int threads = 1;

  std::int64_t effective_window() const;
  void validate() const;  // throws ConfigError
};

struct RunRecord {
  std::int64_t run_index = 0;
  bool fixated = false;
  Colour colour = Colour::Red;
  std::int64_t onset_tick = 0;
  std::int64_t trailing_run = 0;
  UrnState final_state{};
  double terminal_imbalance = 0.0;
  double terminal_tail_variance = 0.0;
  bool tail_variance_available = false;
};

struct WilsonInterval {
  double lo = 0.0;
  double hi = 0.0;
};

/// Wilson score interval at z = 1.959964 (two-sided 95%).
WilsonInterval wilson_interval(std::int64_t successes, std::int64_t trials,
                               double z = 1.959964);

struct Aggregate {
  std::int64_t runs = 0;
  std::int64_t fixated = 0;
  double frequency = 0.0;
  WilsonInterval interval{};
  std::optional<double> mean_onset;  // over fixated runs
};

Aggregate estimate_fixation_probability(const std::vector<RunRecord>& records);

struct RunBatchResult {
  ExperimentConfig config;
  std::vector<RunRecord> records;
  Aggregate aggregate;
};

RunBatchResult run_batch(const ExperimentConfig& config);

/// One sweep point: the base config with `axis` set to `value`. Per-point
/// master seeds are split_seed(base.master_seed, point index). Failures are
/// recorded and the sweep continues.
struct SweepPoint {
  std::size_t index = 0;
  double value = 0.0;
  std::optional<RunBatchResult> result;
  std::string error;
};

struct SweepResult {
  std::string axis;
  std::vector<SweepPoint> points;
};

/// Supported axes: d, rho, c, horizon_ticks, runs, fixation_window.
SweepResult sweep(const ExperimentConfig& base, const std::string& axis,
                  const std::vector<double>& values);

/// Provenance: the effective key=value view of a config, echoed into every
/// output artifact.
using Provenance = std::map<std::string, std::string>;

nlohmann::json batch_to_json(const RunBatchResult& result, const Provenance& provenance);
void write_batch_csv(std::ostream& out, const RunBatchResult& result,
                     const Provenance& provenance);

nlohmann::json sweep_to_json(const SweepResult& result, const Provenance& provenance);
void write_sweep_csv(std::ostream& out, const SweepResult& result, const Provenance& provenance);

}  // namespace urnkit
