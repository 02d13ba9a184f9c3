// urnkit command line: simulate | exact | diagnose | mc | sweep | check-constants
//
// Every subcommand reads an optional config file, applies --set overrides,
// then dedicated flags (flags win). The effective config is echoed into every
// output artifact. Exit codes: 0 success, 1 runtime error, 2 config error.

#include <CLI11.hpp>

#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "urnkit/config.hpp"
#include "urnkit/csv.hpp"
#include "urnkit/diagnostics.hpp"
#include "urnkit/exact.hpp"
#include "urnkit/montecarlo.hpp"
#include "urnkit/rng.hpp"
#include "urnkit/urn.hpp"
#include "urnkit/weights.hpp"

namespace {

using namespace urnkit;

struct CliState {
  std::string config_path;
  std::vector<std::string> overrides;  // section.key=value
  std::vector<std::pair<std::string, std::string>> flag_values;
  std::string out_path;
  bool coarse = false;
};

void flag_into_map(CLI::App* cmd, CliState& state, const std::string& flag,
                   const std::string& key, const std::string& help) {
  cmd->add_option_function<std::string>(
      flag, [&state, key](const std::string& v) { state.flag_values.emplace_back(key, v); },
      help);
}

void add_weight_flags(CLI::App* cmd, CliState& state) {
  flag_into_map(cmd, state, "--kind", "weights.kind",
                "weights kind: constant|polynomial|exponential|counterexample|table");
  flag_into_map(cmd, state, "--c", "weights.c", "constant level c");
  flag_into_map(cmd, state, "--rho", "weights.rho", "growth parameter rho");
  flag_into_map(cmd, state, "--weights-d", "weights.d",
                "counterexample block length (defaults to run d)");
  flag_into_map(cmd, state, "--values", "weights.values", "table values, comma separated");
  flag_into_map(cmd, state, "--values-file", "weights.values_file",
                "table values file, one per line");
  flag_into_map(cmd, state, "--tail-rule", "weights.tail_rule",
                "table tail rule: repeat-last|extend-polynomial|extend-exponential");
  flag_into_map(cmd, state, "--tail-rho", "weights.tail_rho", "table tail growth parameter");
}

void add_run_flags(CLI::App* cmd, CliState& state, bool with_batch) {
  flag_into_map(cmd, state, "--d", "run.d", "balls added per coarse step");
  flag_into_map(cmd, state, "--ticks", "run.horizon_ticks", "fine horizon in ticks");
  flag_into_map(cmd, state, "--seed", "run.master_seed", "master seed (64-bit)");
  if (with_batch) {
    flag_into_map(cmd, state, "--runs", "run.runs", "number of independent runs");
    flag_into_map(cmd, state, "--window", "run.fixation_window",
                  "fixation window in ticks (0 = max(10d, horizon/20))");
    flag_into_map(cmd, state, "--threads", "run.threads", "worker threads");
    cmd->add_flag_callback(
        "--no-diagnostics",
        [&state] { state.flag_values.emplace_back("run.diagnostics", "false"); },
        "skip terminal N/B collection");
  }
}

ConfigMap effective_config(const CliState& state) {
  ConfigMap map =
      state.config_path.empty() ? ConfigMap{} : ConfigMap::parse_file(state.config_path);
  for (const auto& kv : state.overrides) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) throw ConfigError("--set expects section.key=value: " + kv);
    map.set(kv.substr(0, eq), kv.substr(eq + 1));
  }
  for (const auto& [key, value] : state.flag_values) map.set(key, value);
  return map;
}

// Echoed into artifacts. Thread count shapes execution, not results, so it
// is stripped to keep outputs byte-identical across thread counts.
Provenance provenance_from(const ConfigMap& map) {
  Provenance p(map.entries().begin(), map.entries().end());
  p.erase("run.threads");
  return p;
}

std::ofstream open_output(const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open output file: " + path);
  return out;
}

int run_simulate(const CliState& state) {
  const ConfigMap map = effective_config(state);
  const int d = static_cast<int>(map.get_int_or("run.d", 1));
  const WeightSequence seq = weights_from_config(map, d);
  const std::int64_t ticks = map.get_int("run.horizon_ticks");
  const std::uint64_t seed = map.get_uint64_or("run.master_seed", 0);
  if (d < 1) throw ConfigError("run.d must be >= 1");
  if (ticks < 0) throw ConfigError("run.horizon_ticks must be >= 0");

  Philox4x32 rng(seed, 0);
  auto out = open_output(state.out_path);
  std::size_t rows = 0;
  if (state.coarse) {
    const CoarsePath path = simulate_coarse(seq, d, ticks, rng);
    write_path_csv(out, path, provenance_from(map));
    rows = path.states.size();
  } else {
    const FinePath path = simulate_fine(seq, d, ticks, rng);
    write_path_csv(out, path, provenance_from(map));
    rows = path.states.size();
  }
  std::cout << "simulate: wrote " << state.out_path << " (" << rows << " rows, "
            << (state.coarse ? "coarse" : "fine") << ", d=" << d << ", seed=" << seed << ", "
            << seq.describe() << ")\n";
  return 0;
}

int run_exact(const CliState& state) {
  const ConfigMap map = effective_config(state);
  const int d = static_cast<int>(map.get_int_or("run.d", 1));
  const WeightSequence seq = weights_from_config(map, d);
  const std::int64_t n = map.get_int("exact.n");
  const std::string method = map.get("exact.method").value_or("dp");
  const std::string arithmetic = map.get("exact.arithmetic").value_or("auto");

  Arithmetic mode;
  if (arithmetic == "rational") {
    mode = Arithmetic::Rational;
  } else if (arithmetic == "float") {
    mode = Arithmetic::Float;
  } else if (arithmetic == "auto") {
    mode = seq.rational_representable() ? Arithmetic::Rational : Arithmetic::Float;
  } else {
    throw ConfigError("exact.arithmetic must be auto|rational|float");
  }

  ExactDistribution dist;
  if (method == "dp") {
    dist = coarse_distribution(seq, d, n, mode);
  } else if (method == "enumerate") {
    dist = enumerate_fine_paths(seq, d, static_cast<int>(n), mode);
  } else {
    throw ConfigError("exact.method must be dp|enumerate");
  }

  auto out = open_output(state.out_path);
  write_distribution_csv(out, dist, provenance_from(map));
  std::cout << "exact: wrote " << state.out_path << " (" << dist.probs.size() << " states, n="
            << n << ", d=" << d << ", "
            << (mode == Arithmetic::Rational ? "rational" : "float") << ", " << method << ")\n";
  return 0;
}

int run_diagnose(const CliState& state) {
  const ConfigMap map = effective_config(state);
  const int d = static_cast<int>(map.get_int_or("run.d", 1));
  const WeightSequence seq = weights_from_config(map, d);
  const std::int64_t ticks = map.get_int("run.horizon_ticks");
  const std::uint64_t seed = map.get_uint64_or("run.master_seed", 0);

  Philox4x32 rng(seed, 0);
  const FinePath path = simulate_fine(seq, d, ticks, rng);
  const DiagnosticsTrace trace = compute_trace(path, seq);
  auto out = open_output(state.out_path);
  write_trace_csv(out, path, trace, provenance_from(map));

  // Terminal N is reported as data; whether it stays away from 0 in the
  // infinite-horizon limit is not decidable from a finite run.
  std::string verdict = "horizon shorter than the fixation window";
  const std::int64_t window = default_fixation_window(d, ticks);
  if (ticks >= window && ticks > 0) {
    const FixationReport fix = detect_fixation(path, window);
    verdict = fix.fixated ? std::string("fixated ") + colour_name(fix.colour) + " at tick " +
                                std::to_string(fix.onset_tick)
                          : "not fixated within window";
  }
  std::cout << "diagnose: wrote " << state.out_path << " (" << path.states.size() << " rows, d="
            << d << ", seed=" << seed << ", " << verdict
            << ", terminal N = " << format_double(trace.imbalance.back()) << ")\n";
  return 0;
}

int run_mc(const CliState& state) {
  const ConfigMap map = effective_config(state);
  const ExperimentConfig config = experiment_from_config(map);
  const RunBatchResult result = run_batch(config);
  const Provenance prov = provenance_from(map);

  const std::string json_path = state.out_path + ".json";
  const std::string csv_path = state.out_path + ".csv";
  {
    auto out = open_output(json_path);
    out << batch_to_json(result, prov).dump(2) << "\n";
  }
  {
    auto out = open_output(csv_path);
    write_batch_csv(out, result, prov);
  }
  const auto& agg = result.aggregate;
  std::cout << "mc: " << agg.fixated << "/" << agg.runs << " fixated (frequency "
            << format_double(agg.frequency) << ", wilson [" << format_double(agg.interval.lo)
            << ", " << format_double(agg.interval.hi) << "]) -> " << json_path << ", "
            << csv_path << "\n";
  return 0;
}

int run_sweep(const CliState& state) {
  const ConfigMap map = effective_config(state);
  const std::string axis = map.get_string("sweep.axis");
  const std::vector<double> grid = map.get_double_list("sweep.values");
  const ExperimentConfig base = experiment_from_config(map);
  const SweepResult result = sweep(base, axis, grid);
  const Provenance prov = provenance_from(map);

  const std::string json_path = state.out_path + ".json";
  const std::string csv_path = state.out_path + ".csv";
  {
    auto out = open_output(json_path);
    out << sweep_to_json(result, prov).dump(2) << "\n";
  }
  {
    auto out = open_output(csv_path);
    write_sweep_csv(out, result, prov);
  }
  std::size_t failed = 0;
  for (const auto& p : result.points) {
    if (!p.result) ++failed;
  }
  std::cout << "sweep: axis " << axis << ", " << result.points.size() << " points ("
            << (result.points.size() - failed) << " ok, " << failed << " failed) -> "
            << json_path << ", " << csv_path << "\n";
  return 0;
}

int run_check_constants(const CliState& state) {
  const ConfigMap map = effective_config(state);
  const int d = static_cast<int>(map.get_int_or("run.d", 1));
  if (d < 1) throw ConfigError("run.d must be >= 1");
  const double tolerance = map.get_double_or("check.tolerance", 1e-12);

  std::ostringstream report;
  std::optional<double> s_inf;

  if (map.contains("check.s_inf")) {
    s_inf = map.get_double("check.s_inf");
    report << "weights: (explicit s_inf)\n";
    report << "srh: assumed converged, s_inf = " << format_double(*s_inf) << "\n";
  } else {
    const WeightSequence seq = weights_from_config(map, d);
    report << "weights: " << seq.describe() << "\n";
    const TailSumVerdict srh = seq.srh(tolerance);
    if (srh.converged()) {
      s_inf = srh.value;
      report << "srh: converged, s_inf = " << format_double(srh.value) << " (error <= "
             << format_double(srh.error_bound) << ", terms = " << srh.terms_used << ")\n";
    } else {
      report << "srh: " << (srh.status == SumStatus::Diverged ? "diverged" : "inconclusive")
             << "\n";
    }
    report << "non_decreasing: " << (seq.is_non_decreasing() ? "yes" : "no") << "\n";
  }
  report << "d: " << d << "\n";

  if (s_inf) {
    const double alpha = escape_alpha(d, *s_inf);
    const double ratio = escape_ratio(alpha, d, *s_inf);
    const bool pass = ratio >= kEscapeRatioFloor;
    report << "alpha: " << format_double(alpha) << "\n";
    report << "escape_ratio: " << format_double(ratio) << "\n";
    report << "floor: " << format_double(kEscapeRatioFloor) << "\n";
    report << "verdict: " << (pass ? "PASS" : "FAIL") << " (escape_ratio "
           << (pass ? ">=" : "<") << " 1/12)\n";
  } else {
    report << "alpha: n/a\n";
    report << "verdict: SKIP (escape bound needs a finite s_inf)\n";
  }

  std::cout << report.str();
  if (!state.out_path.empty()) {
    auto out = open_output(state.out_path);
    write_provenance(out, provenance_from(map));
    out << report.str();
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"urnkit: simulation and exact computation for reinforced urn processes"};
  app.require_subcommand(1);

  CliState state;

  const auto add_common = [&](CLI::App* cmd, bool needs_out) {
    cmd->add_option("--config", state.config_path, "config file (sectioned key = value)");
    cmd->add_option("--set", state.overrides, "override: section.key=value")
        ->type_name("KEY=VALUE");
    if (needs_out) {
      cmd->add_option("--out", state.out_path, "output path")->required();
    } else {
      cmd->add_option("--out", state.out_path, "also write the report here");
    }
  };

  auto* simulate = app.add_subcommand("simulate", "run one seeded simulation, dump the path");
  add_common(simulate, true);
  add_weight_flags(simulate, state);
  add_run_flags(simulate, state, false);
  simulate->add_flag("--coarse", state.coarse,
                     "simulate the d-ball coarse chain (--ticks counts steps)");

  auto* exact = app.add_subcommand("exact", "exact finite-horizon distribution");
  add_common(exact, true);
  add_weight_flags(exact, state);
  exact->add_option_function<std::string>(
      "--d", [&state](const std::string& v) { state.flag_values.emplace_back("run.d", v); },
      "balls added per coarse step");
  exact->add_option_function<std::string>(
      "--n", [&state](const std::string& v) { state.flag_values.emplace_back("exact.n", v); },
      "coarse horizon (dp) or blocks (enumerate)");
  exact->add_option_function<std::string>(
      "--method",
      [&state](const std::string& v) { state.flag_values.emplace_back("exact.method", v); },
      "dp|enumerate");
  exact->add_option_function<std::string>(
      "--arithmetic",
      [&state](const std::string& v) { state.flag_values.emplace_back("exact.arithmetic", v); },
      "auto|rational|float");

  auto* diagnose = app.add_subcommand("diagnose", "simulate and export the diagnostic trace");
  add_common(diagnose, true);
  add_weight_flags(diagnose, state);
  add_run_flags(diagnose, state, false);

  auto* mc = app.add_subcommand("mc", "batch fixation experiment (JSON + CSV)");
  add_common(mc, true);
  add_weight_flags(mc, state);
  add_run_flags(mc, state, true);

  auto* sweep_cmd = app.add_subcommand("sweep", "mc over a parameter grid");
  add_common(sweep_cmd, true);
  add_weight_flags(sweep_cmd, state);
  add_run_flags(sweep_cmd, state, true);
  sweep_cmd->add_option_function<std::string>(
      "--axis",
      [&state](const std::string& v) { state.flag_values.emplace_back("sweep.axis", v); },
      "swept parameter: d|rho|c|horizon_ticks|runs|fixation_window");
  sweep_cmd->add_option_function<std::string>(
      "--grid",
      [&state](const std::string& v) { state.flag_values.emplace_back("sweep.values", v); },
      "comma separated grid values");

  auto* check = app.add_subcommand("check-constants",
                                   "tail sums, monotonicity and the escape-ratio floor");
  add_common(check, false);
  add_weight_flags(check, state);
  check->add_option_function<std::string>(
      "--d", [&state](const std::string& v) { state.flag_values.emplace_back("run.d", v); },
      "balls added per coarse step");
  check->add_option_function<std::string>(
      "--s-inf",
      [&state](const std::string& v) { state.flag_values.emplace_back("check.s_inf", v); },
      "use an explicit s_inf instead of computing it from the weights");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (simulate->parsed()) return run_simulate(state);
    if (exact->parsed()) return run_exact(state);
    if (diagnose->parsed()) return run_diagnose(state);
    if (mc->parsed()) return run_mc(state);
    if (sweep_cmd->parsed()) return run_sweep(state);
    if (check->parsed()) return run_check_constants(state);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const UnsupportedArithmetic& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}
