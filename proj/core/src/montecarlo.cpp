#include "urnkit/montecarlo.hpp"

#include <atomic>
#include <cmath>
#include <mutex>
#include <ostream>
#include <thread>

#include "urnkit/csv.hpp"
#include "urnkit/diagnostics.hpp"
#include "urnkit/rng.hpp"

namespace urnkit {

namespace {

struct KahanSum {
  double sum = 0.0;
  double carry = 0.0;
  void add(double x) {
    const double y = x - carry;
    const double t = sum + y;
    carry = (t - sum) - y;
    sum = t;
  }
};

RunRecord simulate_run(const ExperimentConfig& config, std::int64_t run_index,
                       std::int64_t window, bool square_tail) {
  const WeightSequence& seq = config.seq;
  FineSimulator sim(seq, config.d, Philox4x32(config.master_seed,
                                              static_cast<std::uint64_t>(run_index)));
  KahanSum imbalance;
  Colour last = Colour::Red;
  std::int64_t last_change = 1;

  for (std::int64_t k = 1; k <= config.horizon_ticks; ++k) {
    const std::int64_t pre_red = sim.state().red;
    const std::int64_t pre_green = sim.state().green;
    const Colour colour = sim.step();
    if (config.diagnostics) {
      imbalance.add(colour == Colour::Red ? seq.inverse_weight_at(pre_red)
                                          : -seq.inverse_weight_at(pre_green));
    }
    if (k == 1) {
      last = colour;
    } else if (colour != last) {
      last = colour;
      last_change = k;
    }
  }

  RunRecord record;
  record.run_index = run_index;
  record.colour = last;
  record.onset_tick = last_change;
  record.trailing_run = config.horizon_ticks - last_change + 1;
  record.fixated = record.trailing_run >= window;
  record.final_state = sim.state();
  if (config.diagnostics) {
    record.terminal_imbalance = imbalance.sum;
    if (square_tail) {
      const std::int64_t x = std::min(sim.snapshot().red, sim.snapshot().green);
      record.terminal_tail_variance = seq.tail_inverse_square_sum(x).value;
      record.tail_variance_available = true;
    }
  }
  return record;
}

}  // namespace

std::int64_t ExperimentConfig::effective_window() const {
  return fixation_window > 0 ? fixation_window : default_fixation_window(d, horizon_ticks);
}

void ExperimentConfig::validate() const {
  if (d < 1) throw ConfigError("d must be >= 1");
  if (runs < 1) throw ConfigError("runs must be >= 1");
  if (horizon_ticks < d) throw ConfigError("horizon_ticks must be >= d");
  if (fixation_window < 0) throw ConfigError("fixation_window must be >= 0");
  if (effective_window() > horizon_ticks) {
    throw ConfigError("fixation_window must be <= horizon_ticks");
  }
  if (threads < 1) throw ConfigError("threads must be >= 1");
}

WilsonInterval wilson_interval(std::int64_t successes, std::int64_t trials, double z) {
  if (trials < 1) throw std::invalid_argument("wilson interval needs trials >= 1");
  if (successes < 0 || successes > trials) {
    throw std::invalid_argument("successes outside [0, trials]");
  }
  const double n = static_cast<double>(trials);
  const double p = static_cast<double>(successes) / n;
  const double z2 = z * z;
  const double denom = 1.0 + z2 / n;
  const double centre = (p + z2 / (2.0 * n)) / denom;
  const double half = z * std::sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n)) / denom;
  return WilsonInterval{centre - half, centre + half};
}

Aggregate estimate_fixation_probability(const std::vector<RunRecord>& records) {
  if (records.empty()) throw std::invalid_argument("no run records");
  Aggregate agg;
  agg.runs = static_cast<std::int64_t>(records.size());
  double onset_sum = 0.0;
  for (const auto& r : records) {
    if (r.fixated) {
      ++agg.fixated;
      onset_sum += static_cast<double>(r.onset_tick);
    }
  }
  agg.frequency = static_cast<double>(agg.fixated) / static_cast<double>(agg.runs);
  agg.interval = wilson_interval(agg.fixated, agg.runs);
  if (agg.fixated > 0) agg.mean_onset = onset_sum / static_cast<double>(agg.fixated);
  return agg;
}

RunBatchResult run_batch(const ExperimentConfig& config) {
  config.validate();
  const std::int64_t window = config.effective_window();
  const bool square_tail =
      config.diagnostics && config.seq.tail_inverse_square_sum(0).converged();

  RunBatchResult result;
  result.config = config;
  result.records.resize(static_cast<std::size_t>(config.runs));

  const int workers = static_cast<int>(
      std::min<std::int64_t>(config.threads, config.runs));
  if (workers <= 1) {
    for (std::int64_t i = 0; i < config.runs; ++i) {
      result.records[static_cast<std::size_t>(i)] = simulate_run(config, i, window, square_tail);
    }
  } else {
    std::atomic<std::int64_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    auto work = [&] {
      try {
        for (;;) {
          const std::int64_t i = next.fetch_add(1);
          if (i >= config.runs) break;
          result.records[static_cast<std::size_t>(i)] =
              simulate_run(config, i, window, square_tail);
        }
      } catch (...) {
        const std::lock_guard<std::mutex> lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next.store(config.runs);  // drain remaining work
      }
    };
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(workers));
    for (int t = 0; t < workers; ++t) pool.emplace_back(work);
    for (auto& t : pool) t.join();
    if (failure) std::rethrow_exception(failure);
  }

  result.aggregate = estimate_fixation_probability(result.records);
  return result;
}

namespace {

ExperimentConfig apply_axis(const ExperimentConfig& base, const std::string& axis, double value,
                            std::size_t index) {
  const auto as_int = [&](const char* what) {
    if (value != std::floor(value)) {
      throw ConfigError(std::string(what) + " axis requires integer values");
    }
    return static_cast<std::int64_t>(value);
  };
  ExperimentConfig cfg = base;
  cfg.master_seed = split_seed(base.master_seed, static_cast<std::uint64_t>(index));
  if (axis == "d") {
    cfg.d = static_cast<int>(as_int("d"));
    // A counterexample sequence is built around the block length; keep the
    // two in lockstep when sweeping d.
    if (base.seq.kind() == WeightKind::Counterexample) {
      cfg.seq = WeightSequence::counterexample(base.seq.growth(), cfg.d);
    }
  } else if (axis == "rho") {
    switch (base.seq.kind()) {
      case WeightKind::Polynomial:
        cfg.seq = WeightSequence::polynomial(value);
        break;
      case WeightKind::Exponential:
        cfg.seq = WeightSequence::exponential(value);
        break;
      case WeightKind::Counterexample:
        cfg.seq = WeightSequence::counterexample(value, base.seq.block());
        break;
      default:
        throw ConfigError("rho axis requires polynomial, exponential or counterexample weights");
    }
  } else if (axis == "c") {
    if (base.seq.kind() != WeightKind::Constant) {
      throw ConfigError("c axis requires constant weights");
    }
    cfg.seq = WeightSequence::constant(value);
  } else if (axis == "horizon_ticks") {
    cfg.horizon_ticks = as_int("horizon_ticks");
  } else if (axis == "runs") {
    cfg.runs = as_int("runs");
  } else if (axis == "fixation_window") {
    cfg.fixation_window = as_int("fixation_window");
  } else {
    throw ConfigError("unknown sweep axis: " + axis);
  }
  return cfg;
}

}  // namespace

SweepResult sweep(const ExperimentConfig& base, const std::string& axis,
                  const std::vector<double>& values) {
  if (values.empty()) throw ConfigError("sweep grid must not be empty");
  SweepResult result;
  result.axis = axis;
  result.points.reserve(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) {
    SweepPoint point;
    point.index = i;
    point.value = values[i];
    try {
      const ExperimentConfig cfg = apply_axis(base, axis, values[i], i);
      point.result = run_batch(cfg);
    } catch (const std::exception& e) {
      point.error = e.what();
    }
    result.points.push_back(std::move(point));
  }
  return result;
}

namespace {

nlohmann::json aggregate_to_json(const Aggregate& agg) {
  nlohmann::json j{
      {"runs", agg.runs},
      {"fixated", agg.fixated},
      {"frequency", agg.frequency},
      {"wilson_lo", agg.interval.lo},
      {"wilson_hi", agg.interval.hi},
  };
  if (agg.mean_onset) {
    j["mean_onset"] = *agg.mean_onset;
  } else {
    j["mean_onset"] = nullptr;
  }
  return j;
}

nlohmann::json effective_to_json(const ExperimentConfig& config) {
  return nlohmann::json{
      {"weights", config.seq.describe()},
      {"d", config.d},
      {"horizon_ticks", config.horizon_ticks},
      {"runs", config.runs},
      {"master_seed", config.master_seed},
      {"fixation_window", config.effective_window()},
      {"diagnostics", config.diagnostics},
  };
}

}  // namespace

nlohmann::json batch_to_json(const RunBatchResult& result, const Provenance& provenance) {
  nlohmann::json j;
  j["schema_version"] = kResultSchemaVersion;
  j["kind"] = "mc_batch";
  j["config"] = provenance;
  j["effective"] = effective_to_json(result.config);
  j["aggregate"] = aggregate_to_json(result.aggregate);
  nlohmann::json runs = nlohmann::json::array();
  for (const auto& r : result.records) {
    nlohmann::json row{
        {"run", r.run_index},
        {"fixated", r.fixated},
        {"colour", colour_name(r.colour)},
        {"onset_tick", r.onset_tick},
        {"trailing_run", r.trailing_run},
        {"final_r", r.final_state.red},
        {"final_g", r.final_state.green},
    };
    if (result.config.diagnostics) {
      row["terminal_N"] = r.terminal_imbalance;
      if (r.tail_variance_available) {
        row["terminal_B"] = r.terminal_tail_variance;
      } else {
        row["terminal_B"] = nullptr;
      }
    } else {
      row["terminal_N"] = nullptr;
      row["terminal_B"] = nullptr;
    }
    runs.push_back(std::move(row));
  }
  j["runs"] = std::move(runs);
  return j;
}

void write_batch_csv(std::ostream& out, const RunBatchResult& result,
                     const Provenance& provenance) {
  out << "# schema_version = " << kResultSchemaVersion << "\n";
  write_provenance(out, provenance);
  out << "run,fixated,colour,onset_tick,trailing_run,final_r,final_g,terminal_N,terminal_B\n";
  for (const auto& r : result.records) {
    out << r.run_index << ',' << (r.fixated ? 1 : 0) << ',' << colour_name(r.colour) << ','
        << r.onset_tick << ',' << r.trailing_run << ',' << r.final_state.red << ','
        << r.final_state.green << ',';
    if (result.config.diagnostics) out << format_double(r.terminal_imbalance);
    out << ',';
    if (r.tail_variance_available) out << format_double(r.terminal_tail_variance);
    out << '\n';
  }
}

nlohmann::json sweep_to_json(const SweepResult& result, const Provenance& provenance) {
  nlohmann::json j;
  j["schema_version"] = kResultSchemaVersion;
  j["kind"] = "mc_sweep";
  j["config"] = provenance;
  j["axis"] = result.axis;
  nlohmann::json points = nlohmann::json::array();
  for (const auto& p : result.points) {
    nlohmann::json row{{"index", p.index}, {"value", p.value}};
    if (p.result) {
      row["master_seed"] = p.result->config.master_seed;
      row["aggregate"] = aggregate_to_json(p.result->aggregate);
    } else {
      row["error"] = p.error;
    }
    points.push_back(std::move(row));
  }
  j["points"] = std::move(points);
  return j;
}

void write_sweep_csv(std::ostream& out, const SweepResult& result, const Provenance& provenance) {
  out << "# schema_version = " << kResultSchemaVersion << "\n";
  write_provenance(out, provenance);
  out << "axis,value,runs,fixated,frequency,wilson_lo,wilson_hi,mean_onset,error\n";
  for (const auto& p : result.points) {
    out << result.axis << ',' << format_double(p.value) << ',';
    if (p.result) {
      const auto& agg = p.result->aggregate;
      out << agg.runs << ',' << agg.fixated << ',' << format_double(agg.frequency) << ','
          << format_double(agg.interval.lo) << ',' << format_double(agg.interval.hi) << ',';
      if (agg.mean_onset) out << format_double(*agg.mean_onset);
      out << ',';
    } else {
      out << ",,,,,," << p.error;
    }
    out << '\n';
  }
}

}  // namespace urnkit
