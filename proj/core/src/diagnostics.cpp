#include "urnkit/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

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

void check_path(const FinePath& path) {
  if (path.states.empty() || path.states.front() != UrnState{}) {
    throw std::invalid_argument("fine path must start at (0,0)");
  }
  if (path.states.size() != path.colours.size() + 1) {
    throw std::invalid_argument("fine path states/colours sizes disagree");
  }
  if (path.d < 1) throw std::invalid_argument("fine path needs d >= 1");
}

}  // namespace

DiagnosticsTrace compute_trace(const FinePath& path, const WeightSequence& seq,
                               double tail_tolerance) {
  check_path(path);
  const std::int64_t ticks = path.ticks();
  const int d = path.d;

  DiagnosticsTrace trace;
  trace.d = d;
  trace.path = &path;
  trace.imbalance.resize(static_cast<std::size_t>(ticks) + 1, 0.0);
  trace.martingale.resize(static_cast<std::size_t>(ticks) + 1, 0.0);
  trace.min_snapshot.resize(static_cast<std::size_t>(ticks) + 1, 0);

  KahanSum imbalance;
  KahanSum martingale;
  UrnState state{};
  UrnState snapshot{};
  for (std::int64_t k = 1; k <= ticks; ++k) {
    if ((k - 1) % d == 0) snapshot = state;  // snapshot_tick(k, d) == k-1 here
    const Colour colour = path.colour_at(k);
    if (colour == Colour::Red) {
      imbalance.add(seq.inverse_weight_at(state.red));
      martingale.add(seq.inverse_weight_at(snapshot.red));
      ++state.red;
    } else {
      imbalance.add(-seq.inverse_weight_at(state.green));
      martingale.add(-seq.inverse_weight_at(snapshot.green));
      ++state.green;
    }
    if (state != path.states[static_cast<std::size_t>(k)]) {
      throw std::invalid_argument("fine path colours do not match its states");
    }
    const auto idx = static_cast<std::size_t>(k);
    trace.imbalance[idx] = imbalance.sum;
    trace.martingale[idx] = martingale.sum;
    trace.min_snapshot[idx] = std::min(snapshot.red, snapshot.green);
  }

  trace.tail_variance_available = seq.tail_inverse_square_sum(0, tail_tolerance).converged();
  if (trace.tail_variance_available) {
    // One tail evaluation at the largest snapshot minimum, then a backward
    // suffix pass: B(x) = B(x+1) + 1/w_x^2. The snapshot minimum is
    // non-decreasing, so the last entry is the largest.
    const std::int64_t x_max = trace.min_snapshot[static_cast<std::size_t>(ticks)];
    std::vector<double> suffix(static_cast<std::size_t>(x_max) + 1);
    KahanSum tail;
    tail.add(seq.tail_inverse_square_sum(x_max, tail_tolerance).value);
    suffix[static_cast<std::size_t>(x_max)] = tail.sum;
    for (std::int64_t x = x_max - 1; x >= 0; --x) {
      tail.add(std::exp(-2.0 * seq.log_weight_at(x)));
      suffix[static_cast<std::size_t>(x)] = tail.sum;
    }
    trace.tail_variance.resize(static_cast<std::size_t>(ticks) + 1);
    for (std::size_t k = 0; k < trace.tail_variance.size(); ++k) {
      trace.tail_variance[k] = suffix[static_cast<std::size_t>(trace.min_snapshot[k])];
    }
  }
  return trace;
}

std::vector<double> imbalance_series(const FinePath& path, const WeightSequence& seq) {
  check_path(path);
  std::vector<double> out(path.states.size(), 0.0);
  KahanSum sum;
  UrnState state{};
  for (std::int64_t k = 1; k <= path.ticks(); ++k) {
    if (path.colour_at(k) == Colour::Red) {
      sum.add(seq.inverse_weight_at(state.red));
      ++state.red;
    } else {
      sum.add(-seq.inverse_weight_at(state.green));
      ++state.green;
    }
    out[static_cast<std::size_t>(k)] = sum.sum;
  }
  return out;
}

double imbalance_closed_form(const WeightSequence& seq, std::int64_t reds, std::int64_t greens) {
  if (reds < 0 || greens < 0) throw std::invalid_argument("counts must be >= 0");
  KahanSum red_prefix;
  for (std::int64_t j = 0; j < reds; ++j) red_prefix.add(seq.inverse_weight_at(j));
  KahanSum green_prefix;
  for (std::int64_t j = 0; j < greens; ++j) green_prefix.add(seq.inverse_weight_at(j));
  return red_prefix.sum - green_prefix.sum;
}

std::vector<double> martingale_series(const FinePath& path, const WeightSequence& seq) {
  check_path(path);
  std::vector<double> out(path.states.size(), 0.0);
  KahanSum sum;
  UrnState state{};
  UrnState snapshot{};
  for (std::int64_t k = 1; k <= path.ticks(); ++k) {
    if ((k - 1) % path.d == 0) snapshot = state;
    if (path.colour_at(k) == Colour::Red) {
      sum.add(seq.inverse_weight_at(snapshot.red));
      ++state.red;
    } else {
      sum.add(-seq.inverse_weight_at(snapshot.green));
      ++state.green;
    }
    out[static_cast<std::size_t>(k)] = sum.sum;
  }
  return out;
}

double martingale_residual(const WeightSequence& seq, const UrnState& snapshot) {
  const double pi = draw_probability(seq, snapshot);
  return pi * seq.inverse_weight_at(snapshot.red) -
         (1.0 - pi) * seq.inverse_weight_at(snapshot.green);
}

namespace {

void require_non_decreasing(const WeightSequence& seq) {
  if (!seq.is_non_decreasing()) {
    throw std::domain_error("coupling bound is only claimed for non-decreasing weights (got " +
                            seq.describe() + ")");
  }
}

}  // namespace

CouplingCheck coupling_gap_check(const DiagnosticsTrace& trace, std::int64_t k0,
                                 const WeightSequence& seq, int d) {
  require_non_decreasing(seq);
  const std::int64_t ticks = trace.ticks();
  if (k0 < 0 || k0 > ticks) throw std::invalid_argument("k0 outside trace");

  // |M_k - M_k0 + N_k0 - N_k| = |D_k - D_k0| with D = M - N.
  const auto d_at = [&](std::int64_t k) {
    return trace.martingale[static_cast<std::size_t>(k)] -
           trace.imbalance[static_cast<std::size_t>(k)];
  };
  const double base = d_at(k0);
  double max_gap = 0.0;
  for (std::int64_t k = k0; k <= ticks; ++k) {
    max_gap = std::max(max_gap, std::abs(d_at(k) - base));
  }
  CouplingCheck check;
  check.max_gap = max_gap;
  check.bound = 2.0 * static_cast<double>(d) *
                seq.inverse_weight_at(trace.min_snapshot[static_cast<std::size_t>(k0)]);
  check.ok = max_gap <= check.bound + 1e-12;
  return check;
}

CouplingSweep coupling_gap_sweep(const DiagnosticsTrace& trace, const WeightSequence& seq, int d,
                                 double tolerance) {
  require_non_decreasing(seq);
  const std::int64_t ticks = trace.ticks();
  const auto n = static_cast<std::size_t>(ticks) + 1;

  std::vector<double> diff(n);
  for (std::size_t k = 0; k < n; ++k) {
    diff[k] = trace.martingale[k] - trace.imbalance[k];
  }
  std::vector<double> suffix_max(n), suffix_min(n);
  suffix_max[n - 1] = suffix_min[n - 1] = diff[n - 1];
  for (std::size_t k = n - 1; k-- > 0;) {
    suffix_max[k] = std::max(diff[k], suffix_max[k + 1]);
    suffix_min[k] = std::min(diff[k], suffix_min[k + 1]);
  }

  CouplingSweep sweep;
  sweep.worst_margin = -std::numeric_limits<double>::infinity();
  for (std::int64_t k0 = 0; k0 <= ticks; k0 += d) {
    const auto idx = static_cast<std::size_t>(k0);
    const double gap = std::max(suffix_max[idx] - diff[idx], diff[idx] - suffix_min[idx]);
    const double bound =
        2.0 * static_cast<double>(d) * seq.inverse_weight_at(trace.min_snapshot[idx]);
    const double margin = gap - bound;
    sweep.worst_margin = std::max(sweep.worst_margin, margin);
    ++sweep.checked;
    if (margin > tolerance) {
      ++sweep.violations;
      if (sweep.first_violation_k0 < 0) sweep.first_violation_k0 = k0;
    }
  }
  sweep.ok = sweep.violations == 0;
  return sweep;
}

FixationReport detect_fixation(const FinePath& path, std::int64_t window) {
  check_path(path);
  if (window < 1) throw std::invalid_argument("fixation window must be >= 1");
  const std::int64_t ticks = path.ticks();
  if (ticks < window) throw std::invalid_argument("path shorter than fixation window");

  FixationReport report;
  report.colour = path.colour_at(ticks);
  std::int64_t onset = 1;
  for (std::int64_t k = ticks; k > 1; --k) {
    if (path.colour_at(k - 1) != report.colour) {
      onset = k;
      break;
    }
  }
  report.onset_tick = onset;
  report.trailing_run = ticks - onset + 1;
  report.fixated = report.trailing_run >= window;
  return report;
}

std::int64_t default_fixation_window(int d, std::int64_t horizon_ticks) {
  if (horizon_ticks < 1) return 1;
  const std::int64_t window =
      std::max<std::int64_t>(10 * static_cast<std::int64_t>(d), horizon_ticks / 20);
  return std::clamp<std::int64_t>(window, 1, horizon_ticks);
}

}  // namespace urnkit
