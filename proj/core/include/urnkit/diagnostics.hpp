#pragma once

#include <cstdint>
#include <vector>

#include "urnkit/urn.hpp"
#include "urnkit/weights.hpp"

namespace urnkit {

/// Per-tick diagnostic series over a fine path, aligned with the path's
/// ticks (index 0 is the empty urn).
///
///   imbalance      signed sum of inverse weights at the drawn colour's
///                  pre-draw count; stays away from 0 exactly on runs that
///                  fixate (CSV column N)
///   martingale     same sum with weights taken at the block-snapshot
///                  counts; its conditional increments vanish (column M)
///   min_snapshot   smaller of the two snapshot counts (column X)
///   tail_variance  sum of squared inverse weights from min_snapshot on,
///                  the variance budget of future imbalance fluctuations
///                  (column B); empty when the square tail diverges
struct DiagnosticsTrace {
  int d = 1;
  std::vector<double> imbalance;
  std::vector<double> martingale;
  std::vector<std::int64_t> min_snapshot;
  std::vector<double> tail_variance;
  bool tail_variance_available = false;
  const FinePath* path = nullptr;  // non-owning

  std::int64_t ticks() const { return static_cast<std::int64_t>(imbalance.size()) - 1; }
};

DiagnosticsTrace compute_trace(const FinePath& path, const WeightSequence& seq,
                               double tail_tolerance = 1e-12);

/// The imbalance series alone (element k is the value after k ticks).
std::vector<double> imbalance_series(const FinePath& path, const WeightSequence& seq);

/// Closed form of the imbalance after the urn holds `reds` red and `greens`
/// green balls: prefix-sum difference of inverse weights. Independent of the
/// draw order, which is what makes it an oracle for the incremental series.
double imbalance_closed_form(const WeightSequence& seq, std::int64_t reds, std::int64_t greens);

/// Snapshot-weighted series (element k after k ticks). Equals the imbalance
/// series tick-for-tick when d = 1.
std::vector<double> martingale_series(const FinePath& path, const WeightSequence& seq);

/// One-tick conditional expectation of the snapshot-weighted increment at a
/// given snapshot: pi/w_r - (1-pi)/w_g. Identically zero in exact
/// arithmetic; float evaluation leaves only rounding residue.
double martingale_residual(const WeightSequence& seq, const UrnState& snapshot);

struct CouplingCheck {
  double max_gap = 0.0;
  double bound = 0.0;
  bool ok = false;
};

/// Restart coupling check: from restart tick k0, the series
/// martingale - martingale[k0] + imbalance[k0] must track the imbalance
/// within 2d / w at the k0 snapshot minimum. Only claimed for non-decreasing
/// weights; throws std::domain_error otherwise. The gap is evaluated over
/// every tick from k0 to the end of the trace.
CouplingCheck coupling_gap_check(const DiagnosticsTrace& trace, std::int64_t k0,
                                 const WeightSequence& seq, int d);

struct CouplingSweep {
  double worst_margin = 0.0;       // max over k0 of (gap - bound); <= tolerance when ok
  std::int64_t checked = 0;
  std::int64_t violations = 0;
  std::int64_t first_violation_k0 = -1;
  bool ok = true;
};

/// coupling_gap_check at every block-aligned restart tick (k0 = 0, d, 2d, ...)
/// in O(trace) total, via suffix extrema of martingale - imbalance.
CouplingSweep coupling_gap_sweep(const DiagnosticsTrace& trace, const WeightSequence& seq,
                                 int d, double tolerance = 1e-12);

struct FixationReport {
  bool fixated = false;
  Colour colour = Colour::Red;
  std::int64_t onset_tick = 0;    // first tick from which all draws share the colour
  std::int64_t trailing_run = 0;  // length of the final single-colour run
};

/// Trailing-window fixation verdict: fixated iff the last `window` draws
/// share one colour. Requires path.ticks() >= window >= 1.
FixationReport detect_fixation(const FinePath& path, std::int64_t window);

/// Default window: max(10*d, horizon/20).
std::int64_t default_fixation_window(int d, std::int64_t horizon_ticks);

}  // namespace urnkit
