#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "urnkit/diagnostics.hpp"
#include "urnkit/exact.hpp"
#include "urnkit/rng.hpp"
#include "urnkit/urn.hpp"

using namespace urnkit;

namespace {

FinePath path_from_colours(int d, const std::vector<Colour>& colours) {
  FinePath path;
  path.d = d;
  path.states.push_back({});
  UrnState state{};
  for (Colour c : colours) {
    if (c == Colour::Red) {
      ++state.red;
    } else {
      ++state.green;
    }
    path.colours.push_back(c);
    path.states.push_back(state);
  }
  return path;
}

constexpr Colour R = Colour::Red;
constexpr Colour G = Colour::Green;

}  // namespace

TEST_SUITE("diagnostics") {

TEST_CASE("imbalance: two red draws with linear weights") {
  const auto seq = WeightSequence::polynomial(1.0);  // 1, 2, 3, ...
  const auto path = path_from_colours(1, {R, R});
  const auto series = imbalance_series(path, seq);
  CHECK(series[0] == 0.0);
  CHECK(series[1] == doctest::Approx(1.0));
  CHECK(series[2] == doctest::Approx(1.5));
}

TEST_CASE("imbalance: alternating draws cancel") {
  const auto seq = WeightSequence::exponential(3.0);
  const auto path = path_from_colours(1, {R, G});
  const auto series = imbalance_series(path, seq);
  CHECK(series[2] == doctest::Approx(0.0));
  CHECK(imbalance_closed_form(seq, 1, 1) == doctest::Approx(0.0));
}

TEST_CASE("imbalance matches the closed form on random paths") {
  const auto kinds = {WeightSequence::constant(1.0), WeightSequence::polynomial(2.0),
                      WeightSequence::exponential(2.0), WeightSequence::counterexample(2.0, 2)};
  int stream = 0;
  for (const auto& seq : kinds) {
    for (int d : {1, 3}) {
      Philox4x32 rng(808, static_cast<std::uint64_t>(stream++));
      const auto path = simulate_fine(seq, d, 10000, rng);
      const auto series = imbalance_series(path, seq);
      for (std::int64_t k : {1, 2, 10, 500, 9999, 10000}) {
        const auto& s = path.states[static_cast<std::size_t>(k)];
        const double closed = imbalance_closed_form(seq, s.red, s.green);
        CHECK(std::abs(series[static_cast<std::size_t>(k)] - closed) <= 1e-10);
      }
    }
  }
}

TEST_CASE("martingale series equals imbalance when d = 1") {
  const auto seq = WeightSequence::polynomial(2.0);
  Philox4x32 rng(55, 0);
  const auto path = simulate_fine(seq, 1, 2000, rng);
  const auto n = imbalance_series(path, seq);
  const auto m = martingale_series(path, seq);
  for (std::size_t k = 0; k < n.size(); ++k) {
    CHECK(m[k] == doctest::Approx(n[k]).epsilon(1e-14));
  }
}

TEST_CASE("martingale series: first all-red block uses the empty snapshot") {
  const auto seq = WeightSequence::polynomial(1.0);
  const int d = 3;
  const auto path = path_from_colours(d, {R, R, R});
  const auto m = martingale_series(path, seq);
  // snapshot stays (0,0) through the block, so each increment is 1/w_0
  CHECK(m[3] == doctest::Approx(3.0 / seq.weight_at(0)));
}

TEST_CASE("martingale series: constant weights reduce to the colour difference") {
  const double c = 4.0;
  const auto seq = WeightSequence::constant(c);
  Philox4x32 rng(66, 0);
  const auto path = simulate_fine(seq, 2, 500, rng);
  const auto m = martingale_series(path, seq);
  for (std::int64_t k = 0; k <= 500; ++k) {
    const auto& s = path.states[static_cast<std::size_t>(k)];
    CHECK(m[static_cast<std::size_t>(k)] ==
          doctest::Approx(static_cast<double>(s.red - s.green) / c).epsilon(1e-12));
  }
}

TEST_CASE("martingale residual vanishes at any snapshot") {
  CHECK(martingale_residual(WeightSequence::constant(2.0), {5, 9}) == 0.0);
  const auto exp3 = WeightSequence::exponential(3.0);
  const UrnState snap{4, 1};
  const double scale =
      exp3.inverse_weight_at(snap.red) + exp3.inverse_weight_at(snap.green);
  CHECK(std::abs(martingale_residual(exp3, snap)) <= 1e-15 * scale);
  // exact arithmetic: identically zero
  const auto seq = WeightSequence::polynomial(1.0);
  const Rational pi = draw_probability_rational(seq, {2, 3});
  const Rational residual =
      pi / seq.weight_rational_at(2) - (1 - pi) / seq.weight_rational_at(3);
  CHECK(residual == 0);
}

TEST_CASE("trace: min snapshot count and variance budget") {
  const auto seq = WeightSequence::polynomial(2.0);
  const auto path = path_from_colours(2, {R, R, G, R});
  const auto trace = compute_trace(path, seq);
  REQUIRE(trace.tail_variance_available);
  CHECK(trace.min_snapshot[0] == 0);
  CHECK(trace.min_snapshot[1] == 0);  // snapshot (0,0)
  CHECK(trace.min_snapshot[2] == 0);
  CHECK(trace.min_snapshot[3] == 0);  // snapshot (2,0)
  CHECK(trace.min_snapshot[4] == 0);
  const auto path2 = path_from_colours(2, {R, G, R, G, R, R});
  const auto trace2 = compute_trace(path2, seq);
  CHECK(trace2.min_snapshot[5] == 2);  // snapshot (2,2) after four balanced ticks

  // all-red: minimum stays 0 and the budget stays the full sum
  const auto allred = path_from_colours(2, {R, R, R, R});
  const auto trace3 = compute_trace(allred, seq);
  const double full = seq.tail_inverse_square_sum(0).value;
  for (std::size_t k = 0; k < trace3.tail_variance.size(); ++k) {
    CHECK(trace3.min_snapshot[k] == 0);
    CHECK(trace3.tail_variance[k] == doctest::Approx(full));
  }
}

TEST_CASE("trace: snapshot minimum is non-decreasing, variance budget non-increasing") {
  const auto seq = WeightSequence::polynomial(2.0);
  Philox4x32 rng(31, 2);
  const auto path = simulate_fine(seq, 2, 5000, rng);
  const auto trace = compute_trace(path, seq);
  REQUIRE(trace.tail_variance_available);
  for (std::size_t k = 1; k < trace.tail_variance.size(); ++k) {
    CHECK(trace.min_snapshot[k] >= trace.min_snapshot[k - 1]);
    CHECK(trace.tail_variance[k] <= trace.tail_variance[k - 1] + 1e-15);
  }
}

TEST_CASE("trace: variance budget vanishes along balanced paths") {
  // Strictly alternating draws keep both counts growing, so the snapshot
  // minimum runs off to infinity and the budget decays to nothing.
  const auto seq = WeightSequence::polynomial(2.0);
  std::vector<Colour> colours;
  for (int i = 0; i < 5000; ++i) {
    colours.push_back(R);
    colours.push_back(G);
  }
  const auto path = path_from_colours(2, colours);
  const auto trace = compute_trace(path, seq);
  REQUIRE(trace.tail_variance_available);
  CHECK(trace.min_snapshot.back() >= 4998);
  CHECK(trace.tail_variance.back() < 1e-9);
  CHECK(trace.tail_variance.front() > 1.0);
}

TEST_CASE("trace: divergent square tail marks the budget unavailable") {
  const auto seq = WeightSequence::counterexample(2.0, 2);
  Philox4x32 rng(13, 0);
  const auto path = simulate_fine(seq, 2, 100, rng);
  const auto trace = compute_trace(path, seq);
  CHECK_FALSE(trace.tail_variance_available);
  CHECK(trace.tail_variance.empty());
  CHECK(trace.imbalance.size() == 101);
}

TEST_CASE("coupling gap: zero for d = 1 and for constant weights") {
  {
    const auto seq = WeightSequence::polynomial(2.0);
    Philox4x32 rng(71, 0);
    const auto path = simulate_fine(seq, 1, 2000, rng);
    const auto trace = compute_trace(path, seq);
    const auto check = coupling_gap_check(trace, 0, seq, 1);
    CHECK(check.max_gap <= 1e-14);
    CHECK(check.ok);
  }
  {
    const auto seq = WeightSequence::constant(2.0);
    Philox4x32 rng(72, 0);
    const auto path = simulate_fine(seq, 4, 2000, rng);
    const auto trace = compute_trace(path, seq);
    const auto check = coupling_gap_check(trace, 100, seq, 4);
    CHECK(check.max_gap <= 1e-13);
    CHECK(check.ok);
  }
}

TEST_CASE("coupling gap: bounded by 2d over the snapshot-min weight") {
  const auto seq = WeightSequence::polynomial(2.0);
  for (std::uint64_t stream = 0; stream < 20; ++stream) {
    Philox4x32 rng(2025, stream);
    const auto path = simulate_fine(seq, 3, 3000, rng);
    const auto trace = compute_trace(path, seq);
    for (std::int64_t k0 : {0, 300, 600, 1500, 2997}) {
      const auto check = coupling_gap_check(trace, k0, seq, 3);
      CHECK(check.ok);
    }
  }
}

TEST_CASE("coupling gap refuses non-monotone weights") {
  const auto seq = WeightSequence::counterexample(2.0, 2);
  Philox4x32 rng(44, 0);
  const auto path = simulate_fine(seq, 2, 50, rng);
  const auto trace = compute_trace(path, seq);
  CHECK_THROWS_AS(coupling_gap_check(trace, 0, seq, 2), std::domain_error);
  CHECK_THROWS_AS(coupling_gap_sweep(trace, seq, 2), std::domain_error);
}

TEST_CASE("coupling sweep agrees with per-restart checks") {
  const auto seq = WeightSequence::exponential(2.0);
  Philox4x32 rng(91, 5);
  const auto path = simulate_fine(seq, 2, 800, rng);
  const auto trace = compute_trace(path, seq);
  const auto sweep = coupling_gap_sweep(trace, seq, 2);
  CHECK(sweep.checked == 401);
  CHECK(sweep.ok);
  double worst = -1e300;
  for (std::int64_t k0 = 0; k0 <= 800; k0 += 2) {
    const auto check = coupling_gap_check(trace, k0, seq, 2);
    worst = std::max(worst, check.max_gap - check.bound);
    CHECK(check.ok);
  }
  CHECK(sweep.worst_margin == doctest::Approx(worst).epsilon(1e-12));
}

TEST_CASE("terminal martingale value centres on zero across runs") {
  // M starts at 0 and has vanishing conditional increments, so its terminal
  // sample mean over independent runs must sit within a few standard errors
  // of zero.
  const auto seq = WeightSequence::polynomial(2.0);
  const int runs = 2000;
  const std::int64_t ticks = 500;
  double sum = 0.0;
  double sum_sq = 0.0;
  for (int i = 0; i < runs; ++i) {
    Philox4x32 rng(606060, static_cast<std::uint64_t>(i));
    const auto path = simulate_fine(seq, 3, ticks, rng);
    const double terminal = martingale_series(path, seq).back();
    sum += terminal;
    sum_sq += terminal * terminal;
  }
  const double mean = sum / runs;
  const double sd = std::sqrt(std::max(sum_sq / runs - mean * mean, 1e-30));
  CHECK(std::abs(mean) <= 5.0 * sd / std::sqrt(static_cast<double>(runs)));
}

TEST_CASE("fixation detector") {
  const auto allred = path_from_colours(1, {R, R, R, R, R});
  for (std::int64_t window : {1, 3, 5}) {
    const auto fix = detect_fixation(allred, window);
    CHECK(fix.fixated);
    CHECK(fix.colour == Colour::Red);
    CHECK(fix.onset_tick == 1);
    CHECK(fix.trailing_run == 5);
  }

  const auto alternating = path_from_colours(1, {R, G, R, G, R, G});
  CHECK_FALSE(detect_fixation(alternating, 2).fixated);
  CHECK(detect_fixation(alternating, 1).fixated);  // a single draw always "runs"

  const auto settled = path_from_colours(1, {R, G, G, G, G});
  const auto fix = detect_fixation(settled, 3);
  CHECK(fix.fixated);
  CHECK(fix.colour == Colour::Green);
  CHECK(fix.onset_tick == 2);
  CHECK(fix.trailing_run == 4);

  CHECK_THROWS_AS(detect_fixation(settled, 6), std::invalid_argument);
  CHECK_THROWS_AS(detect_fixation(settled, 0), std::invalid_argument);
}

TEST_CASE("default fixation window") {
  CHECK(default_fixation_window(1, 100000) == 5000);
  CHECK(default_fixation_window(2, 100) == 20);
  CHECK(default_fixation_window(5, 100) == 50);
  CHECK(default_fixation_window(5, 30) == 30);  // clamped to the horizon
}

TEST_CASE("fixated paths keep a large imbalance, per the detector") {
  // counterexample weights fixate fast; after the onset the imbalance keeps
  // drifting away from zero
  const auto seq = WeightSequence::counterexample(2.0, 2);
  int fixated_count = 0;
  for (std::uint64_t stream = 0; stream < 50; ++stream) {
    Philox4x32 rng(171717, stream);
    const auto path = simulate_fine(seq, 2, 10000, rng);
    const auto fix = detect_fixation(path, 1000);
    if (!fix.fixated) continue;
    ++fixated_count;
    const auto series = imbalance_series(path, seq);
    CHECK(std::abs(series.back()) > 0.5);
  }
  CHECK(fixated_count >= 45);
}

}  // TEST_SUITE
