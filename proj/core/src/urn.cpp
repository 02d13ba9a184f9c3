#include "urnkit/urn.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace urnkit {

namespace {

// log(1 + e^x) without overflow.
inline double softplus(double x) {
  if (x > 36.0) return x;
  if (x < -745.0) return 0.0;
  return std::log1p(std::exp(x));
}

inline void check_params(const UrnState& state, int d) {
  if (state.red < 0 || state.green < 0) {
    throw std::invalid_argument("urn state counts must be non-negative");
  }
  if (d < 1) throw std::invalid_argument("urn parameter d must be >= 1");
}

}  // namespace

double draw_probability(const WeightSequence& seq, const UrnState& state) {
  const double diff = seq.log_weight_at(state.green) - seq.log_weight_at(state.red);
  const double p = 1.0 / (1.0 + std::exp(diff));
  // extreme imbalances round onto the boundary; keep the interval open
  if (p <= 0.0) return std::numeric_limits<double>::denorm_min();
  if (p >= 1.0) return 1.0 - std::numeric_limits<double>::epsilon() / 2.0;
  return p;
}

double log_draw_probability(const WeightSequence& seq, const UrnState& state) {
  const double diff = seq.log_weight_at(state.green) - seq.log_weight_at(state.red);
  return -softplus(diff);
}

Rational draw_probability_rational(const WeightSequence& seq, const UrnState& state) {
  const Rational wr = seq.weight_rational_at(state.red);
  const Rational wg = seq.weight_rational_at(state.green);
  Rational pi = wr / (wr + wg);
  pi.canonicalize();
  return pi;
}

UrnState coarse_step(const WeightSequence& seq, const UrnState& state, int d, Philox4x32& rng) {
  check_params(state, d);
  if (state.total() % d != 0) {
    throw std::invalid_argument("coarse state total must be a multiple of d");
  }
  const double pi = draw_probability(seq, state);
  std::int64_t reds = 0;
  for (int i = 0; i < d; ++i) {
    if (rng.next_bernoulli(pi)) ++reds;
  }
  return UrnState{state.red + reds, state.green + (d - reds)};
}

CoarsePath simulate_coarse(const WeightSequence& seq, int d, std::int64_t steps, Philox4x32& rng) {
  if (steps < 0) throw std::invalid_argument("steps must be >= 0");
  CoarsePath path;
  path.d = d;
  path.states.reserve(static_cast<std::size_t>(steps) + 1);
  UrnState state{};
  path.states.push_back(state);
  for (std::int64_t n = 0; n < steps; ++n) {
    state = coarse_step(seq, state, d, rng);
    path.states.push_back(state);
  }
  return path;
}

FineSimulator::FineSimulator(const WeightSequence& seq, int d, Philox4x32 rng)
    : seq_(seq), d_(d), rng_(rng) {
  if (d < 1) throw std::invalid_argument("urn parameter d must be >= 1");
}

Colour FineSimulator::step() {
  // The draw at tick k+1 reads the configuration at snapshot_tick(k+1, d),
  // which refreshes exactly when the current total is a multiple of d.
  if (tick_ % d_ == 0) {
    snapshot_ = state_;
    red_probability_ = draw_probability(seq_, snapshot_);
  }
  const bool red = rng_.next_bernoulli(red_probability_);
  if (red) {
    ++state_.red;
  } else {
    ++state_.green;
  }
  ++tick_;
  return red ? Colour::Red : Colour::Green;
}

FinePath simulate_fine(const WeightSequence& seq, int d, std::int64_t ticks, Philox4x32& rng) {
  if (ticks < 0) throw std::invalid_argument("ticks must be >= 0");
  if (d < 1) throw std::invalid_argument("urn parameter d must be >= 1");
  FinePath path;
  path.d = d;
  path.states.reserve(static_cast<std::size_t>(ticks) + 1);
  path.colours.reserve(static_cast<std::size_t>(ticks));
  UrnState state{};
  UrnState snapshot{};
  double pi = 0.5;
  path.states.push_back(state);
  for (std::int64_t k = 0; k < ticks; ++k) {
    if (k % d == 0) {
      snapshot = state;
      pi = draw_probability(seq, snapshot);
    }
    const bool red = rng.next_bernoulli(pi);
    if (red) {
      ++state.red;
    } else {
      ++state.green;
    }
    path.colours.push_back(red ? Colour::Red : Colour::Green);
    path.states.push_back(state);
  }
  return path;
}

}  // namespace urnkit
