#pragma once

#include <cstdint>
#include <vector>

#include "urnkit/rational.hpp"
#include "urnkit/rng.hpp"
#include "urnkit/weights.hpp"

namespace urnkit {

enum class Colour : unsigned char { Red, Green };

inline const char* colour_name(Colour c) { return c == Colour::Red ? "red" : "green"; }

struct UrnState {
  std::int64_t red = 0;
  std::int64_t green = 0;

  std::int64_t total() const { return red + green; }
  std::int64_t count(Colour c) const { return c == Colour::Red ? red : green; }
  friend bool operator==(const UrnState&, const UrnState&) = default;
};

/// Last tick strictly before k at which the ball total was a multiple of d:
/// d*floor((k-1)/d). The draw at tick k uses the urn configuration from this
/// tick. For d=1 it is simply k-1.
inline std::int64_t snapshot_tick(std::int64_t k, int d) {
  return static_cast<std::int64_t>(d) * ((k - 1) / d);
}

/// P[draw red] = w_r / (w_r + w_g), evaluated in log space as
/// 1/(1 + exp(ln w_g - ln w_r)) so extreme weights cannot overflow.
double draw_probability(const WeightSequence& seq, const UrnState& state);

/// ln of draw_probability, safe for vanishingly small probabilities.
double log_draw_probability(const WeightSequence& seq, const UrnState& state);

/// Exact draw probability; requires seq.rational_representable().
Rational draw_probability_rational(const WeightSequence& seq, const UrnState& state);

/// d-ball urn path: states[n] holds the counts after n steps, d balls added
/// per step starting from (0,0).
struct CoarsePath {
  int d = 1;
  std::vector<UrnState> states;

  std::int64_t steps() const { return static_cast<std::int64_t>(states.size()) - 1; }
};

/// One-ball-per-tick path. states[k] holds the counts after k ticks and
/// colours[k-1] records the colour drawn at tick k. The draw at tick k uses
/// the configuration at snapshot_tick(k, d).
struct FinePath {
  int d = 1;
  std::vector<UrnState> states;
  std::vector<Colour> colours;

  std::int64_t ticks() const { return static_cast<std::int64_t>(colours.size()); }
  Colour colour_at(std::int64_t k) const { return colours[static_cast<std::size_t>(k - 1)]; }
};

/// One coarse transition: adds a ~ Binomial(d, pi) red balls and d - a green
/// balls, sampled as d independent per-ball draws.
UrnState coarse_step(const WeightSequence& seq, const UrnState& state, int d, Philox4x32& rng);

CoarsePath simulate_coarse(const WeightSequence& seq, int d, std::int64_t steps, Philox4x32& rng);
FinePath simulate_fine(const WeightSequence& seq, int d, std::int64_t ticks, Philox4x32& rng);

/// Streaming fine-chain simulator for long horizons; keeps only the current
/// state and block snapshot instead of the whole path.
class FineSimulator {
 public:
  FineSimulator(const WeightSequence& seq, int d, Philox4x32 rng);

  /// Advance one tick; returns the colour drawn.
  Colour step();

  std::int64_t tick() const { return tick_; }
  const UrnState& state() const { return state_; }
  /// Configuration used by the most recent draw (tick() >= 1).
  const UrnState& snapshot() const { return snapshot_; }

 private:
  const WeightSequence& seq_;
  int d_;
  Philox4x32 rng_;
  std::int64_t tick_ = 0;
  UrnState state_{};
  UrnState snapshot_{};
  double red_probability_ = 0.5;
};

}  // namespace urnkit
