#pragma once

#include <cstdint>
#include <vector>

#include "urnkit/rational.hpp"
#include "urnkit/urn.hpp"
#include "urnkit/weights.hpp"

namespace urnkit {

enum class Arithmetic { Float, Rational };

/// Requesting rational arithmetic for weights that are not exactly rational.
class UnsupportedArithmetic : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Finite-horizon law of the coarse chain: probability of each state
/// (r, d*steps - r) after `steps` coarse steps. Entries are indexed by the
/// red count. In rational mode `exact` carries the same entries exactly and
/// `probs` their double images.
struct ExactDistribution {
  int d = 1;
  std::int64_t steps = 0;
  Arithmetic arithmetic = Arithmetic::Float;
  std::vector<double> probs;
  std::vector<Rational> exact;

  std::int64_t ball_total() const { return static_cast<std::int64_t>(d) * steps; }
  double probability(const UrnState& state) const;
  const Rational& exact_probability(const UrnState& state) const;
  double total_mass() const;
  Rational exact_total_mass() const;
};

/// Law of the coarse chain after `steps` steps by forward dynamic
/// programming over the antidiagonal r + g = d*n.
ExactDistribution coarse_distribution(const WeightSequence& seq, int d, std::int64_t steps,
                                      Arithmetic mode = Arithmetic::Float);

/// Law of the fine chain at tick d*blocks by brute-force enumeration of all
/// 2^(d*blocks) colour sequences, each tick drawn at its block snapshot.
/// Refuses horizons with d*blocks > 24. Agreement with coarse_distribution
/// certifies that the block-snapshot fine chain embeds the coarse chain.
ExactDistribution enumerate_fine_paths(const WeightSequence& seq, int d, int blocks,
                                       Arithmetic mode = Arithmetic::Float);

/// Maximum fine-enumeration horizon in ticks (2^24 paths).
inline constexpr int kMaxEnumerationTicks = 24;

/// Conditional-expectation certificate collected over every node of the fine
/// enumeration tree: at each node, E[increment of the snapshot-weighted
/// series] = pi/w_r - (1-pi)/w_g must vanish.
struct MartingaleTreeCheck {
  std::int64_t nodes = 0;
  double max_abs_residual = 0.0;  // float mode
  bool exact_zero = true;         // rational mode
};

MartingaleTreeCheck martingale_tree_check(const WeightSequence& seq, int d, int blocks,
                                          Arithmetic mode = Arithmetic::Float);

/// Probability that `steps` consecutive coarse steps all add `colour` balls
/// starting from `start`: product over the forced trajectory of pi^d,
/// accumulated in log space. steps = 0 gives 1.
double monochromatic_run_probability(const WeightSequence& seq, int d, UrnState start,
                                     Colour colour, std::int64_t steps);

/// Product lower bound prod_{k=1..terms} (1 + rho^-(k-1)d)^-d for the
/// probability that a counterexample urn keeps drawing its leading colour.
double counterexample_lower_bound(double rho, int d, std::int64_t terms);

struct LimitProduct {
  double value = 0.0;
  std::int64_t terms = 0;
  double log_tail_bound = 0.0;  // certified bound on the discarded log mass
};

/// Infinite-product limit, truncated once the tail certificate
/// (-ln(1-x) <= 2x, geometric envelope) is under `tolerance` and discounted
/// by it, so the result never exceeds the true limit or any finite
/// truncation.
LimitProduct counterexample_lower_bound_limit(double rho, int d, double tolerance = 1e-12);

/// Escape tuning constant (24 + 16 d s_inf)^-2.
double escape_alpha(int d, double s_inf);

/// Lower bound for the probability that the imbalance process leaves the
/// band +/- sqrt(alpha * B): (1/2 - 4a - 2*sqrt(a) - 4*d*a*s) / (2a + 4*sqrt(a) + 7/2).
double escape_ratio(double alpha, int d, double s_inf);

inline constexpr double kEscapeRatioFloor = 1.0 / 12.0;

/// escape_ratio at alpha = escape_alpha(d, s_inf) clears the 1/12 floor.
bool escape_bound_holds(int d, double s_inf);

}  // namespace urnkit
