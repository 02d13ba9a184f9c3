#include "urnkit/exact.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>
#include <type_traits>

namespace urnkit {

namespace {

void require_rational(const WeightSequence& seq) {
  if (!seq.rational_representable()) {
    throw UnsupportedArithmetic("rational arithmetic is not available for " + seq.describe());
  }
}

std::vector<double> binomial_row(int d) {
  std::vector<double> row(static_cast<std::size_t>(d) + 1, 1.0);
  for (int a = 1; a <= d; ++a) {
    row[static_cast<std::size_t>(a)] =
        row[static_cast<std::size_t>(a - 1)] * static_cast<double>(d - a + 1) / static_cast<double>(a);
  }
  return row;
}

void check_enumeration_horizon(int d, int blocks) {
  if (blocks < 0) throw std::invalid_argument("blocks must be >= 0");
  const std::int64_t ticks = static_cast<std::int64_t>(d) * blocks;
  if (ticks > kMaxEnumerationTicks) {
    throw std::invalid_argument("fine enumeration limited to d*blocks <= " +
                                std::to_string(kMaxEnumerationTicks) + " ticks (got " +
                                std::to_string(ticks) + ")");
  }
}

}  // namespace

double ExactDistribution::probability(const UrnState& state) const {
  if (state.red < 0 || state.red + state.green != ball_total()) return 0.0;
  return probs[static_cast<std::size_t>(state.red)];
}

const Rational& ExactDistribution::exact_probability(const UrnState& state) const {
  if (arithmetic != Arithmetic::Rational) {
    throw std::logic_error("distribution was not computed in rational mode");
  }
  if (state.red < 0 || state.red + state.green != ball_total()) {
    static const Rational zero(0);
    return zero;
  }
  return exact[static_cast<std::size_t>(state.red)];
}

double ExactDistribution::total_mass() const {
  double sum = 0.0;
  for (double p : probs) sum += p;
  return sum;
}

Rational ExactDistribution::exact_total_mass() const {
  Rational sum(0);
  for (const auto& q : exact) sum += q;
  return sum;
}

ExactDistribution coarse_distribution(const WeightSequence& seq, int d, std::int64_t steps,
                                      Arithmetic mode) {
  if (d < 1) throw std::invalid_argument("d must be >= 1");
  if (steps < 0) throw std::invalid_argument("steps must be >= 0");

  ExactDistribution dist;
  dist.d = d;
  dist.steps = steps;
  dist.arithmetic = mode;

  if (mode == Arithmetic::Float) {
    const auto choose = binomial_row(d);
    std::vector<double> cur{1.0};
    for (std::int64_t n = 0; n < steps; ++n) {
      std::vector<double> next(cur.size() + static_cast<std::size_t>(d), 0.0);
      for (std::size_t r = 0; r < cur.size(); ++r) {
        if (cur[r] == 0.0) continue;
        const UrnState state{static_cast<std::int64_t>(r),
                             static_cast<std::int64_t>(d) * n - static_cast<std::int64_t>(r)};
        const double pi = draw_probability(seq, state);
        double pow_red = 1.0;
        for (int a = 0; a <= d; ++a) {
          // pi^a * (1-pi)^(d-a), built incrementally
          const double mass =
              choose[static_cast<std::size_t>(a)] * pow_red * std::pow(1.0 - pi, d - a);
          next[r + static_cast<std::size_t>(a)] += cur[r] * mass;
          pow_red *= pi;
        }
      }
      cur = std::move(next);
    }
    dist.probs = std::move(cur);
    return dist;
  }

  require_rational(seq);
  std::vector<Rational> cur{Rational(1)};
  for (std::int64_t n = 0; n < steps; ++n) {
    std::vector<Rational> next(cur.size() + static_cast<std::size_t>(d), Rational(0));
    for (std::size_t r = 0; r < cur.size(); ++r) {
      if (cur[r] == 0) continue;
      const UrnState state{static_cast<std::int64_t>(r),
                           static_cast<std::int64_t>(d) * n - static_cast<std::int64_t>(r)};
      const Rational pi = draw_probability_rational(seq, state);
      const Rational co = 1 - pi;
      for (int a = 0; a <= d; ++a) {
        Rational mass = rational_binomial(static_cast<unsigned>(d), static_cast<unsigned>(a)) *
                        rational_pow(pi, static_cast<std::uint64_t>(a)) *
                        rational_pow(co, static_cast<std::uint64_t>(d - a));
        mass.canonicalize();
        next[r + static_cast<std::size_t>(a)] += cur[r] * mass;
      }
    }
    cur = std::move(next);
  }
  dist.exact = std::move(cur);
  dist.probs.reserve(dist.exact.size());
  for (const auto& q : dist.exact) dist.probs.push_back(to_double(q));
  return dist;
}

namespace {

// Depth-first walk over all colour sequences of the fine chain. At tick k the
// draw uses the state recorded at the last multiple-of-d total.
template <typename Prob, typename PiFn>
void enumerate_walk(const PiFn& pi_at, int d, std::int64_t ticks, std::int64_t tick,
                    UrnState state, UrnState snapshot, Prob prob, std::vector<Prob>& out) {
  if (tick == ticks) {
    out[static_cast<std::size_t>(state.red)] += prob;
    return;
  }
  if (tick % d == 0) snapshot = state;
  const Prob pi = pi_at(snapshot);
  UrnState red = state;
  ++red.red;
  enumerate_walk(pi_at, d, ticks, tick + 1, red, snapshot, Prob(prob * pi), out);
  UrnState green = state;
  ++green.green;
  enumerate_walk(pi_at, d, ticks, tick + 1, green, snapshot, Prob(prob * (1 - pi)), out);
}

}  // namespace

ExactDistribution enumerate_fine_paths(const WeightSequence& seq, int d, int blocks,
                                       Arithmetic mode) {
  if (d < 1) throw std::invalid_argument("d must be >= 1");
  check_enumeration_horizon(d, blocks);
  const std::int64_t ticks = static_cast<std::int64_t>(d) * blocks;

  ExactDistribution dist;
  dist.d = d;
  dist.steps = blocks;
  dist.arithmetic = mode;

  if (mode == Arithmetic::Float) {
    std::vector<double> out(static_cast<std::size_t>(ticks) + 1, 0.0);
    enumerate_walk([&seq](const UrnState& s) { return draw_probability(seq, s); }, d, ticks, 0,
                   UrnState{}, UrnState{}, 1.0, out);
    dist.probs = std::move(out);
    return dist;
  }

  require_rational(seq);
  std::vector<Rational> out(static_cast<std::size_t>(ticks) + 1, Rational(0));
  enumerate_walk([&seq](const UrnState& s) { return draw_probability_rational(seq, s); }, d,
                 ticks, 0, UrnState{}, UrnState{}, Rational(1), out);
  dist.exact = std::move(out);
  dist.probs.reserve(dist.exact.size());
  for (const auto& q : dist.exact) dist.probs.push_back(to_double(q));
  return dist;
}

namespace {

template <typename Mode>
void tree_walk_residuals(const WeightSequence& seq, int d, std::int64_t ticks, std::int64_t tick,
                         UrnState state, UrnState snapshot, MartingaleTreeCheck& check,
                         Mode mode_tag) {
  if (tick == ticks) return;
  if (tick % d == 0) snapshot = state;
  ++check.nodes;
  if constexpr (std::is_same_v<Mode, double>) {
    const double pi = draw_probability(seq, snapshot);
    const double residual = pi * seq.inverse_weight_at(snapshot.red) -
                            (1.0 - pi) * seq.inverse_weight_at(snapshot.green);
    check.max_abs_residual = std::max(check.max_abs_residual, std::abs(residual));
  } else {
    const Rational pi = draw_probability_rational(seq, snapshot);
    const Rational residual = pi / seq.weight_rational_at(snapshot.red) -
                              (1 - pi) / seq.weight_rational_at(snapshot.green);
    if (residual != 0) check.exact_zero = false;
  }
  UrnState red = state;
  ++red.red;
  tree_walk_residuals(seq, d, ticks, tick + 1, red, snapshot, check, mode_tag);
  UrnState green = state;
  ++green.green;
  tree_walk_residuals(seq, d, ticks, tick + 1, green, snapshot, check, mode_tag);
}

}  // namespace

MartingaleTreeCheck martingale_tree_check(const WeightSequence& seq, int d, int blocks,
                                          Arithmetic mode) {
  if (d < 1) throw std::invalid_argument("d must be >= 1");
  check_enumeration_horizon(d, blocks);
  const std::int64_t ticks = static_cast<std::int64_t>(d) * blocks;
  MartingaleTreeCheck check;
  if (mode == Arithmetic::Float) {
    tree_walk_residuals(seq, d, ticks, 0, UrnState{}, UrnState{}, check, double{});
  } else {
    require_rational(seq);
    tree_walk_residuals(seq, d, ticks, 0, UrnState{}, UrnState{}, check, Rational{});
  }
  return check;
}

double monochromatic_run_probability(const WeightSequence& seq, int d, UrnState start,
                                     Colour colour, std::int64_t steps) {
  if (d < 1) throw std::invalid_argument("d must be >= 1");
  if (steps < 0) throw std::invalid_argument("steps must be >= 0");
  if (start.red < 0 || start.green < 0 || start.total() % d != 0) {
    throw std::invalid_argument("start must be a coarse state (total a multiple of d)");
  }
  double log_prob = 0.0;
  UrnState state = start;
  for (std::int64_t k = 0; k < steps; ++k) {
    const UrnState oriented =
        colour == Colour::Red ? state : UrnState{state.green, state.red};
    log_prob += static_cast<double>(d) * log_draw_probability(seq, oriented);
    if (colour == Colour::Red) {
      state.red += d;
    } else {
      state.green += d;
    }
  }
  return std::exp(log_prob);
}

double counterexample_lower_bound(double rho, int d, std::int64_t terms) {
  if (!(rho > 1.0)) throw std::invalid_argument("lower bound requires rho > 1");
  if (d < 2) throw std::invalid_argument("lower bound requires d >= 2");
  if (terms < 0) throw std::invalid_argument("terms must be >= 0");
  const double log_rho = std::log(rho);
  double log_prod = 0.0;
  for (std::int64_t k = 1; k <= terms; ++k) {
    const double x = std::exp(-static_cast<double>(k - 1) * d * log_rho);
    log_prod -= static_cast<double>(d) * std::log1p(x);
  }
  return std::exp(log_prod);
}

LimitProduct counterexample_lower_bound_limit(double rho, int d, double tolerance) {
  if (!(rho > 1.0)) throw std::invalid_argument("lower bound requires rho > 1");
  if (d < 2) throw std::invalid_argument("lower bound requires d >= 2");
  if (!(tolerance > 0.0)) throw std::invalid_argument("tolerance must be > 0");
  const double log_rho = std::log(rho);
  const double ratio = std::exp(-static_cast<double>(d) * log_rho);  // rho^-d < 1
  double log_prod = 0.0;
  std::int64_t k = 1;
  double tail_bound;
  for (;;) {
    const double x = std::exp(-static_cast<double>(k - 1) * d * log_rho);
    log_prod -= static_cast<double>(d) * std::log1p(x);
    ++k;
    // Discarded log mass: sum over j >= k of d*ln(1 + x_j). Each x_j < 1
    // once j >= 2, so ln(1 + x) = -ln(1 - x/(1+x)) <= 2x and the tail has
    // the geometric envelope 2d * x_k / (1 - rho^-d).
    const double x_next = std::exp(-static_cast<double>(k - 1) * d * log_rho);
    tail_bound = 2.0 * static_cast<double>(d) * x_next / (1.0 - ratio);
    if (tail_bound < tolerance) break;
  }
  LimitProduct out;
  // Discount by the certificate: the result never exceeds the true infinite
  // product, so it stays a valid lower bound.
  out.value = std::exp(log_prod - tail_bound);
  out.terms = k - 1;
  out.log_tail_bound = tail_bound;
  return out;
}

double escape_alpha(int d, double s_inf) {
  if (d < 1) throw std::invalid_argument("d must be >= 1");
  if (!(s_inf > 0.0) || !std::isfinite(s_inf)) {
    throw std::invalid_argument("s_inf must be positive and finite");
  }
  const double base = 24.0 + 16.0 * static_cast<double>(d) * s_inf;
  return 1.0 / (base * base);
}

double escape_ratio(double alpha, int d, double s_inf) {
  if (!(alpha > 0.0)) throw std::invalid_argument("alpha must be > 0");
  const double root = std::sqrt(alpha);
  const double numerator =
      0.5 - 4.0 * alpha - 2.0 * root - 4.0 * static_cast<double>(d) * alpha * s_inf;
  const double denominator = 2.0 * alpha + 4.0 * root + 3.5;
  return numerator / denominator;
}

bool escape_bound_holds(int d, double s_inf) {
  return escape_ratio(escape_alpha(d, s_inf), d, s_inf) >= kEscapeRatioFloor;
}

}  // namespace urnkit
