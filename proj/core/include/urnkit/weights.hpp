#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "urnkit/rational.hpp"

namespace urnkit {

enum class WeightKind { Constant, Polynomial, Exponential, Counterexample, Table };

/// How a table sequence continues past its last stored value.
enum class TailRule { RepeatLast, ExtendPolynomial, ExtendExponential };

enum class SumStatus { Converged, Diverged, Inconclusive };

/// Outcome of a truncated tail-sum evaluation. `value` carries the midpoint
/// of the certified bracket and `error_bound` its half-width, so
/// value +/- error_bound always contains the exact sum.
struct TailSumVerdict {
  SumStatus status = SumStatus::Inconclusive;
  double value = 0.0;
  double error_bound = 0.0;
  std::int64_t terms_used = 1;

  bool converged() const { return status == SumStatus::Converged; }
};

/// Reinforcement weight sequence w_0, w_1, ... The chance of drawing a colour
/// currently backed by k balls is proportional to w_k. Indexing is 0-based
/// everywhere: the first ball of a colour is drawn at weight w_0.
///
/// Kinds:
///   constant(c)            w_k = c
///   polynomial(rho)        w_k = (k+1)^rho
///   exponential(rho)       w_k = rho^k
///   counterexample(rho,d)  w_k = 1 when k is a multiple of d, rho^k otherwise
///   table(values,rule)     stored values, continued per the tail rule
///
/// Instances are immutable after construction and safe to share across
/// concurrently running simulations.
class WeightSequence {
 public:
  static WeightSequence constant(double c);
  static WeightSequence polynomial(double rho);
  static WeightSequence exponential(double rho);
  static WeightSequence counterexample(double rho, int d);
  static WeightSequence table(std::vector<double> values,
                              TailRule rule = TailRule::RepeatLast,
                              double tail_rho = 0.0,
                              std::string source = {});

  WeightKind kind() const { return kind_; }

  /// w_k. Throws std::range_error when the value is not representable as a
  /// double (large k for exponential kinds); use log_weight_at there.
  double weight_at(std::int64_t k) const;

  /// ln(w_k), computed formulaically so it never overflows.
  double log_weight_at(std::int64_t k) const;

  /// 1/w_k = exp(-ln w_k). Underflows to 0 for very large weights; for
  /// rapidly decaying weights (log w below about -709) it overflows to +inf.
  double inverse_weight_at(std::int64_t k) const;

  /// Sum of 1/w_i for i >= from, truncated once the certified bracket is
  /// narrower than `tolerance`. Convergence is decided analytically per kind,
  /// never by numeric sniffing.
  TailSumVerdict tail_inverse_sum(std::int64_t from, double tolerance = 1e-12,
                                  std::int64_t max_terms = 20000000) const;

  /// Same contract for the square tail: sum of 1/w_i^2 for i >= from.
  TailSumVerdict tail_inverse_square_sum(std::int64_t from, double tolerance = 1e-12,
                                         std::int64_t max_terms = 20000000) const;

  /// Strong-reinforcement verdict: tail_inverse_sum from 0.
  TailSumVerdict srh(double tolerance = 1e-12) const;

  /// Exact for analytic kinds; table kinds are scanned through `horizon`
  /// and the tail rule. Note polynomial weights are non-decreasing for every
  /// positive exponent, not just rho >= 1.
  bool is_non_decreasing(std::int64_t horizon = 1 << 20) const;

  /// True when every w_k is an exact rational (all kinds except polynomial
  /// with a non-integer exponent, and tables continued polynomially with a
  /// non-integer exponent).
  bool rational_representable() const;

  /// Exact w_k; throws std::domain_error when !rational_representable().
  Rational weight_rational_at(std::int64_t k) const;

  // Parameters (meaningful per kind; see factories).
  double level() const { return c_; }
  double growth() const { return rho_; }
  int block() const { return d_; }
  TailRule tail_rule() const { return rule_; }
  double tail_growth() const { return tail_rho_; }
  const std::vector<double>& values() const;
  const std::string& source() const { return source_; }

  /// Human-readable one-liner, e.g. "polynomial(rho=2)".
  std::string describe() const;

 private:
  WeightSequence() = default;

  WeightKind kind_ = WeightKind::Constant;
  double c_ = 1.0;
  double rho_ = 1.0;
  double log_rho_ = 0.0;
  int d_ = 0;
  std::shared_ptr<const std::vector<double>> values_;
  TailRule rule_ = TailRule::RepeatLast;
  double tail_rho_ = 0.0;
  std::string source_;
};

}  // namespace urnkit
