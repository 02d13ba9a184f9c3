#include "urnkit/weights.hpp"

#include <cmath>
#include <cstdio>
#include <stdexcept>

namespace urnkit {

namespace {

constexpr double kMaxLogWeight = 709.0;   // ln(DBL_MAX) ~ 709.78
constexpr double kMinLogWeight = -745.0;  // below this 1/w_k is not representable

bool is_integral(double x) { return x == std::floor(x) && std::abs(x) < 9.0e15; }

// Compensated accumulator; keeps long tail sums accurate to ~2 ulp of the
// magnitude of the summed terms regardless of term count.
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

// Tail of scale*(x+1)^(-q) summed over integers >= a, bracketed by the
// midpoint rule from above and the trapezoid rule from below (the integrand
// is convex and decreasing). Bracket width shrinks like q*a^(-q-1).
struct PowerTail {
  double lower = 0.0;
  double upper = 0.0;
};

PowerTail power_tail(double scale, double q, double a) {
  const auto integral_from = [&](double t) {
    // integral of scale*(x+1)^(-q) dx from t to infinity, q > 1
    return scale * std::pow(t + 1.0, 1.0 - q) / (q - 1.0);
  };
  const double fa = scale * std::pow(a + 1.0, -q);
  PowerTail tail;
  tail.lower = integral_from(a) + 0.5 * fa;
  tail.upper = integral_from(a - 0.5);
  return tail;
}

// Sum of scale*(i+1)^(-q) for i >= from with q > 1, truncated once the
// certified bracket half-width drops under tolerance.
TailSumVerdict converge_power_sum(double scale, double q, std::int64_t from, double tolerance,
                                  std::int64_t max_terms) {
  KahanSum partial;
  std::int64_t terms = 0;
  std::int64_t i = from;
  PowerTail tail = power_tail(scale, q, static_cast<double>(from));
  while (terms < max_terms) {
    if (0.5 * (tail.upper - tail.lower) <= tolerance) break;
    partial.add(scale * std::pow(static_cast<double>(i) + 1.0, -q));
    ++terms;
    ++i;
    tail = power_tail(scale, q, static_cast<double>(i));
  }
  TailSumVerdict v;
  v.status = SumStatus::Converged;
  v.value = partial.sum + 0.5 * (tail.lower + tail.upper);
  v.error_bound = 0.5 * (tail.upper - tail.lower);
  v.terms_used = terms > 0 ? terms : 1;
  return v;
}

// Geometric sum: scale * r^from / (1 - r) for 0 < r < 1, exact closed form.
TailSumVerdict converge_geometric_sum(double scale, double log_ratio, std::int64_t from) {
  TailSumVerdict v;
  v.status = SumStatus::Converged;
  const double r = std::exp(log_ratio);
  v.value = scale * std::exp(static_cast<double>(from) * log_ratio) / (1.0 - r);
  v.error_bound = 0.0;
  v.terms_used = 1;
  return v;
}

TailSumVerdict diverged_verdict() {
  TailSumVerdict v;
  v.status = SumStatus::Diverged;
  return v;
}

std::string format_param(double x) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%g", x);
  return buf;
}

const char* tail_rule_name(TailRule rule) {
  switch (rule) {
    case TailRule::RepeatLast: return "repeat-last";
    case TailRule::ExtendPolynomial: return "extend-polynomial";
    case TailRule::ExtendExponential: return "extend-exponential";
  }
  return "?";
}

}  // namespace

WeightSequence WeightSequence::constant(double c) {
  if (!(c > 0.0) || !std::isfinite(c)) {
    throw std::invalid_argument("constant weights require c > 0");
  }
  WeightSequence w;
  w.kind_ = WeightKind::Constant;
  w.c_ = c;
  return w;
}

WeightSequence WeightSequence::polynomial(double rho) {
  if (!(rho > 0.0) || !std::isfinite(rho)) {
    throw std::invalid_argument("polynomial weights require rho > 0");
  }
  WeightSequence w;
  w.kind_ = WeightKind::Polynomial;
  w.rho_ = rho;
  return w;
}

WeightSequence WeightSequence::exponential(double rho) {
  if (!(rho > 0.0) || !std::isfinite(rho)) {
    throw std::invalid_argument("exponential weights require rho > 0");
  }
  WeightSequence w;
  w.kind_ = WeightKind::Exponential;
  w.rho_ = rho;
  w.log_rho_ = std::log(rho);
  return w;
}

WeightSequence WeightSequence::counterexample(double rho, int d) {
  if (!(rho > 1.0) || !std::isfinite(rho)) {
    throw std::invalid_argument("counterexample weights require rho > 1");
  }
  if (d < 2) {
    throw std::invalid_argument("counterexample weights require d >= 2");
  }
  WeightSequence w;
  w.kind_ = WeightKind::Counterexample;
  w.rho_ = rho;
  w.log_rho_ = std::log(rho);
  w.d_ = d;
  return w;
}

WeightSequence WeightSequence::table(std::vector<double> values, TailRule rule, double tail_rho,
                                     std::string source) {
  if (values.empty()) {
    throw std::invalid_argument("table weights require at least one value");
  }
  for (double v : values) {
    if (!(v > 0.0) || !std::isfinite(v)) {
      throw std::invalid_argument("table weights must be positive and finite");
    }
  }
  if (rule != TailRule::RepeatLast && (!(tail_rho > 0.0) || !std::isfinite(tail_rho))) {
    throw std::invalid_argument("extend tail rules require rho > 0");
  }
  WeightSequence w;
  w.kind_ = WeightKind::Table;
  w.values_ = std::make_shared<const std::vector<double>>(std::move(values));
  w.rule_ = rule;
  w.tail_rho_ = tail_rho;
  w.source_ = std::move(source);
  return w;
}

const std::vector<double>& WeightSequence::values() const {
  static const std::vector<double> empty;
  return values_ ? *values_ : empty;
}

double WeightSequence::log_weight_at(std::int64_t k) const {
  if (k < 0) throw std::invalid_argument("weight index must be >= 0");
  switch (kind_) {
    case WeightKind::Constant:
      return std::log(c_);
    case WeightKind::Polynomial:
      return rho_ * std::log(static_cast<double>(k) + 1.0);
    case WeightKind::Exponential:
      return static_cast<double>(k) * log_rho_;
    case WeightKind::Counterexample:
      return (k % d_ == 0) ? 0.0 : static_cast<double>(k) * log_rho_;
    case WeightKind::Table: {
      const auto& vals = *values_;
      const auto len = static_cast<std::int64_t>(vals.size());
      if (k < len) return std::log(vals[static_cast<std::size_t>(k)]);
      const double log_back = std::log(vals.back());
      switch (rule_) {
        case TailRule::RepeatLast:
          return log_back;
        case TailRule::ExtendPolynomial:
          // continues back * ((k+1)/len)^rho, continuous at the junction
          return log_back + tail_rho_ * (std::log(static_cast<double>(k) + 1.0) -
                                         std::log(static_cast<double>(len)));
        case TailRule::ExtendExponential:
          return log_back + static_cast<double>(k - len + 1) * std::log(tail_rho_);
      }
      return log_back;
    }
  }
  throw std::logic_error("unreachable weight kind");
}

double WeightSequence::weight_at(std::int64_t k) const {
  const double lw = log_weight_at(k);
  if (lw > kMaxLogWeight || lw < kMinLogWeight) {
    throw std::range_error("weight_at: w_" + std::to_string(k) +
                           " is not representable as a double; use log_weight_at");
  }
  switch (kind_) {
    case WeightKind::Constant:
      return c_;
    case WeightKind::Polynomial:
      return std::pow(static_cast<double>(k) + 1.0, rho_);
    case WeightKind::Exponential:
      return std::pow(rho_, static_cast<double>(k));
    case WeightKind::Counterexample:
      return (k % d_ == 0) ? 1.0 : std::pow(rho_, static_cast<double>(k));
    case WeightKind::Table: {
      const auto& vals = *values_;
      if (k < static_cast<std::int64_t>(vals.size())) return vals[static_cast<std::size_t>(k)];
      if (rule_ == TailRule::RepeatLast) return vals.back();
      return std::exp(lw);
    }
  }
  throw std::logic_error("unreachable weight kind");
}

double WeightSequence::inverse_weight_at(std::int64_t k) const {
  return std::exp(-log_weight_at(k));
}

namespace {

// Shared tail machinery for sums of 1/w_i^power, power in {1,2}.
TailSumVerdict tail_sum(const WeightSequence& seq, int power, std::int64_t from, double tolerance,
                        std::int64_t max_terms) {
  if (from < 0) throw std::invalid_argument("tail sum requires from >= 0");
  if (!(tolerance > 0.0)) throw std::invalid_argument("tail sum requires tolerance > 0");
  const double p = static_cast<double>(power);
  switch (seq.kind()) {
    case WeightKind::Constant:
      return diverged_verdict();
    case WeightKind::Polynomial: {
      const double q = p * seq.growth();
      if (q <= 1.0) return diverged_verdict();
      return converge_power_sum(1.0, q, from, tolerance, max_terms);
    }
    case WeightKind::Exponential: {
      if (seq.growth() <= 1.0) return diverged_verdict();
      return converge_geometric_sum(1.0, -p * std::log(seq.growth()), from);
    }
    case WeightKind::Counterexample:
      // w_i = 1 on every multiple of d, so 1/w_i^p has infinitely many 1s.
      return diverged_verdict();
    case WeightKind::Table: {
      const auto& vals = seq.values();
      const auto len = static_cast<std::int64_t>(vals.size());
      const double back = vals.back();
      // Tail beyond the stored values, per rule.
      const std::int64_t ext_from = std::max(from, len);
      TailSumVerdict ext;
      switch (seq.tail_rule()) {
        case TailRule::RepeatLast:
          return diverged_verdict();
        case TailRule::ExtendPolynomial: {
          const double q = p * seq.tail_growth();
          if (q <= 1.0) return diverged_verdict();
          const double scale = std::pow(back, -p) * std::pow(static_cast<double>(len), q);
          ext = converge_power_sum(scale, q, ext_from, tolerance, max_terms);
          break;
        }
        case TailRule::ExtendExponential: {
          if (seq.tail_growth() <= 1.0) return diverged_verdict();
          const double log_tr = std::log(seq.tail_growth());
          const double scale = std::pow(back, -p) * std::exp(p * static_cast<double>(len - 1) * log_tr);
          ext = converge_geometric_sum(scale, -p * log_tr, ext_from);
          break;
        }
      }
      KahanSum in_table;
      std::int64_t terms = 0;
      for (std::int64_t i = from; i < len; ++i) {
        in_table.add(std::pow(vals[static_cast<std::size_t>(i)], -p));
        ++terms;
      }
      ext.value += in_table.sum;
      ext.terms_used += terms;
      return ext;
    }
  }
  throw std::logic_error("unreachable weight kind");
}

}  // namespace

TailSumVerdict WeightSequence::tail_inverse_sum(std::int64_t from, double tolerance,
                                                std::int64_t max_terms) const {
  return tail_sum(*this, 1, from, tolerance, max_terms);
}

TailSumVerdict WeightSequence::tail_inverse_square_sum(std::int64_t from, double tolerance,
                                                       std::int64_t max_terms) const {
  return tail_sum(*this, 2, from, tolerance, max_terms);
}

TailSumVerdict WeightSequence::srh(double tolerance) const {
  return tail_inverse_sum(0, tolerance);
}

bool WeightSequence::is_non_decreasing(std::int64_t horizon) const {
  if (horizon < 1) throw std::invalid_argument("is_non_decreasing requires horizon >= 1");
  switch (kind_) {
    case WeightKind::Constant:
      return true;
    case WeightKind::Polynomial:
      return true;  // (k+1)^rho is non-decreasing for every rho > 0
    case WeightKind::Exponential:
      return rho_ >= 1.0;
    case WeightKind::Counterexample:
      return false;  // drops back to 1 at every multiple of d
    case WeightKind::Table: {
      const auto& vals = *values_;
      const auto len = static_cast<std::int64_t>(vals.size());
      const std::int64_t last = std::min(horizon, len - 1);
      for (std::int64_t k = 1; k <= last; ++k) {
        if (vals[static_cast<std::size_t>(k)] < vals[static_cast<std::size_t>(k - 1)]) return false;
      }
      if (horizon < len) return true;
      switch (rule_) {
        case TailRule::RepeatLast:
          return true;
        case TailRule::ExtendPolynomial:
          return true;  // grows continuously from the last value
        case TailRule::ExtendExponential:
          return tail_rho_ >= 1.0;
      }
      return true;
    }
  }
  throw std::logic_error("unreachable weight kind");
}

bool WeightSequence::rational_representable() const {
  switch (kind_) {
    case WeightKind::Constant:
    case WeightKind::Exponential:
    case WeightKind::Counterexample:
      return true;  // doubles are dyadic rationals, and so are their powers
    case WeightKind::Polynomial:
      return is_integral(rho_);
    case WeightKind::Table:
      return rule_ != TailRule::ExtendPolynomial || is_integral(tail_rho_);
  }
  return false;
}

Rational WeightSequence::weight_rational_at(std::int64_t k) const {
  if (k < 0) throw std::invalid_argument("weight index must be >= 0");
  if (!rational_representable()) {
    throw std::domain_error("weights " + describe() + " are not exactly rational");
  }
  switch (kind_) {
    case WeightKind::Constant:
      return rational_from_double(c_);
    case WeightKind::Polynomial: {
      mpz_class base(static_cast<long>(k + 1));
      mpz_class out;
      mpz_pow_ui(out.get_mpz_t(), base.get_mpz_t(), static_cast<unsigned long>(rho_));
      return Rational(out);
    }
    case WeightKind::Exponential:
      return rational_pow(rational_from_double(rho_), static_cast<std::uint64_t>(k));
    case WeightKind::Counterexample:
      if (k % d_ == 0) return Rational(1);
      return rational_pow(rational_from_double(rho_), static_cast<std::uint64_t>(k));
    case WeightKind::Table: {
      const auto& vals = *values_;
      const auto len = static_cast<std::int64_t>(vals.size());
      if (k < len) return rational_from_double(vals[static_cast<std::size_t>(k)]);
      const Rational back = rational_from_double(vals.back());
      switch (rule_) {
        case TailRule::RepeatLast:
          return back;
        case TailRule::ExtendPolynomial: {
          const auto e = static_cast<unsigned long>(tail_rho_);
          mpz_class num(static_cast<long>(k + 1)), den(static_cast<long>(len));
          mpz_class num_p, den_p;
          mpz_pow_ui(num_p.get_mpz_t(), num.get_mpz_t(), e);
          mpz_pow_ui(den_p.get_mpz_t(), den.get_mpz_t(), e);
          Rational factor(num_p, den_p);
          factor.canonicalize();
          return back * factor;
        }
        case TailRule::ExtendExponential:
          return back * rational_pow(rational_from_double(tail_rho_),
                                     static_cast<std::uint64_t>(k - len + 1));
      }
      return back;
    }
  }
  throw std::logic_error("unreachable weight kind");
}

std::string WeightSequence::describe() const {
  switch (kind_) {
    case WeightKind::Constant:
      return "constant(c=" + format_param(c_) + ")";
    case WeightKind::Polynomial:
      return "polynomial(rho=" + format_param(rho_) + ")";
    case WeightKind::Exponential:
      return "exponential(rho=" + format_param(rho_) + ")";
    case WeightKind::Counterexample:
      return "counterexample(rho=" + format_param(rho_) + ",d=" + std::to_string(d_) + ")";
    case WeightKind::Table: {
      std::string s = "table(n=" + std::to_string(values().size()) +
                      ",tail=" + tail_rule_name(rule_);
      if (rule_ != TailRule::RepeatLast) s += ",rho=" + format_param(tail_rho_);
      return s + ")";
    }
  }
  return "?";
}

}  // namespace urnkit
