#include <doctest.h>

#include <cmath>
#include <stdexcept>
#include <vector>

#include "urnkit/rng.hpp"
#include "urnkit/weights.hpp"

using urnkit::Philox4x32;
using urnkit::SumStatus;
using urnkit::TailRule;
using urnkit::WeightSequence;

namespace {

constexpr double kPiSquaredOverSix = 1.6449340668482264;

std::vector<WeightSequence> all_kinds() {
  return {
      WeightSequence::constant(1.0),
      WeightSequence::constant(2.5),
      WeightSequence::polynomial(1.0),
      WeightSequence::polynomial(2.0),
      WeightSequence::polynomial(0.5),
      WeightSequence::exponential(2.0),
      WeightSequence::exponential(0.5),
      WeightSequence::counterexample(2.0, 2),
      WeightSequence::counterexample(3.0, 4),
      WeightSequence::table({1.0, 2.0, 3.0}),
      WeightSequence::table({1.0, 2.0, 3.0}, TailRule::ExtendPolynomial, 2.0),
      WeightSequence::table({1.0, 2.0, 3.0}, TailRule::ExtendExponential, 1.5),
  };
}

}  // namespace

TEST_SUITE("weights") {

TEST_CASE("constructor preconditions") {
  CHECK_THROWS_AS(WeightSequence::constant(0.0), std::invalid_argument);
  CHECK_THROWS_AS(WeightSequence::constant(-1.0), std::invalid_argument);
  CHECK_THROWS_AS(WeightSequence::polynomial(0.0), std::invalid_argument);
  CHECK_THROWS_AS(WeightSequence::exponential(-2.0), std::invalid_argument);
  CHECK_THROWS_AS(WeightSequence::counterexample(1.0, 2), std::invalid_argument);
  CHECK_THROWS_AS(WeightSequence::counterexample(2.0, 1), std::invalid_argument);
  CHECK_THROWS_AS(WeightSequence::table({}), std::invalid_argument);
  CHECK_THROWS_AS(WeightSequence::table({1.0, -2.0}), std::invalid_argument);
  CHECK_THROWS_AS(WeightSequence::table({1.0}, TailRule::ExtendPolynomial, 0.0),
                  std::invalid_argument);
}

TEST_CASE("weight values per kind") {
  const auto cex = WeightSequence::counterexample(2.0, 2);
  CHECK(cex.weight_at(0) == 1.0);  // multiples of d stay at 1
  CHECK(cex.weight_at(2) == 1.0);
  CHECK(cex.weight_at(3) == 8.0);  // rho^k elsewhere
  CHECK(cex.weight_at(1) == 2.0);

  CHECK(WeightSequence::constant(1.0).weight_at(7) == 1.0);
  CHECK(WeightSequence::polynomial(1.0).weight_at(4) == 5.0);
  CHECK(WeightSequence::polynomial(2.0).weight_at(0) == 1.0);
  CHECK(WeightSequence::exponential(2.0).weight_at(10) == 1024.0);

  const auto table = WeightSequence::table({1.0, 4.0, 9.0});
  CHECK(table.weight_at(1) == 4.0);
  CHECK(table.weight_at(10) == 9.0);  // repeat-last
}

TEST_CASE("counterexample pattern holds along the sequence") {
  for (int d : {2, 3, 5}) {
    const auto seq = WeightSequence::counterexample(2.0, d);
    for (std::int64_t k = 0; k < 200; ++k) {
      if (k % d == 0) {
        CHECK(seq.weight_at(k) == 1.0);
      } else if (k < 60) {
        CHECK(seq.weight_at(k) == doctest::Approx(std::pow(2.0, static_cast<double>(k))));
      }
    }
  }
}

TEST_CASE("log matches ln(weight) whenever the weight is representable") {
  for (const auto& seq : all_kinds()) {
    for (std::int64_t k = 0; k <= 10000; ++k) {
      double w;
      try {
        w = seq.weight_at(k);
      } catch (const std::range_error&) {
        continue;
      }
      CHECK(w > 0.0);
      const double lw = seq.log_weight_at(k);
      const double expected = std::log(w);
      CHECK(std::abs(lw - expected) <= 1e-10 * std::max(1.0, std::abs(expected)));
    }
  }
}

TEST_CASE("exponential log weights never overflow") {
  const auto seq = WeightSequence::exponential(2.0);
  CHECK(seq.log_weight_at(10) == doctest::Approx(10.0 * std::log(2.0)).epsilon(1e-12));
  CHECK_THROWS_AS(seq.weight_at(2000), std::range_error);
  CHECK(seq.log_weight_at(2000) == doctest::Approx(2000.0 * std::log(2.0)));
  CHECK(std::isfinite(seq.log_weight_at(100000000)));
  CHECK(WeightSequence::constant(1.0).log_weight_at(12345) == 0.0);
  CHECK(WeightSequence::polynomial(2.0).log_weight_at(0) == 0.0);
}

TEST_CASE("tail inverse sum: analytic statuses") {
  CHECK(WeightSequence::constant(1.0).tail_inverse_sum(0).status == SumStatus::Diverged);
  CHECK(WeightSequence::polynomial(1.0).tail_inverse_sum(0).status == SumStatus::Diverged);
  CHECK(WeightSequence::polynomial(2.0).tail_inverse_sum(0).status == SumStatus::Converged);
  CHECK(WeightSequence::exponential(0.5).tail_inverse_sum(0).status == SumStatus::Diverged);
  CHECK(WeightSequence::exponential(2.0).tail_inverse_sum(0).status == SumStatus::Converged);
  CHECK(WeightSequence::counterexample(2.0, 2).tail_inverse_sum(0).status ==
        SumStatus::Diverged);
  CHECK(WeightSequence::table({1.0, 2.0}).tail_inverse_sum(0).status == SumStatus::Diverged);
  CHECK(WeightSequence::table({1.0, 2.0}, TailRule::ExtendPolynomial, 3.0)
            .tail_inverse_sum(0)
            .status == SumStatus::Converged);
  CHECK(WeightSequence::table({1.0, 2.0}, TailRule::ExtendExponential, 2.0)
            .tail_inverse_sum(0)
            .status == SumStatus::Converged);
  CHECK(WeightSequence::table({1.0, 2.0}, TailRule::ExtendExponential, 0.5)
            .tail_inverse_sum(0)
            .status == SumStatus::Diverged);
}

TEST_CASE("tail inverse sum: geometric value") {
  // sum over k >= 0 of 2^-k = 2
  const auto v = WeightSequence::exponential(2.0).tail_inverse_sum(0, 1e-12);
  REQUIRE(v.converged());
  CHECK(v.value == doctest::Approx(2.0).epsilon(1e-12));
}

TEST_CASE("tail inverse sum: basel value") {
  // sum over k >= 0 of (k+1)^-2 = pi^2/6
  const auto v = WeightSequence::polynomial(2.0).tail_inverse_sum(0, 1e-12);
  REQUIRE(v.converged());
  CHECK(v.error_bound <= 1e-12);
  CHECK(v.value == doctest::Approx(kPiSquaredOverSix).epsilon(1e-11));
}

TEST_CASE("tail inverse square sum: values") {
  // sum over k >= 0 of 4^-k = 4/3
  const auto geo = WeightSequence::exponential(2.0).tail_inverse_square_sum(0, 1e-12);
  REQUIRE(geo.converged());
  CHECK(geo.value == doctest::Approx(4.0 / 3.0).epsilon(1e-12));

  // sum over k >= 1 of (k+1)^-2 = pi^2/6 - 1
  const auto basel = WeightSequence::polynomial(1.0).tail_inverse_square_sum(1, 1e-12);
  REQUIRE(basel.converged());
  CHECK(basel.value == doctest::Approx(kPiSquaredOverSix - 1.0).epsilon(1e-11));

  CHECK(WeightSequence::constant(1.0).tail_inverse_square_sum(0).status == SumStatus::Diverged);
  CHECK(WeightSequence::counterexample(2.0, 3).tail_inverse_square_sum(0).status ==
        SumStatus::Diverged);
  // square tail of polynomial(1) converges even though the plain tail does not
  CHECK(WeightSequence::polynomial(1.0).tail_inverse_square_sum(0).converged());
}

TEST_CASE("tail sums are monotone in the start index") {
  const std::vector<WeightSequence> converging = {
      WeightSequence::polynomial(2.0),
      WeightSequence::exponential(2.0),
      WeightSequence::table({2.0, 1.0, 5.0}, TailRule::ExtendExponential, 3.0),
  };
  for (const auto& seq : converging) {
    double prev = seq.tail_inverse_sum(0).value;
    for (std::int64_t from : {1, 2, 5, 10, 50}) {
      const auto v = seq.tail_inverse_sum(from);
      REQUIRE(v.converged());
      CHECK(v.value <= prev + 1e-12);
      prev = v.value;
    }
  }
}

TEST_CASE("tail sum equals in-table part plus extension") {
  // table {1,2,4} extended exponentially with rho=2 continues 8,16,...
  const auto seq = WeightSequence::table({1.0, 2.0, 4.0}, TailRule::ExtendExponential, 2.0);
  const auto v = seq.tail_inverse_sum(0, 1e-14);
  REQUIRE(v.converged());
  // 1 + 1/2 + 1/4 + 1/8 + ... = 2
  CHECK(v.value == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(seq.weight_at(3) == doctest::Approx(8.0));
  CHECK(seq.weight_at(5) == doctest::Approx(32.0));
}

TEST_CASE("srh verdicts match kind analysis") {
  CHECK(WeightSequence::polynomial(2.0).srh().converged());
  CHECK(WeightSequence::polynomial(1.0).srh().status == SumStatus::Diverged);
  CHECK(WeightSequence::counterexample(2.0, 2).srh().status == SumStatus::Diverged);
  CHECK(WeightSequence::exponential(2.0).srh().converged());
}

TEST_CASE("monotonicity verdicts") {
  CHECK(WeightSequence::constant(3.0).is_non_decreasing());
  CHECK(WeightSequence::polynomial(2.0).is_non_decreasing());
  CHECK(WeightSequence::polynomial(0.5).is_non_decreasing());  // every rho > 0 grows
  CHECK(WeightSequence::exponential(1.0).is_non_decreasing());
  CHECK_FALSE(WeightSequence::exponential(0.5).is_non_decreasing());
  CHECK_FALSE(WeightSequence::counterexample(2.0, 2).is_non_decreasing());
  CHECK(WeightSequence::table({1.0, 1.0, 2.0}).is_non_decreasing());
  CHECK_FALSE(WeightSequence::table({1.0, 2.0, 1.5}).is_non_decreasing());
  CHECK_FALSE(
      WeightSequence::table({1.0, 2.0}, TailRule::ExtendExponential, 0.9).is_non_decreasing());
  CHECK(WeightSequence::table({1.0, 2.0}, TailRule::ExtendPolynomial, 0.5).is_non_decreasing());
}

TEST_CASE("rational access") {
  CHECK(WeightSequence::polynomial(1.0).rational_representable());
  CHECK(WeightSequence::polynomial(2.0).rational_representable());
  CHECK_FALSE(WeightSequence::polynomial(2.5).rational_representable());
  CHECK(WeightSequence::exponential(2.5).rational_representable());
  CHECK(WeightSequence::counterexample(2.0, 2).rational_representable());
  CHECK(WeightSequence::table({0.5, 0.25}).rational_representable());

  CHECK(WeightSequence::polynomial(2.0).weight_rational_at(3) == urnkit::Rational(16));
  CHECK(WeightSequence::counterexample(2.0, 2).weight_rational_at(4) == urnkit::Rational(1));
  CHECK(WeightSequence::counterexample(2.0, 2).weight_rational_at(5) == urnkit::Rational(32));
  CHECK(WeightSequence::exponential(2.5).weight_rational_at(2) == urnkit::Rational(25, 4));
  CHECK_THROWS_AS(WeightSequence::polynomial(2.5).weight_rational_at(1), std::domain_error);
}

TEST_CASE("weights stay positive and finite over a long horizon") {
  for (const auto& seq : all_kinds()) {
    for (std::int64_t k : {0, 1, 2, 3, 10, 100, 5000, 10000}) {
      const double lw = seq.log_weight_at(k);
      CHECK(std::isfinite(lw));
      const double inv = seq.inverse_weight_at(k);
      CHECK(inv >= 0.0);
      CHECK_FALSE(std::isnan(inv));
      // 1/w_k itself overflows only for rapidly decaying weights
      if (lw > -700.0) CHECK(std::isfinite(inv));
    }
  }
}

TEST_CASE("describe names kind and parameters") {
  CHECK(WeightSequence::polynomial(2.0).describe() == "polynomial(rho=2)");
  CHECK(WeightSequence::counterexample(2.0, 2).describe() == "counterexample(rho=2,d=2)");
  CHECK(WeightSequence::table({1.0, 2.0}).describe() == "table(n=2,tail=repeat-last)");
}

}  // TEST_SUITE
