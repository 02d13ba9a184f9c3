#pragma once

#include <cstdint>
#include <string>

#include <gmpxx.h>

namespace urnkit {

/// Exact rational number used by the exact engine. Backed by GMP.
using Rational = mpq_class;

/// Exact conversion: every finite double is a dyadic rational.
Rational rational_from_double(double x);

Rational rational_pow(const Rational& base, std::uint64_t exponent);

/// Binomial coefficient C(n, k) as an exact integer-valued rational.
Rational rational_binomial(unsigned n, unsigned k);

/// "num/den" in lowest terms ("0" and integers print without "/1").
std::string fraction_string(const Rational& q);

double to_double(const Rational& q);

}  // namespace urnkit
