#include "urnkit/rational.hpp"

#include <cmath>
#include <stdexcept>

namespace urnkit {

Rational rational_from_double(double x) {
  if (!std::isfinite(x)) {
    throw std::invalid_argument("rational_from_double: value is not finite");
  }
  Rational q;
  mpq_set_d(q.get_mpq_t(), x);
  q.canonicalize();
  return q;
}

Rational rational_pow(const Rational& base, std::uint64_t exponent) {
  Rational out;
  mpz_pow_ui(out.get_num_mpz_t(), base.get_num().get_mpz_t(), exponent);
  mpz_pow_ui(out.get_den_mpz_t(), base.get_den().get_mpz_t(), exponent);
  out.canonicalize();
  return out;
}

Rational rational_binomial(unsigned n, unsigned k) {
  mpz_class c;
  mpz_bin_uiui(c.get_mpz_t(), n, k);
  return Rational(c);
}

std::string fraction_string(const Rational& q) {
  return q.get_str();
}

double to_double(const Rational& q) {
  return q.get_d();
}

}  // namespace urnkit
