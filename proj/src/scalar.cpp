#include "jurymech/scalar.hpp"

#include <cfloat>
#include <cmath>
#include <stdexcept>

namespace jurymech {

Rational rationalize(double value) {
  if (!std::isfinite(value)) throw std::invalid_argument("cannot rationalize a non-finite value");
  const Rational exact(value);
  if (value == 0.0) return exact;
  const Rational tolerance = Rational(4.0 * DBL_EPSILON) * abs_value(exact);
  BigInt h_prev = 0, h = 1, k_prev = 1, k = 0;
  Rational rest = exact;
  for (;;) {
    BigInt num = boost::multiprecision::numerator(rest);
    BigInt den = boost::multiprecision::denominator(rest);
    BigInt whole = num / den;
    if (num < 0 && whole * den != num) whole -= 1;  // floor
    const BigInt h_next = whole * h + h_prev;
    const BigInt k_next = whole * k + k_prev;
    h_prev = h;
    h = h_next;
    k_prev = k;
    k = k_next;
    const Rational convergent(h, k);
    if (abs_value(Rational(convergent - exact)) <= tolerance) return convergent;
    const Rational frac = rest - Rational(whole);
    if (frac == 0) return convergent;
    rest = Rational(1) / frac;
  }
}

std::string to_string(const Rational& value) { return value.str(); }

}  // namespace jurymech
