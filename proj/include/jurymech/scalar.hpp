#pragma once

#include <cstdint>
#include <string>

#include <boost/multiprecision/cpp_int.hpp>
#include <boost/multiprecision/eigen.hpp>
#include <Eigen/Core>

namespace jurymech {

// Exact arithmetic scalar. Expression templates are disabled so the type
// composes cleanly with Eigen's own expression machinery.
using Rational = boost::multiprecision::number<boost::multiprecision::cpp_rational_backend,
                                               boost::multiprecision::et_off>;
using BigInt = boost::multiprecision::cpp_int;

template <typename Scalar>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

template <typename Scalar>
using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

template <typename Scalar>
inline constexpr bool is_exact_v = false;
template <>
inline constexpr bool is_exact_v<Rational> = true;

/// Numerical tolerances per scalar type. Exact arithmetic uses zero throughout.
template <typename Scalar>
struct Tolerance;

template <>
struct Tolerance<double> {
  static double feasibility() { return 1e-9; }
  static double optimality() { return 1e-10; }
  static double pivot() { return 1e-12; }
  static double tie() { return 1e-10; }
};

template <>
struct Tolerance<Rational> {
  static Rational feasibility() { return Rational(0); }
  static Rational optimality() { return Rational(0); }
  static Rational pivot() { return Rational(0); }
  static Rational tie() { return Rational(0); }
};

inline double to_double(double value) { return value; }
inline double to_double(const Rational& value) { return value.convert_to<double>(); }

template <typename Scalar>
Vector<double> to_double_vector(const Vector<Scalar>& v) {
  Vector<double> out(v.size());
  for (Eigen::Index i = 0; i < v.size(); ++i) out[i] = to_double(v[i]);
  return out;
}

template <typename Scalar>
Scalar abs_value(const Scalar& value) {
  return value < Scalar(0) ? Scalar(-value) : value;
}

/// base^exponent for a non-negative integer exponent by repeated squaring.
template <typename Scalar>
Scalar ipow(Scalar base, int exponent) {
  Scalar result(1);
  while (exponent > 0) {
    if (exponent & 1) result *= base;
    base *= base;
    exponent >>= 1;
  }
  return result;
}

/// Simplest rational (first continued-fraction convergent) within 4 ulp of `value`.
Rational rationalize(double value);

/// "p/q" or "p" for integers.
std::string to_string(const Rational& value);

}  // namespace jurymech
