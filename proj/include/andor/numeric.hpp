#pragma once

#include <boost/multiprecision/gmp.hpp>

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>

namespace andor {

/// Exact arbitrary-precision rational (GMP backed).
using Rational = boost::multiprecision::mpq_rational;

enum class Backend { exact, floating };

/// Compile-time backend tag of a scalar type.
template <class T>
struct backend_of;
template <>
struct backend_of<Rational> {
  static constexpr Backend value = Backend::exact;
};
template <>
struct backend_of<double> {
  static constexpr Backend value = Backend::floating;
};

template <class T>
concept Scalar = std::same_as<T, Rational> || std::same_as<T, double>;

class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Parses "num/den" or an integer into an exact rational.
Rational parse_rational(std::string_view text);

/// Parses a decimal literal into a double.
double parse_decimal(std::string_view text);

/// "num/den" for rationals (integers print without denominator), %.17g for doubles.
std::string format_value(const Rational& v);
std::string format_value(double v);

double to_double(const Rational& v);
inline double to_double(double v) { return v; }

/// Best rational approximation of x with denominator <= max_den
/// (continued-fraction convergents plus the best semiconvergent).
Rational rationalize(double x, std::int64_t max_den);

template <Scalar T>
T from_double(double x);
template <>
inline double from_double<double>(double x) { return x; }
template <>
inline Rational from_double<Rational>(double x) { return Rational(x); }

}  // namespace andor
