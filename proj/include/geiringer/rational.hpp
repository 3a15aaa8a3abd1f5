#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <string>
#include <string_view>

namespace geiringer {

/// Arbitrary-precision exact rational. All frequencies and oracle values use it.
using Rational = boost::multiprecision::cpp_rational;
using BigInt = boost::multiprecision::cpp_int;

/// Always "p/q" with q > 0, including integers ("1/1", "0/1").
std::string to_string(const Rational& value);

/// Accepts "p/q", "p" and an optional leading sign. Throws std::invalid_argument.
Rational parse_rational(std::string_view text);

/// Fixed-point rendering with exactly `digits` decimals, rounded half away from zero.
std::string decimal_string(const Rational& value, int digits);

inline double to_double(const Rational& value) { return value.convert_to<double>(); }

}  // namespace geiringer
