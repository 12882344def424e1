#pragma once

#include <boost/multiprecision/cpp_bin_float.hpp>
#include <boost/multiprecision/cpp_int.hpp>

#include <optional>
#include <string>

namespace biholder {

using Rational = boost::multiprecision::cpp_rational;
using BigInt = boost::multiprecision::cpp_int;
using HighFloat = boost::multiprecision::cpp_bin_float_50;

// Doubles are binary rationals, so this conversion is exact.
inline Rational rational_of_double(double v) { return Rational(v); }

// Parses "p/q", an integer, or a decimal such as "0.25" exactly.
std::optional<Rational> parse_rational(const std::string& text);

std::string rational_to_string(const Rational& r);

}  // namespace biholder
