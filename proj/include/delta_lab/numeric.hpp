#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <cmath>
#include <concepts>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <type_traits>

namespace delta_lab {

using Rational = boost::multiprecision::cpp_rational;

/// Scalars the polyhedral models are instantiated with: binary floating
/// point for exploration, exact rationals where results must be bit-exact.
template <class T>
concept Scalar = std::same_as<T, double> || std::same_as<T, Rational>;

template <Scalar T>
inline constexpr bool is_exact_v = std::is_same_v<T, Rational>;

/// Tolerance for "unit norm" preconditions on floating point data.
inline constexpr double unit_tol = 1e-9;

inline double to_double(double x) { return x; }
inline double to_double(const Rational& x) { return x.convert_to<double>(); }

template <Scalar T>
T from_double(double x) {
  return T(x);
}

template <Scalar T>
T abs_of(const T& x) {
  return x < 0 ? T(-x) : x;
}

template <Scalar T>
int sign_of(const T& x) {
  return x > 0 ? 1 : (x < 0 ? -1 : 0);
}

template <Scalar T>
T max_of(const T& a, const T& b) {
  return a < b ? b : a;
}

template <Scalar T>
T min_of(const T& a, const T& b) {
  return b < a ? b : a;
}

/// Comparison slack: zero for exact scalars, `tol` otherwise.
template <Scalar T>
T slack(double tol = unit_tol) {
  if constexpr (is_exact_v<T>) {
    return T(0);
  } else {
    return tol;
  }
}

/// |x| == 1 up to the scalar's slack.
template <Scalar T>
bool has_unit_magnitude(const T& x, double tol = unit_tol) {
  return abs_of(T(abs_of(x) - T(1))) <= slack<T>(tol);
}

/// Parses "3", "-0.125", "1e-3" or "2/7" into an exact rational.
inline Rational parse_rational(std::string_view text) {
  std::string s(text);
  auto slash = s.find('/');
  if (slash != std::string::npos) {
    Rational num = parse_rational(s.substr(0, slash));
    Rational den = parse_rational(s.substr(slash + 1));
    if (den == 0) throw std::invalid_argument("zero denominator in '" + s + "'");
    return num / den;
  }
  std::size_t pos = 0;
  bool negative = false;
  if (pos < s.size() && (s[pos] == '+' || s[pos] == '-')) negative = s[pos++] == '-';
  boost::multiprecision::cpp_int digits = 0;
  int frac_digits = 0;
  bool seen_point = false;
  bool any_digit = false;
  for (; pos < s.size(); ++pos) {
    char c = s[pos];
    if (c >= '0' && c <= '9') {
      digits = digits * 10 + (c - '0');
      any_digit = true;
      if (seen_point) ++frac_digits;
    } else if (c == '.' && !seen_point) {
      seen_point = true;
    } else {
      break;
    }
  }
  if (!any_digit) throw std::invalid_argument("not a number: '" + s + "'");
  long exponent = -frac_digits;
  if (pos < s.size() && (s[pos] == 'e' || s[pos] == 'E')) {
    exponent += std::stol(s.substr(pos + 1));
    pos = s.size();
  }
  if (pos != s.size()) throw std::invalid_argument("trailing characters in '" + s + "'");
  Rational value(digits);
  boost::multiprecision::cpp_int scale = boost::multiprecision::pow(
      boost::multiprecision::cpp_int(10), static_cast<unsigned>(exponent < 0 ? -exponent : exponent));
  value = exponent < 0 ? value / Rational(scale) : value * Rational(scale);
  return negative ? Rational(-value) : value;
}

inline std::string to_string(const Rational& x) {
  if (boost::multiprecision::denominator(x) == 1) return boost::multiprecision::numerator(x).str();
  return boost::multiprecision::numerator(x).str() + "/" + boost::multiprecision::denominator(x).str();
}

}  // namespace delta_lab
