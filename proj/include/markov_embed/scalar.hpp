#pragma once

// Probability scalars. Every algorithm is written once against the
// `Probability` concept and instantiated for exact rationals (GMP) or
// IEEE doubles.

#include <gmpxx.h>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <concepts>
#include <cstdio>
#include <string>
#include <string_view>

#include "markov_embed/error.hpp"

namespace markov_embed {

using Rational = mpq_class;

template <class T>
struct ScalarTraits;

template <>
struct ScalarTraits<Rational> {
  static constexpr bool exact = true;
  static constexpr const char* name = "rational";
  static double to_double(const Rational& x) { return x.get_d(); }
  static Rational from_rational(const Rational& q) { return q; }
  static std::string format(const Rational& x) { return x.get_str(); }
};

template <>
struct ScalarTraits<double> {
  static constexpr bool exact = false;
  static constexpr const char* name = "floating";
  static double to_double(double x) { return x; }
  static double from_rational(const Rational& q) { return q.get_d(); }
  static std::string format(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
  }
};

template <class T>
concept Probability = requires(const T& a, const T& b) {
  { ScalarTraits<T>::exact } -> std::convertible_to<bool>;
  { a + b } -> std::convertible_to<T>;
  { a * b } -> std::convertible_to<T>;
  { a < b } -> std::convertible_to<bool>;
};

template <Probability T>
inline constexpr bool is_exact_v = ScalarTraits<T>::exact;

template <Probability T>
T from_rational(const Rational& q) {
  return ScalarTraits<T>::from_rational(q);
}

template <Probability T>
double to_double(const T& x) {
  return ScalarTraits<T>::to_double(x);
}

template <Probability T>
std::string format_probability(const T& x) {
  return ScalarTraits<T>::format(x);
}

template <Probability T>
T abs_diff(const T& a, const T& b) {
  T d = a - b;
  return d < T(0) ? T(-d) : d;
}

/// Equality used when comparing probabilities: exact for rationals,
/// `|a-b| <= tol` for doubles.
template <Probability T>
bool nearly_equal(const T& a, const T& b, double tol) {
  if constexpr (is_exact_v<T>) {
    return a == b;
  } else {
    return std::fabs(a - b) <= tol;
  }
}

namespace detail {

inline Rational pow10(unsigned e) {
  mpz_class p;
  mpz_ui_pow_ui(p.get_mpz_t(), 10, e);
  return Rational(p);
}

inline Rational parse_decimal(std::string_view text) {
  std::string s(text);
  std::size_t epos = s.find_first_of("eE");
  long exponent = 0;
  if (epos != std::string::npos) {
    std::string exp_text = s.substr(epos + 1);
    if (exp_text.empty()) throw InputError("malformed number '" + s + "'");
    auto [p, ec] = std::from_chars(exp_text.data() + (exp_text[0] == '+' ? 1 : 0),
                                   exp_text.data() + exp_text.size(), exponent);
    if (ec != std::errc() || p != exp_text.data() + exp_text.size())
      throw InputError("malformed number '" + s + "'");
    s = s.substr(0, epos);
  }
  bool negative = false;
  if (!s.empty() && (s[0] == '-' || s[0] == '+')) {
    negative = s[0] == '-';
    s = s.substr(1);
  }
  std::size_t dot = s.find('.');
  std::string digits = s;
  if (dot != std::string::npos) {
    digits = s.substr(0, dot) + s.substr(dot + 1);
    exponent -= static_cast<long>(s.size() - dot - 1);
  }
  if (digits.empty() || !std::all_of(digits.begin(), digits.end(), [](char c) { return c >= '0' && c <= '9'; }))
    throw InputError("malformed number '" + std::string(text) + "'");
  Rational value{mpz_class(digits, 10)};
  if (exponent > 0) value *= pow10(static_cast<unsigned>(exponent));
  if (exponent < 0) value /= pow10(static_cast<unsigned>(-exponent));
  if (negative) value = -value;
  return value;
}

}  // namespace detail

/// Parses "3/10", "0.3", "1e-3" or "2" into an exact rational.
inline Rational parse_rational(std::string_view text) {
  while (!text.empty() && text.front() == ' ') text.remove_prefix(1);
  while (!text.empty() && text.back() == ' ') text.remove_suffix(1);
  if (text.empty()) throw InputError("empty number");
  std::size_t slash = text.find('/');
  if (slash == std::string_view::npos) return detail::parse_decimal(text);
  Rational num = detail::parse_decimal(text.substr(0, slash));
  Rational den = detail::parse_decimal(text.substr(slash + 1));
  if (den == 0) throw InputError("zero denominator in '" + std::string(text) + "'");
  Rational q = num / den;
  q.canonicalize();
  return q;
}

/// Exact rational equal to the shortest decimal that round-trips `x`.
inline Rational rational_from_double(double x) {
  if (!std::isfinite(x)) throw InputError("non-finite number");
  char buf[64];
  auto [p, ec] = std::to_chars(buf, buf + sizeof buf, x);
  if (ec != std::errc()) throw InputError("cannot format number");
  return parse_rational(std::string_view(buf, static_cast<std::size_t>(p - buf)));
}

}  // namespace markov_embed
