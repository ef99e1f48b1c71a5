#pragma once

#include <gmpxx.h>

#include <charconv>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <string_view>
#include <system_error>

#include "dirot/errors.hpp"

namespace dirot {

/// Exact arbitrary-precision rational. Masses, cdf values and every
/// piecewise-linear coordinate are carried in this type.
using Rational = mpq_class;

inline Rational make_rational(long num, long den = 1) {
  if (den == 0) throw DomainError("zero denominator");
  Rational q(num, den);
  q.canonicalize();
  return q;
}

/// Exact value of a finite double.
inline Rational exact(double x) {
  if (!std::isfinite(x)) throw DomainError("non-finite value has no exact rational form");
  return Rational(x);
}

/// "p/q" in lowest terms, or "p" for integers.
inline std::string to_string(const Rational& q) { return q.get_str(); }

/// Nearest double (ties resolved toward the truncated candidate).
inline double to_double(const Rational& q) {
  const double d = q.get_d();  // truncates toward zero
  double best = d;
  Rational best_err = abs(q - Rational(d));
  for (double c : {std::nextafter(d, std::numeric_limits<double>::infinity()),
                   std::nextafter(d, -std::numeric_limits<double>::infinity())}) {
    if (!std::isfinite(c)) continue;
    Rational err = abs(q - Rational(c));
    if (err < best_err) {
      best_err = err;
      best = c;
    }
  }
  return best;
}

/// Smallest double >= q.
inline double to_double_up(const Rational& q) {
  double d = q.get_d();
  while (Rational(d) < q) d = std::nextafter(d, std::numeric_limits<double>::infinity());
  while (true) {
    const double below = std::nextafter(d, -std::numeric_limits<double>::infinity());
    if (Rational(below) >= q) {
      d = below;
    } else {
      break;
    }
  }
  return d;
}

/// Parses "p/q", an integer, or a decimal with optional exponent ("0.125",
/// "-3e-2") into an exact rational. Decimal text is read exactly, not through
/// a double.
inline Rational parse_rational(std::string_view text) {
  auto trim = [](std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
  };
  text = trim(text);
  if (text.empty()) throw ParseError("empty number");
  if (const auto slash = text.find('/'); slash != std::string_view::npos) {
    Rational num = parse_rational(text.substr(0, slash));
    Rational den = parse_rational(text.substr(slash + 1));
    if (den == 0) throw ParseError("zero denominator in '" + std::string(text) + "'");
    Rational q = num / den;
    return q;
  }
  std::size_t i = 0;
  bool negative = false;
  if (text[i] == '+' || text[i] == '-') {
    negative = text[i] == '-';
    ++i;
  }
  mpz_class digits = 0;
  long scale = 0;
  bool any_digit = false;
  bool seen_point = false;
  for (; i < text.size(); ++i) {
    const char c = text[i];
    if (c >= '0' && c <= '9') {
      digits = digits * 10 + (c - '0');
      any_digit = true;
      if (seen_point) --scale;
    } else if (c == '.' && !seen_point) {
      seen_point = true;
    } else {
      break;
    }
  }
  if (!any_digit) throw ParseError("not a number: '" + std::string(text) + "'");
  if (i < text.size()) {
    if (text[i] != 'e' && text[i] != 'E') throw ParseError("not a number: '" + std::string(text) + "'");
    long exponent = 0;
    const auto tail = text.substr(i + 1);
    const char* first = tail.data();
    if (!tail.empty() && tail.front() == '+') ++first;
    auto [ptr, ec] = std::from_chars(first, tail.data() + tail.size(), exponent);
    if (ec != std::errc() || ptr != tail.data() + tail.size()) {
      throw ParseError("bad exponent in '" + std::string(text) + "'");
    }
    scale += exponent;
  }
  Rational q(digits);
  mpz_class power;
  mpz_ui_pow_ui(power.get_mpz_t(), 10, static_cast<unsigned long>(scale < 0 ? -scale : scale));
  if (scale < 0) {
    q /= Rational(power);
  } else {
    q *= Rational(power);
  }
  q.canonicalize();
  return negative ? Rational(-q) : q;
}

/// Parses a finite double; rejects trailing garbage.
inline double parse_double(std::string_view text) {
  while (!text.empty() && (text.front() == ' ' || text.front() == '\t')) text.remove_prefix(1);
  while (!text.empty() && (text.back() == ' ' || text.back() == '\t' || text.back() == '\r')) text.remove_suffix(1);
  if (!text.empty() && text.front() == '+') text.remove_prefix(1);
  double value = 0.0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size() || !std::isfinite(value)) {
    throw ParseError("not a finite real: '" + std::string(text) + "'");
  }
  return value;
}

/// Shortest representation that round-trips.
inline std::string format_double(double x) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), x);
  (void)ec;
  return std::string(buf, ptr);
}

}  // namespace dirot
