#pragma once

#include <boost/rational.hpp>

#include <cstdint>
#include <numeric>
#include <string>
#include <string_view>

#include "hpdesign/error.hpp"

namespace hpdesign {

using Rational = boost::rational<std::int64_t>;

inline double to_double(const Rational& r) {
  return static_cast<double>(r.numerator()) / static_cast<double>(r.denominator());
}

/// Parses "3", "-0.25", "1.1", "7/4" exactly.
inline Rational parse_rational(std::string_view text) {
  auto fail = [&] { throw Error(Errc::ParseError, "not a rational number: '" + std::string(text) + "'"); };
  if (text.empty()) fail();
  bool negative = false;
  std::size_t pos = 0;
  if (text[0] == '-' || text[0] == '+') {
    negative = text[0] == '-';
    pos = 1;
  }
  if (pos >= text.size()) fail();

  if (auto slash = text.find('/'); slash != std::string_view::npos) {
    auto num = parse_rational(text.substr(pos, slash - pos));
    auto den = parse_rational(text.substr(slash + 1));
    if (num.denominator() != 1 || den.denominator() != 1 || den.numerator() == 0) fail();
    Rational r(num.numerator(), den.numerator());
    return negative ? -r : r;
  }

  std::int64_t num = 0;
  std::int64_t den = 1;
  bool seen_point = false;
  bool seen_digit = false;
  for (; pos < text.size(); ++pos) {
    char c = text[pos];
    if (c == '.') {
      if (seen_point) fail();
      seen_point = true;
      continue;
    }
    if (c < '0' || c > '9') fail();
    seen_digit = true;
    if (num > (INT64_MAX - 9) / 10 || (seen_point && den > INT64_MAX / 10)) fail();
    num = num * 10 + (c - '0');
    if (seen_point) den *= 10;
  }
  if (!seen_digit) fail();
  Rational r(num, den);
  return negative ? -r : r;
}

/// Exact decimal when the denominator is of the form 2^a 5^b, "p/q" otherwise.
inline std::string to_string(const Rational& r) {
  std::int64_t den = r.denominator();
  int twos = 0;
  int fives = 0;
  while (den % 2 == 0) { den /= 2; ++twos; }
  while (den % 5 == 0) { den /= 5; ++fives; }
  if (den != 1) return std::to_string(r.numerator()) + "/" + std::to_string(r.denominator());

  int digits = std::max(twos, fives);
  std::int64_t scale = 1;
  for (int i = 0; i < digits; ++i) scale *= 10;
  std::int64_t scaled = r.numerator() * (scale / r.denominator());
  bool negative = scaled < 0;
  std::uint64_t mag = negative ? static_cast<std::uint64_t>(-scaled) : static_cast<std::uint64_t>(scaled);
  std::string int_part = std::to_string(mag / static_cast<std::uint64_t>(scale));
  std::string out = negative ? "-" + int_part : int_part;
  if (digits > 0) {
    std::string frac = std::to_string(mag % static_cast<std::uint64_t>(scale));
    frac.insert(0, static_cast<std::size_t>(digits) - frac.size(), '0');
    out += "." + frac;
  }
  return out;
}

}  // namespace hpdesign
