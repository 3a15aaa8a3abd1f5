#include "geiringer/rational.hpp"

#include <stdexcept>

namespace geiringer {

std::string to_string(const Rational& value) {
  return boost::multiprecision::numerator(value).str() + "/" +
         boost::multiprecision::denominator(value).str();
}

namespace {

BigInt parse_integer(std::string_view text, std::string_view whole) {
  std::size_t i = 0;
  if (!text.empty() && (text[0] == '-' || text[0] == '+')) i = 1;
  if (i == text.size()) throw std::invalid_argument("malformed rational '" + std::string(whole) + "'");
  for (std::size_t k = i; k < text.size(); ++k) {
    if (text[k] < '0' || text[k] > '9') {
      throw std::invalid_argument("malformed rational '" + std::string(whole) + "'");
    }
  }
  BigInt v(std::string(text.substr(i)));
  return text[0] == '-' ? BigInt(-v) : v;
}

}  // namespace

Rational parse_rational(std::string_view text) {
  const auto slash = text.find('/');
  if (slash == std::string_view::npos) return Rational(parse_integer(text, text));
  const BigInt num = parse_integer(text.substr(0, slash), text);
  const auto den_text = text.substr(slash + 1);
  if (!den_text.empty() && (den_text[0] == '-' || den_text[0] == '+')) {
    throw std::invalid_argument("malformed rational '" + std::string(text) + "'");
  }
  const BigInt den = parse_integer(den_text, text);
  if (den == 0) throw std::invalid_argument("zero denominator in '" + std::string(text) + "'");
  return Rational(num, den);
}

std::string decimal_string(const Rational& value, int digits) {
  const bool negative = value < 0;
  const Rational magnitude = negative ? Rational(-value) : value;
  BigInt scale = 1;
  for (int i = 0; i < digits; ++i) scale *= 10;
  const Rational scaled = magnitude * scale;
  const BigInt num = boost::multiprecision::numerator(scaled);
  const BigInt den = boost::multiprecision::denominator(scaled);
  BigInt q = num / den;
  if ((num % den) * 2 >= den) q += 1;
  std::string s = q.str();
  if (digits > 0) {
    if (s.size() <= static_cast<std::size_t>(digits)) s.insert(0, digits + 1 - s.size(), '0');
    s.insert(s.size() - digits, ".");
  }
  return (negative && q != 0) ? "-" + s : s;
}

}  // namespace geiringer
