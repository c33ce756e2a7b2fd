#include "nsw/rational.hpp"

#include <cctype>
#include <stdexcept>
#include <string>

namespace nsw {

namespace {

Integer parse_integer(std::string_view text, std::string_view whole) {
  std::size_t pos = 0;
  if (!text.empty() && (text[0] == '-' || text[0] == '+')) pos = 1;
  if (pos == text.size()) throw std::invalid_argument("malformed rational '" + std::string(whole) + "'");
  for (std::size_t k = pos; k < text.size(); ++k) {
    if (!std::isdigit(static_cast<unsigned char>(text[k]))) {
      throw std::invalid_argument("malformed rational '" + std::string(whole) + "'");
    }
  }
  std::string digits(text.substr(text[0] == '+' ? 1 : 0));
  return Integer(digits);
}

}  // namespace

Rational parse_rational(std::string_view text) {
  auto slash = text.find('/');
  if (slash == std::string_view::npos) return Rational(parse_integer(text, text));
  Integer num = parse_integer(text.substr(0, slash), text);
  Integer den = parse_integer(text.substr(slash + 1), text);
  if (den == 0) throw std::invalid_argument("zero denominator in '" + std::string(text) + "'");
  return Rational(num, den);
}

std::string format_rational(const Rational& r) {
  if (denominator_of(r) == 1) return numerator_of(r).str();
  return numerator_of(r).str() + "/" + denominator_of(r).str();
}

std::string format_decimal(const Rational& r, int significant_digits) {
  boost::multiprecision::mpf_float_100 f(r);
  return f.str(significant_digits);
}

double to_double(const Rational& r) { return r.convert_to<double>(); }

Rational pow(const Rational& base, std::uint64_t exponent) {
  Rational result = 1;
  Rational b = base;
  while (exponent > 0) {
    if (exponent & 1U) result *= b;
    exponent >>= 1U;
    if (exponent > 0) b *= b;
  }
  return result;
}

Integer numerator_of(const Rational& r) { return boost::multiprecision::numerator(r); }
Integer denominator_of(const Rational& r) { return boost::multiprecision::denominator(r); }

PowerBound least_power_at_least(const Rational& base, const Rational& value) {
  if (base <= 1) throw std::invalid_argument("power base must exceed 1");
  PowerBound out{1, base};
  while (out.power < value) {
    out.power *= base;
    ++out.exponent;
  }
  return out;
}

}  // namespace nsw
