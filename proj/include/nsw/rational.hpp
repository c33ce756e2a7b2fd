#pragma once

#include <boost/multiprecision/gmp.hpp>

#include <cstdint>
#include <string>
#include <string_view>

namespace nsw {

/// Exact rational number. Always stored in lowest terms with a positive
/// denominator (GMP canonicalizes after every operation).
using Rational = boost::multiprecision::number<boost::multiprecision::gmp_rational,
                                               boost::multiprecision::et_off>;
using Integer = boost::multiprecision::number<boost::multiprecision::gmp_int,
                                              boost::multiprecision::et_off>;

/// Parses `p/q`, `p` or `-p/q`. Throws std::invalid_argument on malformed
/// input or a zero denominator.
Rational parse_rational(std::string_view text);

/// Formats as `p/q`, or `p` when the denominator is one.
std::string format_rational(const Rational& r);

/// Decimal rendering with the given number of significant digits. Only for
/// human-readable reports.
std::string format_decimal(const Rational& r, int significant_digits = 12);

double to_double(const Rational& r);

Rational pow(const Rational& base, std::uint64_t exponent);

Integer numerator_of(const Rational& r);
Integer denominator_of(const Rational& r);

/// Least k >= 1 such that base^k >= value. Requires base > 1.
struct PowerBound {
  std::uint64_t exponent;
  Rational power;
};
PowerBound least_power_at_least(const Rational& base, const Rational& value);

}  // namespace nsw
