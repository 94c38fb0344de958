#pragma once

#include <gmpxx.h>

#include <string>
#include <string_view>

namespace elo {

using Integer = mpz_class;
using Rational = mpq_class;

/// Parses "r/s", an integer, or a plain decimal such as "0.37" or "-1.5e-3"
/// into an exact rational in lowest terms. Throws std::invalid_argument.
Rational parse_rational(std::string_view text);

/// True when the text is written as a decimal (contains '.', 'e' or 'E').
bool looks_decimal(std::string_view text);

/// num/den in lowest terms; den must be nonzero.
Rational fraction(const Integer& num, const Integer& den);

std::string to_string(const Rational& q);

/// Significant-digit decimal rendering, e.g. "2.46093750000000000000000000000e-1".
std::string to_decimal(const Rational& q, int digits = 30);

bool is_probability(const Rational& p);

/// Throws std::invalid_argument unless 0 <= p <= 1.
void require_probability(const Rational& p);

Rational pow(const Rational& base, unsigned long exponent);

Integer binomial(unsigned long n, unsigned long k);

}  // namespace elo
