#pragma once

#include "elo/rational.hpp"

#include <boost/multiprecision/mpfr.hpp>

#include <string>
#include <string_view>

namespace elo {

/// Variable-precision binary float. The default precision is process-wide
/// and starts at ELO_PRECISION_BITS (or kDefaultPrecisionBits).
using Real = boost::multiprecision::mpfr_float;

inline constexpr unsigned kDefaultPrecisionBits = 128;

/// Sets the default working precision for Real values created afterwards.
/// Not synchronized: change it only while no other thread creates Reals.
void set_precision_bits(unsigned bits);
unsigned precision_bits();

/// Reads ELO_PRECISION_BITS, falling back to kDefaultPrecisionBits.
unsigned precision_bits_from_env();

/// Restores the previous precision on destruction.
class PrecisionScope {
 public:
  explicit PrecisionScope(unsigned bits);
  ~PrecisionScope();
  PrecisionScope(const PrecisionScope&) = delete;
  PrecisionScope& operator=(const PrecisionScope&) = delete;

 private:
  unsigned saved_digits10_;
};

Real to_real(const Rational& q);
Real parse_real(std::string_view text);

/// Exact rational value of a finite Real.
Rational to_rational(const Real& x);

std::string to_decimal(const Real& x, int digits = 30);

Real pi();

}  // namespace elo
