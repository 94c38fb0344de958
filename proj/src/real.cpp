#include "elo/real.hpp"

#include <cmath>
#include <cstdlib>
#include <stdexcept>

namespace elo {

namespace {

unsigned digits10_for_bits(unsigned bits) {
  return static_cast<unsigned>(std::ceil(bits * 0.30102999566398120)) + 1;
}

}  // namespace

void set_precision_bits(unsigned bits) {
  if (bits < 53) throw std::invalid_argument("precision must be at least 53 bits");
  Real::default_precision(digits10_for_bits(bits));
}

unsigned precision_bits() {
  Real probe;
  return static_cast<unsigned>(mpfr_get_prec(probe.backend().data()));
}

unsigned precision_bits_from_env() {
  const char* env = std::getenv("ELO_PRECISION_BITS");
  if (env == nullptr || *env == '\0') return kDefaultPrecisionBits;
  char* end = nullptr;
  long bits = std::strtol(env, &end, 10);
  if (end == env || *end != '\0' || bits < 53 || bits > 100000)
    throw std::invalid_argument(std::string("invalid ELO_PRECISION_BITS: ") + env);
  return static_cast<unsigned>(bits);
}

namespace {

// Working precision for the whole process unless a caller overrides it.
const bool kPrecisionInitialized = [] {
  try {
    set_precision_bits(precision_bits_from_env());
  } catch (const std::invalid_argument&) {
    set_precision_bits(kDefaultPrecisionBits);
  }
  return true;
}();

}  // namespace

PrecisionScope::PrecisionScope(unsigned bits) : saved_digits10_(Real::default_precision()) {
  set_precision_bits(bits);
}

PrecisionScope::~PrecisionScope() {
  Real::default_precision(saved_digits10_);
}

Real to_real(const Rational& q) {
  Real r;
  mpfr_set_q(r.backend().data(), q.get_mpq_t(), MPFR_RNDN);
  return r;
}

Real parse_real(std::string_view text) {
  // Decimal strings are exact rationals; round once at working precision.
  return to_real(parse_rational(text));
}

Rational to_rational(const Real& x) {
  if (!boost::multiprecision::isfinite(x)) throw std::domain_error("non-finite value has no rational form");
  Integer mantissa;
  mpfr_exp_t exponent = mpfr_get_z_2exp(mantissa.get_mpz_t(), x.backend().data());
  Rational q(mantissa, 1);
  if (exponent >= 0) {
    mpq_mul_2exp(q.get_mpq_t(), q.get_mpq_t(), static_cast<mp_bitcnt_t>(exponent));
  } else {
    mpq_div_2exp(q.get_mpq_t(), q.get_mpq_t(), static_cast<mp_bitcnt_t>(-exponent));
  }
  q.canonicalize();
  return q;
}

std::string to_decimal(const Real& x, int digits) {
  if (x == 0) return "0";
  return x.str(digits, std::ios_base::scientific);
}

Real pi() {
  Real r;
  mpfr_const_pi(r.backend().data(), MPFR_RNDN);
  return r;
}

}  // namespace elo
