#include "elo/rational.hpp"

#include <mpfr.h>

#include <algorithm>
#include <cctype>
#include <stdexcept>
#include <vector>

namespace elo {

namespace {

bool all_digits(std::string_view s) {
  return !s.empty() && std::all_of(s.begin(), s.end(), [](unsigned char c) { return std::isdigit(c) != 0; });
}

Integer parse_integer(std::string_view s) {
  std::string_view digits = s;
  if (!digits.empty() && (digits.front() == '-' || digits.front() == '+')) digits.remove_prefix(1);
  if (!all_digits(digits)) throw std::invalid_argument("not an integer: '" + std::string(s) + "'");
  std::string text(s.front() == '+' ? s.substr(1) : s);
  return Integer(text, 10);
}

Integer pow10(unsigned long e) {
  Integer r;
  mpz_ui_pow_ui(r.get_mpz_t(), 10, e);
  return r;
}

Rational parse_decimal(std::string_view text) {
  std::string_view mantissa = text;
  long exponent = 0;
  if (auto e = text.find_first_of("eE"); e != std::string_view::npos) {
    mantissa = text.substr(0, e);
    std::string_view exp_text = text.substr(e + 1);
    Integer ex = parse_integer(exp_text);
    if (!ex.fits_slong_p() || abs(ex) > 100000) throw std::invalid_argument("exponent out of range: '" + std::string(text) + "'");
    exponent = ex.get_si();
  }
  bool negative = false;
  if (!mantissa.empty() && (mantissa.front() == '-' || mantissa.front() == '+')) {
    negative = mantissa.front() == '-';
    mantissa.remove_prefix(1);
  }
  std::string_view int_part = mantissa;
  std::string_view frac_part;
  if (auto dot = mantissa.find('.'); dot != std::string_view::npos) {
    int_part = mantissa.substr(0, dot);
    frac_part = mantissa.substr(dot + 1);
  }
  if ((int_part.empty() && frac_part.empty()) || (!int_part.empty() && !all_digits(int_part)) ||
      (!frac_part.empty() && !all_digits(frac_part)))
    throw std::invalid_argument("not a decimal number: '" + std::string(text) + "'");
  std::string digits = std::string(int_part) + std::string(frac_part);
  if (digits.empty()) digits = "0";
  Rational q(Integer(digits, 10), 1);
  long scale = exponent - static_cast<long>(frac_part.size());
  if (scale >= 0)
    q *= pow10(static_cast<unsigned long>(scale));
  else
    q /= pow10(static_cast<unsigned long>(-scale));
  q.canonicalize();
  return negative ? Rational(-q) : q;
}

}  // namespace

bool looks_decimal(std::string_view text) {
  return text.find_first_of(".eE") != std::string_view::npos;
}

Rational parse_rational(std::string_view text) {
  while (!text.empty() && std::isspace(static_cast<unsigned char>(text.front()))) text.remove_prefix(1);
  while (!text.empty() && std::isspace(static_cast<unsigned char>(text.back()))) text.remove_suffix(1);
  if (text.empty()) throw std::invalid_argument("empty number");
  if (auto slash = text.find('/'); slash != std::string_view::npos) {
    Integer num = parse_integer(text.substr(0, slash));
    std::string_view den_text = text.substr(slash + 1);
    if (!all_digits(den_text)) throw std::invalid_argument("bad denominator in '" + std::string(text) + "'");
    Integer den(std::string(den_text), 10);
    if (den == 0) throw std::invalid_argument("zero denominator in '" + std::string(text) + "'");
    Rational q(num, den);
    q.canonicalize();
    return q;
  }
  if (looks_decimal(text)) return parse_decimal(text);
  return Rational(parse_integer(text), 1);
}

Rational fraction(const Integer& num, const Integer& den) {
  if (den == 0) throw std::invalid_argument("zero denominator");
  Rational q(num, den);
  q.canonicalize();
  return q;
}

std::string to_string(const Rational& q) {
  return q.get_str(10);
}

std::string to_decimal(const Rational& q, int digits) {
  if (q == 0) return "0";
  mpfr_t v;
  const auto bits = static_cast<mpfr_prec_t>(digits * 3.33) + 32;
  mpfr_init2(v, bits);
  mpfr_set_q(v, q.get_mpq_t(), MPFR_RNDN);
  std::vector<char> buf(static_cast<std::size_t>(digits) + 64);
  mpfr_snprintf(buf.data(), buf.size(), "%.*Re", digits - 1, v);
  mpfr_clear(v);
  return std::string(buf.data());
}

bool is_probability(const Rational& p) {
  return p >= 0 && p <= 1;
}

void require_probability(const Rational& p) {
  if (!is_probability(p)) throw std::invalid_argument("p must lie in [0, 1], got " + to_string(p));
}

Rational pow(const Rational& base, unsigned long exponent) {
  Rational r;
  mpz_pow_ui(r.get_num_mpz_t(), base.get_num_mpz_t(), exponent);
  mpz_pow_ui(r.get_den_mpz_t(), base.get_den_mpz_t(), exponent);
  return r;
}

Integer binomial(unsigned long n, unsigned long k) {
  Integer r;
  if (k > n) return r;
  mpz_bin_uiui(r.get_mpz_t(), n, k);
  return r;
}

}  // namespace elo
