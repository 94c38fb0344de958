#pragma once

#include "elo/quadrature.hpp"
#include "elo/rational.hpp"
#include "elo/real.hpp"

#include <vector>

// Fourier-side view of X = Bin(ell, p) - Bin(m, p) with n = ell + m and
// t = ell - m:
//   Pr(X = x) = (1/pi) int_0^pi |1-p+p e^{-iy}|^n dy - q(t, x) / pi,
//   q(t, x)   = int_0^pi |1-p+p e^{-iy}|^n (1 - cos(x y + t arg(1-p+p e^{-iy}))) dy,
// plus the large-n expansion q ~ c (4u^2 + 12ut + 15t^2).
namespace elo::fourier {

struct FourierParams {
  unsigned long n = 0;
  long t = 0;  // 2 ell - n
  long x = 0;
  Real p;

  /// Throws std::invalid_argument unless |t| <= n, t = n (mod 2), 0 < p < 1.
  void validate() const;
  unsigned long ell() const { return (n + static_cast<unsigned long>(t)) / 2; }
  unsigned long m() const { return n - ell(); }
};

struct AsymConstants {
  Real a;  // p(1-p)/2
  Real b;  // (p - 3p^2 + 2p^3)/6
  Real c;  // (sqrt(pi)/32) (a n)^(-7/2) b^2
};

AsymConstants asym_constants(const Real& p, unsigned long n);

/// |1 - p + p e^{-iy}| = sqrt(1 - 2p(1-p)(1 - cos y)), y in [0, pi].
Real char_magnitude(const Real& y, const Real& p);

/// Continuous branch -atan2(p sin y, 1 - p + p cos y) of arg(1 - p + p e^{-iy})
/// on [0, pi]; lies in (-pi/2, 0] when p <= 1/2 and in (-pi, 0] otherwise.
Real char_arg(const Real& y, const Real& p);

/// 1e-12 absolute for n <= 1000, else 1e-14 times the leading-order size of
/// base_integral.
Real default_tolerance(unsigned long n, const Real& p);

QuadResult q_integral(const FourierParams& params, const Real& tol);
QuadResult base_integral(unsigned long n, const Real& p, const Real& tol);

/// (base_integral - q_integral) / pi.
Real prob_identity(const FourierParams& params, const Real& tol);

/// (a/b) n (x - t p); throws std::domain_error when b = 0.
Real u_of(const FourierParams& params);

/// c (4u^2 + 12ut + 15t^2); requires p not in {0, 1/2, 1} and
/// |x - tp| <= n^0.01.
Real q_asymptotic(const FourierParams& params);

/// Whether q_asymptotic's preconditions hold.
bool asymptotic_applicable(const FourierParams& params);

struct LocalizationReport {
  unsigned long n = 0;
  long t = 0;
  Rational p;
  std::vector<long> argmax;          // every maximizing x
  std::vector<Rational> distances;   // |x - tp| per argmax entry
  double literal_bound = 0.0;        // n^0.01
  bool within_literal = false;       // all distances <= n^0.01
  bool within_unit = false;          // all distances <= 1
  bool within_either = false;        // all distances <= max(n^0.01, 1)
};

/// Exact argmax over x of Pr(Bin((n+t)/2, p) - Bin((n-t)/2, p) = x) and its
/// distance from the mean tp.
LocalizationReport check_localization(unsigned long n, long t, const Rational& p);

}  // namespace elo::fourier
