#include "elo/fourier.hpp"

#include "elo/exact_dist.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace elo::fourier {

namespace mp = boost::multiprecision;

namespace {

void require_open_probability(const Real& p) {
  if (!(p > 0 && p < 1)) throw std::invalid_argument("p must lie strictly between 0 and 1");
}

void require_angle(const Real& y) {
  if (!(y >= 0 && y <= pi())) throw std::invalid_argument("y must lie in [0, pi]");
}

// n ln|1 - p + p e^{-iy}|, using 1 - cos y = 2 sin^2(y/2).
Real log_magnitude_power(unsigned long n, const Real& y, const Real& p) {
  const Real s = mp::sin(y / 2);
  return Real(n) / 2 * mp::log1p(-4 * p * (1 - p) * s * s);
}

Real magnitude_power(unsigned long n, const Real& y, const Real& p) {
  if (n == 0) return Real(1);
  return mp::exp(log_magnitude_power(n, y, p));
}

// Panel boundaries on [0, pi]: the split at n^-0.4 plus a geometric ladder in
// units of the peak width 1/sqrt(a n).
std::vector<Real> mesh(unsigned long n, const Real& p) {
  const Real top = pi();
  std::vector<Real> points{Real(0), top};
  if (n >= 2) {
    const Real split = mp::pow(Real(n), Real(-0.4));
    if (split < top) points.push_back(split);
    const Real width = 1 / mp::sqrt(p * (1 - p) / 2 * n);
    for (int j = -2; j <= 6; ++j) {
      Real y = mp::ldexp(width, j);
      if (y < top) points.push_back(std::move(y));
    }
  }
  std::sort(points.begin(), points.end());
  points.erase(std::unique(points.begin(), points.end()), points.end());
  return points;
}

}  // namespace

void FourierParams::validate() const {
  if (static_cast<unsigned long>(t < 0 ? -t : t) > n) throw std::invalid_argument("|t| must not exceed n");
  if (((static_cast<long>(n) - t) % 2) != 0) throw std::invalid_argument("t must have the parity of n");
  require_open_probability(p);
}

AsymConstants asym_constants(const Real& p, unsigned long n) {
  AsymConstants k;
  k.a = p * (1 - p) / 2;
  k.b = (p - 3 * p * p + 2 * p * p * p) / 6;
  k.c = mp::sqrt(pi()) / 32 * mp::pow(k.a * n, Real(-3.5)) * k.b * k.b;
  return k;
}

Real char_magnitude(const Real& y, const Real& p) {
  require_open_probability(p);
  require_angle(y);
  const Real s = mp::sin(y / 2);
  const Real v = 1 - 4 * p * (1 - p) * s * s;
  return v <= 0 ? Real(0) : Real(mp::sqrt(v));
}

Real char_arg(const Real& y, const Real& p) {
  require_open_probability(p);
  require_angle(y);
  return -mp::atan2(p * mp::sin(y), 1 - p + p * mp::cos(y));
}

Real default_tolerance(unsigned long n, const Real& p) {
  if (n <= 1000) return Real("1e-12");
  // Leading order of int_0^pi exp(-a n y^2) dy.
  const Real leading = mp::sqrt(pi() / (2 * p * (1 - p) * n));
  return Real("1e-14") * leading;
}

QuadResult q_integral(const FourierParams& params, const Real& tol) {
  params.validate();
  const Real& p = params.p;
  const Real x(params.x);
  const Real t(params.t);
  const auto n = params.n;
  auto integrand = [&](const Real& y) -> Real {
    const Real theta = x * y - t * mp::atan2(p * mp::sin(y), 1 - p + p * mp::cos(y));
    const Real s = mp::sin(theta / 2);
    return magnitude_power(n, y, p) * 2 * s * s;
  };
  const auto points = mesh(n, p);
  return integrate_adaptive(integrand, points, tol);
}

QuadResult base_integral(unsigned long n, const Real& p, const Real& tol) {
  require_open_probability(p);
  auto integrand = [&](const Real& y) -> Real { return magnitude_power(n, y, p); };
  const auto points = mesh(n, p);
  return integrate_adaptive(integrand, points, tol);
}

Real prob_identity(const FourierParams& params, const Real& tol) {
  params.validate();
  const QuadResult base = base_integral(params.n, params.p, tol);
  const QuadResult q = q_integral(params, tol);
  return (base.value - q.value) / pi();
}

Real u_of(const FourierParams& params) {
  params.validate();
  const auto k = asym_constants(params.p, params.n);
  if (k.b == 0) throw std::domain_error("u is undefined when b = 0 (p = 1/2)");
  return k.a / k.b * Real(params.n) * (Real(params.x) - Real(params.t) * params.p);
}

bool asymptotic_applicable(const FourierParams& params) {
  if (!(params.p > 0 && params.p < 1) || params.p * 2 == 1) return false;
  if (params.n == 0) return false;
  const Real offset = mp::abs(Real(params.x) - Real(params.t) * params.p);
  return offset <= mp::pow(Real(params.n), Real("0.01"));
}

Real q_asymptotic(const FourierParams& params) {
  params.validate();
  if (params.p * 2 == 1) throw std::domain_error("the expansion excludes p = 1/2");
  if (!asymptotic_applicable(params)) throw std::domain_error("the expansion requires |x - tp| <= n^0.01");
  const auto k = asym_constants(params.p, params.n);
  const Real u = u_of(params);
  const Real t(params.t);
  return k.c * (4 * u * u + 12 * u * t + 15 * t * t);
}

LocalizationReport check_localization(unsigned long n, long t, const Rational& p) {
  if (!(p > 0 && p < 1)) throw std::invalid_argument("p must lie strictly between 0 and 1");
  if (static_cast<unsigned long>(t < 0 ? -t : t) > n || ((static_cast<long>(n) - t) % 2) != 0)
    throw std::invalid_argument("t must satisfy |t| <= n and t = n (mod 2)");
  LocalizationReport report;
  report.n = n;
  report.t = t;
  report.p = p;
  const unsigned long ell = (n + static_cast<unsigned long>(t)) / 2;
  const auto dist = build_dist(ell, n - ell, p);
  report.argmax = dist.modes();
  report.literal_bound = std::pow(static_cast<double>(n), 0.01);
  const Rational mean = Rational(t) * p;
  report.within_literal = report.within_unit = report.within_either = true;
  for (long x : report.argmax) {
    const Rational d = abs(Rational(x) - mean);
    report.distances.push_back(d);
    const double dd = d.get_d();
    if (dd > report.literal_bound) report.within_literal = false;
    if (d > 1) report.within_unit = false;
    if (dd > std::max(report.literal_bound, 1.0)) report.within_either = false;
  }
  return report;
}

}  // namespace elo::fourier
