#include "elo/exact_dist.hpp"

#include <algorithm>
#include <cstdlib>
#include <stdexcept>
#include <utility>

namespace elo {

namespace {

void require_nonneg_split(unsigned long ell, unsigned long m) {
  // Guards against unsigned wrap-around from callers computing n - ell.
  constexpr unsigned long kLimit = 1ul << 40;
  if (ell > kLimit || m > kLimit) throw std::invalid_argument("split sizes out of range");
}

// Integer numerator of Pr(Bin(n, p) = k) over the denominator s^n, p = r/s.
Integer scaled_binom(unsigned long n, unsigned long k, const Integer& r, const Integer& c) {
  Integer out = binomial(n, k);
  Integer t;
  mpz_pow_ui(t.get_mpz_t(), r.get_mpz_t(), k);
  out *= t;
  mpz_pow_ui(t.get_mpz_t(), c.get_mpz_t(), n - k);
  out *= t;
  return out;
}

Rational over_power(const Integer& numerator, const Integer& s, unsigned long exponent) {
  Rational q;
  q.get_num() = numerator;
  mpz_pow_ui(q.get_den_mpz_t(), s.get_mpz_t(), exponent);
  q.canonicalize();
  return q;
}

}  // namespace

BinDiffDist::BinDiffDist(unsigned long ell, unsigned long m, Rational p, std::vector<Rational> masses)
    : ell_(ell), m_(m), p_(std::move(p)), masses_(std::move(masses)) {
  if (masses_.size() != ell_ + m_ + 1) throw std::invalid_argument("mass vector does not match support [-m, ell]");
}

Rational BinDiffDist::pmf(long d) const {
  if (d < min_support() || d > max_support()) return Rational(0);
  return masses_[static_cast<std::size_t>(d + static_cast<long>(m_))];
}

Rational BinDiffDist::total() const {
  Rational sum = 0;
  for (const auto& w : masses_) sum += w;
  return sum;
}

Rational BinDiffDist::max_mass() const {
  return *std::max_element(masses_.begin(), masses_.end());
}

std::vector<long> BinDiffDist::modes() const {
  const Rational best = max_mass();
  std::vector<long> out;
  for (std::size_t i = 0; i < masses_.size(); ++i)
    if (masses_[i] == best) out.push_back(static_cast<long>(i) - static_cast<long>(m_));
  return out;
}

bool BinDiffDist::is_log_concave() const {
  // Contiguous support: the nonzero masses.
  std::size_t lo = 0;
  std::size_t hi = masses_.size();
  while (lo < hi && masses_[lo] == 0) ++lo;
  while (hi > lo && masses_[hi - 1] == 0) --hi;
  for (std::size_t i = lo; i < hi; ++i)
    if (masses_[i] == 0) return false;
  for (std::size_t i = lo + 1; i + 1 < hi; ++i)
    if (masses_[i] * masses_[i] < masses_[i - 1] * masses_[i + 1]) return false;
  return true;
}

Rational binom_pmf(unsigned long n, long k, const Rational& p) {
  require_probability(p);
  if (k < 0 || static_cast<unsigned long>(k) > n) return Rational(0);
  const Integer r = p.get_num();
  const Integer c = p.get_den() - p.get_num();
  return over_power(scaled_binom(n, static_cast<unsigned long>(k), r, c), p.get_den(), n);
}

Rational bin_diff_pmf(unsigned long ell, unsigned long m, const Rational& p, long d) {
  require_probability(p);
  require_nonneg_split(ell, m);
  if (d < -static_cast<long>(m) || d > static_cast<long>(ell)) return Rational(0);
  const Integer r = p.get_num();
  const Integer c = p.get_den() - p.get_num();
  // k - j = d with 0 <= k <= ell, 0 <= j <= m.
  Integer sum = 0;
  const long j_lo = std::max(0L, -d);
  const long j_hi = std::min(static_cast<long>(m), static_cast<long>(ell) - d);
  for (long j = j_lo; j <= j_hi; ++j) {
    const auto k = static_cast<unsigned long>(j + d);
    sum += scaled_binom(ell, k, r, c) * scaled_binom(m, static_cast<unsigned long>(j), r, c);
  }
  return over_power(sum, p.get_den(), ell + m);
}

BinDiffDist build_dist(unsigned long ell, unsigned long m, const Rational& p) {
  require_probability(p);
  require_nonneg_split(ell, m);
  const Integer r = p.get_num();
  const Integer c = p.get_den() - p.get_num();
  std::vector<Integer> up(ell + 1);
  std::vector<Integer> down(m + 1);
  for (unsigned long k = 0; k <= ell; ++k) up[k] = scaled_binom(ell, k, r, c);
  for (unsigned long j = 0; j <= m; ++j) down[j] = scaled_binom(m, j, r, c);

  // Index d + m; d = k - j.
  std::vector<Integer> scaled(ell + m + 1);
  for (unsigned long k = 0; k <= ell; ++k)
    for (unsigned long j = 0; j <= m; ++j) scaled[k + m - j] += up[k] * down[j];

  std::vector<Rational> masses;
  masses.reserve(scaled.size());
  for (const auto& v : scaled) masses.push_back(over_power(v, p.get_den(), ell + m));
  return BinDiffDist(ell, m, p, std::move(masses));
}

SplitPoint canonical_split(unsigned long n, const std::vector<SplitPoint>& ties) {
  if (ties.empty()) throw std::invalid_argument("empty tie set");
  const unsigned long half = (n + 1) / 2;
  auto key = [half](const SplitPoint& s) {
    return std::make_tuple(s.ell >= half ? 0 : 1, s.ell, std::labs(s.x), s.x);
  };
  return *std::min_element(ties.begin(), ties.end(),
                           [&](const SplitPoint& a, const SplitPoint& b) { return key(a) < key(b); });
}

LStarResult concentration_bound(unsigned long n, const Rational& p) {
  require_probability(p);
  if (n == 0) throw std::invalid_argument("n must be positive");
  require_nonneg_split(n, 0);

  LStarResult result;
  result.n = n;
  result.p = p;

  if (p == 0 || p == 1) {
    result.degenerate = true;
    result.prob = 1;
    for (unsigned long ell = 0; ell <= n; ++ell) {
      const long x = p == 0 ? 0 : 2 * static_cast<long>(ell) - static_cast<long>(n);
      result.ties.push_back({ell, x});
    }
    const SplitPoint best = canonical_split(n, result.ties);
    result.ell_star = best.ell;
    result.x_star = best.x;
    return result;
  }

  const Integer r = p.get_num();
  const Integer c = p.get_den() - p.get_num();

  // poly[i] = s^n Pr(X = i - m) for the current split: the coefficients of
  // (c + r z)^ell (c z + r)^m. Moving to ell + 1 multiplies by
  // (c + r z) / (c z + r); the division is exact.
  std::vector<Integer> poly(n + 1);
  for (unsigned long i = 0; i <= n; ++i) poly[i] = scaled_binom(n, i, c, r);
  std::vector<Integer> quotient(n);
  Integer scratch;

  Integer best = -1;
  for (unsigned long ell = 0; ell <= n; ++ell) {
    const long m = static_cast<long>(n - ell);
    const Integer& local = *std::max_element(poly.begin(), poly.end());
    if (local >= best) {
      if (local > best) {
        best = local;
        result.ties.clear();
      }
      for (unsigned long i = 0; i <= n; ++i)
        if (poly[i] == best) result.ties.push_back({ell, static_cast<long>(i) - m});
    }
    if (ell == n) break;

    mpz_divexact(quotient[0].get_mpz_t(), poly[0].get_mpz_t(), r.get_mpz_t());
    for (unsigned long i = 1; i < n; ++i) {
      mpz_mul(scratch.get_mpz_t(), c.get_mpz_t(), quotient[i - 1].get_mpz_t());
      mpz_sub(scratch.get_mpz_t(), poly[i].get_mpz_t(), scratch.get_mpz_t());
      mpz_divexact(quotient[i].get_mpz_t(), scratch.get_mpz_t(), r.get_mpz_t());
    }
    for (unsigned long i = 0; i <= n; ++i) {
      if (i < n)
        mpz_mul(poly[i].get_mpz_t(), c.get_mpz_t(), quotient[i].get_mpz_t());
      else
        poly[i] = 0;
      if (i > 0) mpz_addmul(poly[i].get_mpz_t(), r.get_mpz_t(), quotient[i - 1].get_mpz_t());
    }
  }

  result.prob = over_power(best, p.get_den(), n);
  result.degenerate = p == Rational(1, 2);
  const SplitPoint canonical = canonical_split(n, result.ties);
  result.ell_star = canonical.ell;
  result.x_star = canonical.x;
  return result;
}

Rational pr_zero_convolution(unsigned long n, unsigned long ell, const Rational& p) {
  require_probability(p);
  if (ell > n) throw std::invalid_argument("ell must lie in [0, n]");
  const unsigned long m = n - ell;
  const Rational q = 1 - p;
  Rational sum = 0;
  for (unsigned long k = 0; k <= std::min(ell, m); ++k)
    sum += pow(p, 2 * k) * pow(q, n - 2 * k) * Rational(binomial(ell, k) * binomial(m, k));
  return sum;
}

}  // namespace elo
