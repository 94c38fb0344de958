#pragma once

#include "elo/rational.hpp"

#include <compare>
#include <cstdint>
#include <vector>

namespace elo {

/// Rational pmf of Bin(ell, p) - Bin(m, p) on its support [-m, ell].
class BinDiffDist {
 public:
  BinDiffDist(unsigned long ell, unsigned long m, Rational p, std::vector<Rational> masses);

  unsigned long ell() const { return ell_; }
  unsigned long m() const { return m_; }
  const Rational& p() const { return p_; }

  long min_support() const { return -static_cast<long>(m_); }
  long max_support() const { return static_cast<long>(ell_); }

  /// Zero outside [-m, ell].
  Rational pmf(long d) const;

  /// Masses indexed by d + m.
  const std::vector<Rational>& masses() const { return masses_; }

  Rational total() const;
  Rational max_mass() const;

  /// All d attaining max_mass(), ascending.
  std::vector<long> modes() const;

  /// pmf(d)^2 >= pmf(d-1) pmf(d+1) across the contiguous support.
  bool is_log_concave() const;

 private:
  unsigned long ell_;
  unsigned long m_;
  Rational p_;
  std::vector<Rational> masses_;
};

struct SplitPoint {
  unsigned long ell = 0;
  long x = 0;

  friend auto operator<=>(const SplitPoint&, const SplitPoint&) = default;
};

/// Optimal split of n unit coefficients into ell (+1)'s and n - ell (-1)'s.
struct LStarResult {
  unsigned long n = 0;
  Rational p;
  unsigned long ell_star = 0;
  long x_star = 0;
  Rational prob;
  /// Every (ell, x) attaining prob, sorted by (ell, x).
  std::vector<SplitPoint> ties;
  /// p in {0, 1/2, 1}: every split attains the maximum.
  bool degenerate = false;
};

/// C(n, k) p^k (1 - p)^(n - k); zero for k outside [0, n].
Rational binom_pmf(unsigned long n, long k, const Rational& p);

/// Pr(Bin(ell, p) - Bin(m, p) = d).
Rational bin_diff_pmf(unsigned long ell, unsigned long m, const Rational& p, long d);

BinDiffDist build_dist(unsigned long ell, unsigned long m, const Rational& p);

/// max over 0 <= ell <= n and d of Pr(Bin(ell, p) - Bin(n - ell, p) = d),
/// scanned exhaustively in exact arithmetic. The canonical (ell_star, x_star)
/// is the tie with the smallest ell >= ceil(n/2), then smallest |x|, then
/// smallest x.
LStarResult concentration_bound(unsigned long n, const Rational& p);

/// sum_k p^(2k) (1-p)^(n-2k) C(ell, k) C(n-ell, k) = Pr(X = 0) for the
/// (ell, n - ell) split.
Rational pr_zero_convolution(unsigned long n, unsigned long ell, const Rational& p);

/// Canonical representative of a tie set under the rule used by
/// concentration_bound. Requires a non-empty set.
SplitPoint canonical_split(unsigned long n, const std::vector<SplitPoint>& ties);

}  // namespace elo
