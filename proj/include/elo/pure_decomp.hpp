#pragma once

#include "elo/oracle.hpp"
#include "elo/rational.hpp"

#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

// Subset profiles gamma(k, r): for each subset size k in {0..i}, a finite
// distribution over sums r. Provides the property checks, the extraction of
// pure chains, and the bilinear point-probability form built on them.
namespace elo::pure {

class SubsetProfile {
 public:
  explicit SubsetProfile(unsigned max_index);

  unsigned max_index() const { return static_cast<unsigned>(rows_.size() - 1); }

  /// Setting a zero weight removes the entry.
  void set(unsigned k, const Rational& r, const Rational& weight);
  void add(unsigned k, const Rational& r, const Rational& weight);
  Rational at(unsigned k, const Rational& r) const;
  /// Multiplies every weight by `factor` (nonzero).
  void scale(const Rational& factor);

  const std::map<Rational, Rational>& row(unsigned k) const { return rows_.at(k); }
  std::size_t support_size() const;

  friend bool operator==(const SubsetProfile&, const SubsetProfile&) = default;

 private:
  std::vector<std::map<Rational, Rational>> rows_;
};

/// Strictly increasing chain r_0 < ... < r_i with unit mass at (k, r_k).
class PureProfile {
 public:
  explicit PureProfile(std::vector<Rational> points);

  unsigned max_index() const { return static_cast<unsigned>(points_.size() - 1); }
  const std::vector<Rational>& points() const { return points_; }
  SubsetProfile to_profile() const;

  friend bool operator==(const PureProfile&, const PureProfile&) = default;

 private:
  std::vector<Rational> points_;
};

struct DecompositionTerm {
  Rational weight;
  PureProfile profile;
};

struct ConvexDecomposition {
  unsigned max_index = 0;
  std::vector<DecompositionTerm> terms;

  Rational total_weight() const;
  SubsetProfile recombine() const;
};

struct ChainViolation {
  unsigned k = 0;
  /// Empty for the -inf / +inf sentinels.
  std::optional<Rational> r;
  Rational value;
};

struct PropertyReport {
  bool nonnegative = true;        // every weight >= 0
  bool rows_normalized = true;    // each row sums to 1
  bool chain_condition = true;    // sum_{r'<=r} g(k+1,r') + sum_{r'>=r} g(k,r') <= 1
  std::optional<ChainViolation> violation;

  bool all() const { return nonnegative && rows_normalized && chain_condition; }
};

PropertyReport check_properties(const SubsetProfile& gamma);

/// Profile alpha(k, r) of a multiset of positive values: the probability
/// that a uniformly random k-subset sums to r.
SubsetProfile profile_from_multiset(std::span<const Rational> multiset);

/// Convex combination of pure profiles reproducing gamma exactly. Each step
/// peels off the chain of row minima with weight lambda = min_k gamma(k, r_k)
/// and renormalizes the remainder. Throws std::invalid_argument if gamma
/// fails check_properties, std::logic_error on an internal inconsistency.
/// `observer` sees every intermediate remainder.
ConvexDecomposition decompose(const SubsetProfile& gamma,
                              const std::function<void(const SubsetProfile&)>& observer = {});

/// sum_r Pr(Y = r) Pr(Z = r - x) with Pr(Y = r) = sum_k f(k) alpha(k, r) and
/// f, g the Bin(ell, p), Bin(m, p) pmfs (ell, m the profile indices).
Rational bilinear_B(const SubsetProfile& alpha, const SubsetProfile& beta, const Rational& p, const Rational& x);

/// sum of f(k) g(j) over index pairs with r_k = s_j + x.
Rational pure_value(const PureProfile& alpha, const PureProfile& beta, const Rational& p, const Rational& x);

inline constexpr unsigned kMaxPureTotal = 8;
inline constexpr unsigned kMaxPureGrid = 12;

struct PureMaximum {
  Rational best_value;
  PureProfile best_alpha{std::vector<Rational>{0}};
  PureProfile best_beta{std::vector<Rational>{0}};
  std::size_t configurations = 0;
  /// max_d Pr(Bin(ell, p) - Bin(m, p) = d) and its canonical argmax.
  Rational binomial_max;
  long binomial_argmax = 0;
  bool equals_binomial_max = false;
  /// The full offset matching at binomial_argmax reaches best_value.
  bool attained_by_offset = false;
};

/// Enumerates every pure pair on an integer grid of `grid_size` consecutive
/// values (up to translation, r_0 = 0) and maximizes pure_value. Requires
/// ell + m <= 8, grid_size <= 12 and grid_size >= ell + m + 1.
PureMaximum max_over_pure(unsigned ell, unsigned m, const Rational& p, const Rational& x, unsigned grid_size);

/// The chain point_prob = B(alpha, beta) <= max over decomposition pairs of
/// pure_value <= max_d Pr(Bin(ell, p) - Bin(m, p) = d) for one coefficient
/// vector, with the bilinear expansion over the decompositions.
struct PipelineReport {
  unsigned ell = 0;
  unsigned m = 0;
  Rational point_prob;
  Rational bilinear;
  Rational decomposition_sum;
  Rational pure_bound;
  Rational binomial_bound;
  bool holds = false;
};

PipelineReport pipeline_check(const oracle::ExactCoefficients& coeffs, const Rational& p, const Rational& x);

/// {"i": i, "entries": [[k, r_num, r_den, w_num, w_den], ...]}; numbers that
/// do not fit in 64 bits are written as strings.
std::string profile_to_json(const SubsetProfile& gamma);
SubsetProfile profile_from_json(std::string_view text);

}  // namespace elo::pure
