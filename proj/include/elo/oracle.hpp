#pragma once

#include "elo/rational.hpp"

#include <cstdint>
#include <span>
#include <string>
#include <variant>
#include <vector>

// Brute-force ground truth for X = sum a_i xi_i with xi_i ~ Ber(p), by
// enumerating all 2^n subsets. Two backends: exact rationals, and doubles
// with tolerance-based atom grouping.
namespace elo::oracle {

inline constexpr unsigned kPointQueryGuard = 24;
inline constexpr unsigned kVerifyGuard = 16;

/// Relative tolerance for merging float subset sums into one atom.
inline constexpr double kMatchTolerance = 1e-9;
/// Slack allowed when comparing float concentrations against exact bounds.
inline constexpr double kFloatCompareTolerance = 1e-9;

/// Nonzero exact coefficients a_1..a_n.
class ExactCoefficients {
 public:
  explicit ExactCoefficients(std::vector<Rational> values);
  std::size_t size() const { return values_.size(); }
  std::span<const Rational> values() const { return values_; }
  const Rational& operator[](std::size_t i) const { return values_[i]; }

 private:
  std::vector<Rational> values_;
};

/// Nonzero float coefficients a_1..a_n.
class RealCoefficients {
 public:
  explicit RealCoefficients(std::vector<double> values);
  std::size_t size() const { return values_.size(); }
  std::span<const double> values() const { return values_; }
  const double& operator[](std::size_t i) const { return values_[i]; }

 private:
  std::vector<double> values_;
};

/// p-independent summary of the 2^n subset sums: for each distinct sum,
/// how many subsets of each size reach it. Values ascend.
template <class Value>
struct SubsetSumTable {
  unsigned n = 0;
  std::vector<Value> values;
  std::vector<std::vector<std::uint64_t>> counts;  // counts[atom][subset size]
};

SubsetSumTable<Rational> subset_sums(const ExactCoefficients& coeffs);
SubsetSumTable<double> subset_sums(const RealCoefficients& coeffs, double match_tolerance = kMatchTolerance);

template <class Value, class Mass>
struct Atom {
  Value x;
  Mass mass;
};

using ExactAtomDist = std::vector<Atom<Rational, Rational>>;
using RealAtomDist = std::vector<Atom<double, double>>;

ExactAtomDist atoms(const ExactCoefficients& coeffs, const Rational& p);
RealAtomDist atoms(const RealCoefficients& coeffs, double p);

Rational point_prob(const ExactCoefficients& coeffs, const Rational& p, const Rational& x);
double point_prob(const RealCoefficients& coeffs, double p, double x);

template <class Value, class Mass>
struct Concentration {
  Value x;
  Mass prob;
};

/// Heaviest atom; ties go to smaller |x|, then smaller x.
Concentration<Rational, Rational> concentration(const ExactCoefficients& coeffs, const Rational& p);
Concentration<Rational, Rational> concentration(const SubsetSumTable<Rational>& table, const Rational& p);
Concentration<double, double> concentration(const RealCoefficients& coeffs, double p);

/// Every integer vector with entries in [-max_abs, max_abs] \ {0}, one per
/// class under permutation, negation and common-factor scaling.
struct GridStrategy {
  int max_abs = 3;
};

/// i.i.d. uniform coefficients on [lo, hi], rejecting |a| < min_abs.
struct RandomStrategy {
  std::size_t count = 10000;
  double lo = -2.0;
  double hi = 2.0;
  double min_abs = 0.05;
  std::uint64_t seed = 1;
};

/// Perturbs each coordinate of every +-1 vector by `steps` random offsets in
/// [-radius, radius] and checks no perturbation raises the concentration.
struct HillClimbStrategy {
  double radius = 0.5;
  std::size_t steps = 20;
  std::uint64_t seed = 1;
};

using Strategy = std::variant<GridStrategy, RandomStrategy, HillClimbStrategy>;

struct VerificationReport {
  unsigned n = 0;
  Rational p;
  std::string strategy;
  std::string backend;  // "rational" or "float"
  std::size_t samples_tested = 0;
  std::string max_observed;  // exact fraction or decimal, per backend
  double max_observed_value = 0.0;
  Rational bound;
  std::vector<std::string> worst_case;
  std::size_t violations = 0;
  bool pass = false;
};

/// Searches for coefficient vectors whose concentration exceeds the best
/// +-1 split. Counterexamples are reported, not thrown.
VerificationReport verify_theorem1(unsigned n, const Rational& p, const Strategy& strategy);

/// Pr(a uniformly random k-subset of A sums to r); A holds positive values
/// (a multiset, subsets taken by position).
Rational alpha_from_multiset(std::span<const Rational> multiset, unsigned k, const Rational& r);

}  // namespace elo::oracle
