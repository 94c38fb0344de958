#include "elo/exact_dist.hpp"
#include "elo/oracle.hpp"
#include "elo/pure_decomp.hpp"

#include <doctest.h>

#include <cmath>
#include <random>
#include <stdexcept>
#include <vector>

using elo::Rational;
namespace oracle = elo::oracle;

namespace {

oracle::ExactCoefficients ints(std::initializer_list<long> values) {
  std::vector<Rational> v;
  for (long x : values) v.emplace_back(x);
  return oracle::ExactCoefficients(std::move(v));
}

}  // namespace

TEST_CASE("point_prob examples") {
  CHECK(oracle::point_prob(ints({1, 1}), Rational(1, 2), Rational(1)) == Rational(1, 2));
  CHECK(oracle::point_prob(ints({1, -1}), Rational(1, 3), Rational(0)) == Rational(5, 9));
  CHECK(oracle::point_prob(ints({1, 2, -3}), Rational(1, 2), Rational(0)) == Rational(1, 4));
  CHECK(oracle::point_prob(ints({1, 2, -3}), Rational(1, 2), Rational(7)) == 0);
  CHECK(oracle::point_prob(oracle::RealCoefficients({1.0, -1.0}), 1.0 / 3, 0.0) == doctest::Approx(5.0 / 9));
}

TEST_CASE("coefficient validation and guard") {
  CHECK_THROWS_AS(ints({1, 0, 2}), std::invalid_argument);
  CHECK_THROWS_AS(oracle::ExactCoefficients({}), std::invalid_argument);
  CHECK_THROWS_AS(oracle::RealCoefficients({0.5, 0.0}), std::invalid_argument);
  std::vector<Rational> big(oracle::kPointQueryGuard + 1, Rational(1));
  CHECK_THROWS_AS(oracle::point_prob(oracle::ExactCoefficients(big), Rational(1, 2), Rational(0)),
                  std::invalid_argument);
  CHECK_THROWS_AS(oracle::verify_theorem1(oracle::kVerifyGuard + 1, Rational(1, 2), oracle::GridStrategy{1}),
                  std::invalid_argument);
}

TEST_CASE("concentration examples") {
  const auto c = oracle::concentration(ints({1, 1, 1}), Rational(1, 2));
  CHECK(c.x == 1);
  CHECK(c.prob == Rational(3, 8));
  const auto d = oracle::concentration(ints({1, -1}), Rational(1, 3));
  CHECK(d.x == 0);
  CHECK(d.prob == Rational(5, 9));
}

TEST_CASE("atoms sum to one") {
  const auto exact = oracle::atoms(ints({3, -1, 2, 2, -5}), Rational(2, 7));
  Rational total = 0;
  for (const auto& a : exact) total += a.mass;
  CHECK(total == 1);

  const auto floats = oracle::atoms(oracle::RealCoefficients({0.3, -1.7, 2.2, 0.9}), 0.4);
  double ftotal = 0;
  for (const auto& a : floats) ftotal += a.mass;
  CHECK(std::abs(ftotal - 1) < 1e-12);
  CHECK(floats.size() == 16);
}

TEST_CASE("+-1 vectors agree with the exact binomial difference") {
  for (const auto& p : {Rational(1, 4), Rational(1, 3), Rational(1, 2), Rational(3, 5)})
    for (unsigned n = 1; n <= 10; ++n)
      for (unsigned ell = 0; ell <= n; ++ell) {
        std::vector<Rational> v(n, Rational(1));
        for (unsigned i = ell; i < n; ++i) v[i] = -1;
        const auto c = oracle::concentration(oracle::ExactCoefficients(v), p);
        REQUIRE(c.prob == elo::build_dist(ell, n - ell, p).max_mass());
      }
}

TEST_CASE("scaling invariance") {
  const auto base = ints({1, 2, -3, 1});
  std::vector<Rational> scaled;
  for (const auto& a : base.values()) scaled.push_back(a * Rational(-5, 3));
  for (const auto& p : {Rational(1, 3), Rational(1, 2)}) {
    const auto c1 = oracle::concentration(base, p);
    const auto c2 = oracle::concentration(oracle::ExactCoefficients(scaled), p);
    CHECK(c1.prob == c2.prob);
    CHECK(oracle::point_prob(oracle::ExactCoefficients(scaled), p, c1.x * Rational(-5, 3)) == c1.prob);
  }
}

TEST_CASE("subset sum table is p-independent") {
  const auto coeffs = ints({1, 2, -3, 1, 4});
  const auto table = oracle::subset_sums(coeffs);
  std::uint64_t total = 0;
  for (const auto& row : table.counts)
    for (auto c : row) total += c;
  CHECK(total == 32);
  for (const auto& p : {Rational(1, 5), Rational(2, 3)}) {
    const auto a = oracle::concentration(table, p);
    const auto b = oracle::concentration(coeffs, p);
    CHECK(a.x == b.x);
    CHECK(a.prob == b.prob);
  }
}

TEST_CASE("float grouping keeps well-separated atoms apart") {
  const auto floats = oracle::atoms(oracle::RealCoefficients({1.0, 1.0 + 1e-6}), 0.5);
  CHECK(floats.size() == 4);
  const auto merged = oracle::atoms(oracle::RealCoefficients({0.1 + 0.2, 0.3}), 0.5);
  CHECK(merged.size() == 3);
}

TEST_CASE("verify_theorem1 grid n = 6, p = 1/2") {
  const auto report = oracle::verify_theorem1(6, Rational(1, 2), oracle::GridStrategy{3});
  CHECK(report.pass);
  CHECK(report.violations == 0);
  CHECK(report.bound == Rational(5, 16));
  CHECK(report.backend == "rational");
  CHECK(report.samples_tested > 0);
  CHECK(elo::parse_rational(report.max_observed) == report.bound);
}

TEST_CASE("verify_theorem1 n = 1") {
  for (const auto& p : {Rational(1, 4), Rational(2, 3)}) {
    const auto grid = oracle::verify_theorem1(1, p, oracle::GridStrategy{3});
    CHECK(grid.pass);
    CHECK(grid.bound == std::max(p, Rational(Rational(1) - p)));
    oracle::RandomStrategy random;
    random.count = 50;
    CHECK(oracle::verify_theorem1(1, p, random).pass);
    CHECK(oracle::verify_theorem1(1, p, oracle::HillClimbStrategy{}).pass);
  }
}

TEST_CASE("verify_theorem1 random and hill-climb, n = 7, p = 1/3") {
  oracle::RandomStrategy random;
  random.count = 2000;
  random.seed = 7;
  const auto r = oracle::verify_theorem1(7, Rational(1, 3), random);
  CHECK(r.pass);
  CHECK(r.samples_tested == 2000);
  CHECK(r.backend == "float");
  CHECK(r.max_observed_value <= r.bound.get_d() + oracle::kFloatCompareTolerance);

  oracle::HillClimbStrategy climb;
  climb.steps = 5;
  const auto h = oracle::verify_theorem1(7, Rational(1, 3), climb);
  CHECK(h.pass);
  CHECK(h.violations == 0);
}

TEST_CASE("random strategy is reproducible from its seed") {
  oracle::RandomStrategy random;
  random.count = 300;
  random.seed = 11;
  const auto a = oracle::verify_theorem1(5, Rational(1, 4), random);
  const auto b = oracle::verify_theorem1(5, Rational(1, 4), random);
  CHECK(a.max_observed == b.max_observed);
  CHECK(a.worst_case == b.worst_case);
}

TEST_CASE("alpha_from_multiset examples") {
  const std::vector<Rational> ones = {1, 1, 1};
  CHECK(oracle::alpha_from_multiset(ones, 2, Rational(2)) == 1);
  const std::vector<Rational> a12 = {1, 2};
  CHECK(oracle::alpha_from_multiset(a12, 1, Rational(1)) == Rational(1, 2));
  const std::vector<Rational> a123 = {1, 2, 3};
  CHECK(oracle::alpha_from_multiset(a123, 2, Rational(4)) == Rational(1, 3));
  CHECK(oracle::alpha_from_multiset(a123, 0, Rational(0)) == 1);
  CHECK_THROWS_AS(oracle::alpha_from_multiset(a123, 4, Rational(0)), std::invalid_argument);
}

TEST_CASE("multiset profiles satisfy the subset-profile properties") {
  std::mt19937_64 rng(3);
  std::uniform_int_distribution<int> size(1, 7), value(1, 9);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<Rational> a(static_cast<std::size_t>(size(rng)));
    for (auto& x : a) x = value(rng);
    const auto gamma = elo::pure::profile_from_multiset(a);
    REQUIRE(elo::pure::check_properties(gamma).all());
    for (unsigned k = 0; k <= a.size(); ++k)
      for (const auto& [r, w] : gamma.row(k)) REQUIRE(w == oracle::alpha_from_multiset(a, k, r));
  }
}
