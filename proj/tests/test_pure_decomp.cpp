#include "elo/exact_dist.hpp"
#include "elo/oracle.hpp"
#include "elo/pure_decomp.hpp"

#include <doctest.h>

#include <algorithm>
#include <random>
#include <set>
#include <stdexcept>
#include <vector>

using elo::Rational;
namespace pure = elo::pure;

namespace {

pure::SubsetProfile multiset_profile(std::initializer_list<long> values) {
  std::vector<Rational> a;
  for (long v : values) a.emplace_back(v);
  return pure::profile_from_multiset(a);
}

pure::PureProfile chain(std::initializer_list<long> values) {
  std::vector<Rational> pts;
  for (long v : values) pts.emplace_back(v);
  return pure::PureProfile(pts);
}

// Random convex combination of random pure chains.
pure::SubsetProfile random_mixture(std::mt19937_64& rng, unsigned i, unsigned terms) {
  pure::SubsetProfile gamma(i);
  std::uniform_int_distribution<int> gap(1, 3), w(1, 9);
  std::vector<Rational> weights;
  Rational total = 0;
  for (unsigned t = 0; t < terms; ++t) {
    weights.emplace_back(w(rng));
    total += weights.back();
  }
  for (unsigned t = 0; t < terms; ++t) {
    std::vector<Rational> pts;
    long r = std::uniform_int_distribution<int>(-3, 3)(rng);
    for (unsigned k = 0; k <= i; ++k) {
      pts.emplace_back(r);
      r += gap(rng);
    }
    const auto zeta = pure::PureProfile(pts).to_profile();
    for (unsigned k = 0; k <= i; ++k)
      for (const auto& [pt, one] : zeta.row(k)) gamma.add(k, pt, one * weights[t] / total);
  }
  return gamma;
}

}  // namespace

TEST_CASE("check_properties examples") {
  CHECK(pure::check_properties(multiset_profile({1, 2, 3})).all());

  pure::SubsetProfile bad(1);
  bad.set(1, Rational(1, 2), 1);
  bad.set(0, Rational(1), 1);
  const auto report = pure::check_properties(bad);
  CHECK(report.nonnegative);
  CHECK(report.rows_normalized);
  CHECK_FALSE(report.chain_condition);
  REQUIRE(report.violation);
  CHECK(report.violation->k == 0);
  CHECK(report.violation->value == 2);

  CHECK(pure::check_properties(chain({-2, 0, 5, 6}).to_profile()).all());
}

TEST_CASE("check_properties flags negative and unnormalized rows") {
  pure::SubsetProfile g(0);
  g.set(0, Rational(0), Rational(3, 2));
  g.set(0, Rational(1), Rational(-1, 2));
  const auto report = pure::check_properties(g);
  CHECK_FALSE(report.nonnegative);
  CHECK(report.rows_normalized);

  pure::SubsetProfile h(0);
  h.set(0, Rational(0), Rational(1, 2));
  CHECK_FALSE(pure::check_properties(h).rows_normalized);
}

TEST_CASE("PureProfile requires strictly increasing points") {
  CHECK_THROWS_AS(chain({0, 0}), std::invalid_argument);
  CHECK_THROWS_AS(chain({2, 1}), std::invalid_argument);
  CHECK_THROWS_AS(pure::PureProfile({}), std::invalid_argument);
}

TEST_CASE("decompose examples") {
  const auto zeta = chain({0, 3, 7});
  const auto single = pure::decompose(zeta.to_profile());
  REQUIRE(single.terms.size() == 1);
  CHECK(single.terms[0].weight == 1);
  CHECK(single.terms[0].profile == zeta);

  pure::SubsetProfile half(1);
  half.set(0, Rational(0), 1);
  half.set(1, Rational(1), Rational(1, 2));
  half.set(1, Rational(2), Rational(1, 2));
  const auto two = pure::decompose(half);
  REQUIRE(two.terms.size() == 2);
  CHECK(two.terms[0].weight == Rational(1, 2));
  CHECK(two.terms[1].weight == Rational(1, 2));
  CHECK(two.terms[0].profile == chain({0, 1}));
  CHECK(two.terms[1].profile == chain({0, 2}));

  const auto gamma = multiset_profile({1, 2, 4});
  CHECK(gamma.max_index() == 3);
  const auto dec = pure::decompose(gamma);
  CHECK(dec.recombine() == gamma);
  CHECK(dec.total_weight() == 1);
  CHECK(dec.terms.size() <= gamma.support_size() - 3);
}

TEST_CASE("decompose rejects invalid input") {
  pure::SubsetProfile bad(1);
  bad.set(1, Rational(1, 2), 1);
  bad.set(0, Rational(1), 1);
  CHECK_THROWS_AS(pure::decompose(bad), std::invalid_argument);
}

TEST_CASE("decompose round trip on multisets and mixtures") {
  std::mt19937_64 rng(20);
  std::uniform_int_distribution<int> size(1, 8), value(1, 20), terms(1, 5);
  for (int trial = 0; trial < 150; ++trial) {
    pure::SubsetProfile gamma(0);
    if (trial % 2 == 0) {
      std::vector<Rational> a(static_cast<std::size_t>(size(rng)));
      for (auto& x : a) x = value(rng);
      gamma = pure::profile_from_multiset(a);
    } else {
      gamma = random_mixture(rng, static_cast<unsigned>(size(rng)) - 1, static_cast<unsigned>(terms(rng)));
    }
    REQUIRE(pure::check_properties(gamma).all());
    std::size_t last_support = gamma.support_size() + 1;
    bool shrinking = true, valid = true;
    const auto dec = pure::decompose(gamma, [&](const pure::SubsetProfile& rest) {
      valid = valid && pure::check_properties(rest).all();
      shrinking = shrinking && rest.support_size() < last_support;
      last_support = rest.support_size();
    });
    REQUIRE(valid);
    REQUIRE(shrinking);
    REQUIRE(dec.recombine() == gamma);
    REQUIRE(dec.total_weight() == 1);
    REQUIRE(dec.terms.size() <= gamma.support_size() - gamma.max_index());
    for (const auto& t : dec.terms) REQUIRE(t.weight > 0);
  }
}

TEST_CASE("bilinear_B equals the point probability of the coefficient vector") {
  const std::vector<Rational> a = {1, 2, 2, 5};
  const std::vector<Rational> b = {1, 3, 4};
  std::vector<Rational> coeffs(a);
  for (const auto& v : b) coeffs.push_back(-v);
  const elo::oracle::ExactCoefficients vec(coeffs);
  const auto alpha = pure::profile_from_multiset(a);
  const auto beta = pure::profile_from_multiset(b);
  for (const auto& p : {Rational(1, 3), Rational(1, 2)})
    for (long x = -8; x <= 10; ++x)
      REQUIRE(pure::bilinear_B(alpha, beta, p, Rational(x)) == elo::oracle::point_prob(vec, p, Rational(x)));
}

TEST_CASE("bilinear_B on diagonal pure profiles and bilinearity") {
  const Rational p(2, 5);
  const auto alpha = chain({0, 1, 2, 3}).to_profile();
  const auto beta = chain({0, 1, 2}).to_profile();
  CHECK(pure::bilinear_B(alpha, beta, p, Rational(0)) == elo::bin_diff_pmf(3, 2, p, 0));

  const auto a1 = chain({0, 2, 3, 9}).to_profile();
  const auto a2 = chain({-1, 1, 2, 4}).to_profile();
  pure::SubsetProfile mix(3);
  for (unsigned k = 0; k <= 3; ++k) {
    for (const auto& [r, w] : a1.row(k)) mix.add(k, r, w / 2);
    for (const auto& [r, w] : a2.row(k)) mix.add(k, r, w / 2);
  }
  for (long x = -3; x <= 3; ++x) {
    const Rational lhs = pure::bilinear_B(mix, beta, p, Rational(x));
    const Rational rhs = (pure::bilinear_B(a1, beta, p, Rational(x)) + pure::bilinear_B(a2, beta, p, Rational(x))) / 2;
    REQUIRE(lhs == rhs);
  }
  CHECK_THROWS_AS(pure::bilinear_B(alpha, beta, Rational(3, 2), Rational(0)), std::invalid_argument);
}

TEST_CASE("bilinear expansion over decompositions") {
  const auto alpha = multiset_profile({1, 3, 4});
  const auto beta = multiset_profile({2, 2, 5});
  const auto da = pure::decompose(alpha);
  const auto db = pure::decompose(beta);
  const Rational p(1, 3);
  for (long x = -4; x <= 5; ++x) {
    Rational sum = 0;
    for (const auto& ta : da.terms)
      for (const auto& tb : db.terms) sum += ta.weight * tb.weight * pure::pure_value(ta.profile, tb.profile, p, Rational(x));
    REQUIRE(sum == pure::bilinear_B(alpha, beta, p, Rational(x)));
  }
}

TEST_CASE("pure_value examples") {
  const Rational p(1, 3);
  CHECK(pure::pure_value(chain({0, 1}), chain({10, 11}), p, Rational(0)) == 0);
  CHECK(pure::pure_value(chain({0, 1, 2}), chain({0, 1, 2}), p, Rational(0)) == elo::bin_diff_pmf(2, 2, p, 0));
  // r_{j+d} = s_j + x for every valid j.
  for (long d = -2; d <= 3; ++d) {
    const Rational x(1, 2);
    const auto alpha = chain({0, 1, 2, 3});
    std::vector<Rational> s;
    for (long j = 0; j <= 2; ++j) s.push_back(Rational(j + d) - x);
    REQUIRE(pure::pure_value(alpha, pure::PureProfile(s), p, x) == elo::bin_diff_pmf(3, 2, p, d));
  }
  for (int trial = 0; trial < 5; ++trial) {
    const auto a = chain({0, 2, 5});
    const auto b = chain({-1, 0, 4, 7});
    CHECK(pure::pure_value(a, b, p, Rational(trial)) ==
          pure::bilinear_B(a.to_profile(), b.to_profile(), p, Rational(trial)));
  }
}

TEST_CASE("max_over_pure examples") {
  const auto a = pure::max_over_pure(1, 1, Rational(1, 3), Rational(0), 4);
  CHECK(a.best_value == Rational(5, 9));
  CHECK(a.equals_binomial_max);
  CHECK(a.attained_by_offset);

  const auto b = pure::max_over_pure(2, 1, Rational(1, 2), Rational(0), 5);
  CHECK(b.best_value == Rational(3, 8));
  CHECK(b.binomial_max == Rational(3, 8));

  const auto c = pure::max_over_pure(0, 0, Rational(1, 4), Rational(0), 1);
  CHECK(c.best_value == 1);
  CHECK(c.configurations >= 1);
}

TEST_CASE("max_over_pure best configuration reproduces its value") {
  for (const auto& p : {Rational(1, 4), Rational(1, 2)})
    for (unsigned ell = 0; ell <= 3; ++ell)
      for (unsigned m = 0; ell + m <= 4; ++m) {
        const auto res = pure::max_over_pure(ell, m, p, Rational(1), ell + m + 2);
        REQUIRE(pure::pure_value(res.best_alpha, res.best_beta, p, Rational(1)) == res.best_value);
        REQUIRE(res.equals_binomial_max);
        REQUIRE(res.attained_by_offset);
      }
}

TEST_CASE("max_over_pure guards") {
  CHECK_THROWS_AS(pure::max_over_pure(5, 4, Rational(1, 2), Rational(0), 12), std::invalid_argument);
  CHECK_THROWS_AS(pure::max_over_pure(1, 1, Rational(1, 2), Rational(0), 13), std::invalid_argument);
  CHECK_THROWS_AS(pure::max_over_pure(2, 2, Rational(1, 2), Rational(0), 4), std::invalid_argument);
}

TEST_CASE("pipeline check on small coefficient vectors") {
  std::mt19937_64 rng(5);
  std::uniform_int_distribution<int> value(1, 4), sign(0, 1), size(1, 8);
  for (int trial = 0; trial < 60; ++trial) {
    std::vector<Rational> coeffs(static_cast<std::size_t>(size(rng)));
    for (auto& c : coeffs) c = sign(rng) ? value(rng) : -value(rng);
    const elo::oracle::ExactCoefficients vec(coeffs);
    for (const auto& p : {Rational(1, 3), Rational(1, 2)}) {
      const auto x = elo::oracle::concentration(vec, p).x;
      const auto report = pure::pipeline_check(vec, p, x);
      REQUIRE(report.holds);
      REQUIRE(report.point_prob == report.bilinear);
      REQUIRE(report.bilinear == report.decomposition_sum);
      REQUIRE(report.point_prob <= report.pure_bound);
      REQUIRE(report.pure_bound <= report.binomial_bound);
    }
  }
}

TEST_CASE("profile JSON round trip") {
  const auto gamma = multiset_profile({1, 2, 2, 7});
  const std::string text = pure::profile_to_json(gamma);
  CHECK(pure::profile_from_json(text) == gamma);

  pure::SubsetProfile g(1);
  g.set(0, Rational(-1, 3), 1);
  g.set(1, Rational(5, 2), Rational(1, 7));
  g.set(1, Rational(11, 2), Rational(6, 7));
  CHECK(pure::profile_from_json(pure::profile_to_json(g)) == g);
  CHECK(pure::profile_from_json(R"({"i": 0, "entries": [[0, 3, 1, 1, 1]]})").at(0, Rational(3)) == 1);
  CHECK_THROWS(pure::profile_from_json(R"({"i": 0, "entries": [[1, 3, 1, 1, 1]]})"));
  CHECK_THROWS(pure::profile_from_json("not json"));
}
