#include "elo/oracle.hpp"

#include "elo/exact_dist.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>
#include <optional>
#include <random>
#include <sstream>
#include <stdexcept>

namespace elo::oracle {

namespace {

void require_guard(std::size_t n, unsigned guard) {
  if (n == 0) throw std::invalid_argument("coefficient vector must be non-empty");
  if (n > guard)
    throw std::invalid_argument("n = " + std::to_string(n) + " exceeds the enumeration guard " + std::to_string(guard));
}

// Subset sums of `a` indexed by bit mask.
template <class V>
std::vector<V> mask_sums(std::span<const V> a) {
  std::vector<V> sums(std::size_t{1} << a.size());
  sums[0] = V(0);
  for (std::size_t mask = 1; mask < sums.size(); ++mask) {
    const auto bit = static_cast<std::size_t>(std::countr_zero(mask));
    sums[mask] = sums[mask & (mask - 1)] + a[bit];
  }
  return sums;
}

// Calls fn(sum, subset_size) for all 2^n subsets. Each sum is one addition of
// two half-vector sums, so float rounding does not depend on visiting order.
template <class V, class Fn>
void for_each_subset(std::span<const V> a, Fn&& fn) {
  const std::size_t h = a.size() / 2;
  const auto low = mask_sums<V>(a.subspan(0, h));
  const auto high = mask_sums<V>(a.subspan(h));
  for (std::size_t hi = 0; hi < high.size(); ++hi) {
    const int hi_bits = std::popcount(hi);
    for (std::size_t lo = 0; lo < low.size(); ++lo) fn(low[lo] + high[hi], std::popcount(lo) + hi_bits);
  }
}

struct SumAndSize {
  std::int64_t sum;
  int size;
};

// Exact coefficients as integers over a common denominator, when everything
// fits in int64 with headroom.
struct ScaledIntegers {
  std::vector<std::int64_t> numerators;
  Integer denominator;
};

std::optional<ScaledIntegers> scale_to_integers(std::span<const Rational> a) {
  Integer lcm = 1;
  for (const auto& q : a) mpz_lcm(lcm.get_mpz_t(), lcm.get_mpz_t(), q.get_den_mpz_t());
  ScaledIntegers out;
  out.denominator = lcm;
  Integer total = 0;
  for (const auto& q : a) {
    Integer v = q.get_num() * (lcm / q.get_den());
    total += abs(v);
    if (!v.fits_slong_p()) return std::nullopt;
    out.numerators.push_back(v.get_si());
  }
  if (total >= Integer(1) << 62) return std::nullopt;
  return out;
}

template <class V, class Eq>
SubsetSumTable<V> group_pairs(unsigned n, std::vector<std::pair<V, int>>& pairs, Eq same_atom) {
  std::sort(pairs.begin(), pairs.end(), [](const auto& a, const auto& b) {
    return a.first < b.first || (a.first == b.first && a.second < b.second);
  });
  SubsetSumTable<V> table;
  table.n = n;
  for (std::size_t i = 0; i < pairs.size();) {
    const V anchor = pairs[i].first;
    std::vector<std::uint64_t> counts(n + 1, 0);
    std::size_t j = i;
    while (j < pairs.size() && same_atom(anchor, pairs[j].first)) {
      ++counts[static_cast<std::size_t>(pairs[j].second)];
      ++j;
    }
    table.values.push_back(anchor);
    table.counts.push_back(std::move(counts));
    i = j;
  }
  return table;
}

// s^n Pr(|S| = k) weights r^k c^(n-k), p = r/s.
std::vector<Integer> scaled_size_weights(unsigned n, const Rational& p) {
  const Integer r = p.get_num();
  const Integer c = p.get_den() - p.get_num();
  std::vector<Integer> w(n + 1);
  for (unsigned k = 0; k <= n; ++k) {
    Integer a, b;
    mpz_pow_ui(a.get_mpz_t(), r.get_mpz_t(), k);
    mpz_pow_ui(b.get_mpz_t(), c.get_mpz_t(), n - k);
    w[k] = a * b;
  }
  return w;
}

Rational scaled_to_rational(const Integer& scaled, const Rational& p, unsigned n) {
  Rational q;
  q.get_num() = scaled;
  mpz_pow_ui(q.get_den_mpz_t(), p.get_den_mpz_t(), n);
  q.canonicalize();
  return q;
}

bool prefer_location(const Rational& candidate, const Rational& incumbent) {
  const Rational ac = abs(candidate);
  const Rational ai = abs(incumbent);
  return ac < ai || (ac == ai && candidate < incumbent);
}

bool prefer_location(double candidate, double incumbent) {
  const double ac = std::fabs(candidate);
  const double ai = std::fabs(incumbent);
  return ac < ai || (ac == ai && candidate < incumbent);
}

std::vector<std::string> as_strings(std::span<const Rational> v) {
  std::vector<std::string> out;
  for (const auto& q : v) out.push_back(to_string(q));
  return out;
}

std::vector<std::string> as_strings(std::span<const double> v) {
  std::vector<std::string> out;
  for (double d : v) {
    std::ostringstream os;
    os.precision(17);
    os << d;
    out.push_back(os.str());
  }
  return out;
}

std::string decimal_text(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

// Canonical representatives of integer multisets over [-M, M] \ {0}.
void enumerate_grid(unsigned n, int max_abs, const std::function<void(const std::vector<int>&)>& visit) {
  std::vector<int> domain;
  for (int v = -max_abs; v <= max_abs; ++v)
    if (v != 0) domain.push_back(v);
  std::vector<std::size_t> idx(n, 0);
  std::vector<int> current(n);
  std::vector<int> negated(n);
  while (true) {
    for (unsigned i = 0; i < n; ++i) current[i] = domain[idx[i]];
    int g = 0;
    for (int v : current) g = std::gcd(g, std::abs(v));
    for (unsigned i = 0; i < n; ++i) negated[i] = -current[n - 1 - i];
    if (g == 1 && !std::lexicographical_compare(negated.begin(), negated.end(), current.begin(), current.end()))
      visit(current);
    // Next nondecreasing index sequence.
    int pos = static_cast<int>(n) - 1;
    while (pos >= 0 && idx[static_cast<std::size_t>(pos)] + 1 == domain.size()) --pos;
    if (pos < 0) break;
    const std::size_t next = idx[static_cast<std::size_t>(pos)] + 1;
    for (auto i = static_cast<std::size_t>(pos); i < n; ++i) idx[i] = next;
  }
}

}  // namespace

ExactCoefficients::ExactCoefficients(std::vector<Rational> values) : values_(std::move(values)) {
  if (values_.empty()) throw std::invalid_argument("coefficient vector must be non-empty");
  for (const auto& v : values_)
    if (v == 0) throw std::invalid_argument("coefficients must be nonzero");
}

RealCoefficients::RealCoefficients(std::vector<double> values) : values_(std::move(values)) {
  if (values_.empty()) throw std::invalid_argument("coefficient vector must be non-empty");
  for (double v : values_)
    if (v == 0.0 || !std::isfinite(v)) throw std::invalid_argument("coefficients must be finite and nonzero");
}

SubsetSumTable<Rational> subset_sums(const ExactCoefficients& coeffs) {
  require_guard(coeffs.size(), kPointQueryGuard);
  const auto n = static_cast<unsigned>(coeffs.size());
  if (auto scaled = scale_to_integers(coeffs.values())) {
    std::vector<std::pair<std::int64_t, int>> pairs;
    pairs.reserve(std::size_t{1} << n);
    for_each_subset<std::int64_t>(scaled->numerators, [&](std::int64_t s, int k) { pairs.emplace_back(s, k); });
    auto ints = group_pairs<std::int64_t>(n, pairs, [](std::int64_t a, std::int64_t b) { return a == b; });
    SubsetSumTable<Rational> table;
    table.n = n;
    table.counts = std::move(ints.counts);
    for (auto v : ints.values) {
      Rational q(Integer(static_cast<long>(v)), scaled->denominator);
      q.canonicalize();
      table.values.push_back(q);
    }
    return table;
  }
  std::vector<std::pair<Rational, int>> pairs;
  pairs.reserve(std::size_t{1} << n);
  for_each_subset<Rational>(coeffs.values(), [&](const Rational& s, int k) { pairs.emplace_back(s, k); });
  return group_pairs<Rational>(n, pairs, [](const Rational& a, const Rational& b) { return a == b; });
}

SubsetSumTable<double> subset_sums(const RealCoefficients& coeffs, double match_tolerance) {
  require_guard(coeffs.size(), kPointQueryGuard);
  const auto n = static_cast<unsigned>(coeffs.size());
  std::vector<std::pair<double, int>> pairs;
  pairs.reserve(std::size_t{1} << n);
  for_each_subset<double>(coeffs.values(), [&](double s, int k) { pairs.emplace_back(s, k); });
  return group_pairs<double>(n, pairs, [match_tolerance](double anchor, double v) {
    return std::fabs(v - anchor) <= match_tolerance * std::max({1.0, std::fabs(anchor), std::fabs(v)});
  });
}

ExactAtomDist atoms(const ExactCoefficients& coeffs, const Rational& p) {
  require_probability(p);
  const auto table = subset_sums(coeffs);
  const auto w = scaled_size_weights(table.n, p);
  ExactAtomDist out;
  for (std::size_t a = 0; a < table.values.size(); ++a) {
    Integer scaled = 0;
    for (unsigned k = 0; k <= table.n; ++k)
      if (table.counts[a][k] != 0) scaled += w[k] * Integer(static_cast<unsigned long>(table.counts[a][k]));
    if (scaled != 0) out.push_back({table.values[a], scaled_to_rational(scaled, p, table.n)});
  }
  return out;
}

RealAtomDist atoms(const RealCoefficients& coeffs, double p) {
  if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("p must lie in [0, 1]");
  const auto table = subset_sums(coeffs);
  RealAtomDist out;
  for (std::size_t a = 0; a < table.values.size(); ++a) {
    double mass = 0.0;
    for (unsigned k = 0; k <= table.n; ++k)
      if (table.counts[a][k] != 0)
        mass += static_cast<double>(table.counts[a][k]) * std::pow(p, k) * std::pow(1.0 - p, table.n - k);
    if (mass > 0.0) out.push_back({table.values[a], mass});
  }
  return out;
}

Rational point_prob(const ExactCoefficients& coeffs, const Rational& p, const Rational& x) {
  require_probability(p);
  const auto table = subset_sums(coeffs);
  auto it = std::lower_bound(table.values.begin(), table.values.end(), x);
  if (it == table.values.end() || *it != x) return Rational(0);
  const auto& counts = table.counts[static_cast<std::size_t>(it - table.values.begin())];
  const auto w = scaled_size_weights(table.n, p);
  Integer scaled = 0;
  for (unsigned k = 0; k <= table.n; ++k) scaled += w[k] * Integer(static_cast<unsigned long>(counts[k]));
  return scaled_to_rational(scaled, p, table.n);
}

double point_prob(const RealCoefficients& coeffs, double p, double x) {
  require_guard(coeffs.size(), kPointQueryGuard);
  if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("p must lie in [0, 1]");
  const auto n = static_cast<unsigned>(coeffs.size());
  std::vector<std::uint64_t> counts(n + 1, 0);
  const double tol = kMatchTolerance * std::max(1.0, std::fabs(x));
  for_each_subset<double>(coeffs.values(), [&](double s, int k) {
    if (std::fabs(s - x) <= tol) ++counts[static_cast<std::size_t>(k)];
  });
  double mass = 0.0;
  for (unsigned k = 0; k <= n; ++k)
    if (counts[k] != 0) mass += static_cast<double>(counts[k]) * std::pow(p, k) * std::pow(1.0 - p, n - k);
  return mass;
}

Concentration<Rational, Rational> concentration(const SubsetSumTable<Rational>& table, const Rational& p) {
  require_probability(p);
  const auto w = scaled_size_weights(table.n, p);
  Integer best = -1;
  std::size_t best_atom = 0;
  Integer scaled;
  for (std::size_t a = 0; a < table.values.size(); ++a) {
    scaled = 0;
    for (unsigned k = 0; k <= table.n; ++k)
      if (table.counts[a][k] != 0) scaled += w[k] * Integer(static_cast<unsigned long>(table.counts[a][k]));
    if (scaled > best || (scaled == best && prefer_location(table.values[a], table.values[best_atom]))) {
      best = scaled;
      best_atom = a;
    }
  }
  return {table.values[best_atom], scaled_to_rational(best, p, table.n)};
}

Concentration<Rational, Rational> concentration(const ExactCoefficients& coeffs, const Rational& p) {
  return concentration(subset_sums(coeffs), p);
}

Concentration<double, double> concentration(const RealCoefficients& coeffs, double p) {
  const auto dist = atoms(coeffs, p);
  Concentration<double, double> best{dist.front().x, dist.front().mass};
  for (const auto& atom : dist)
    if (atom.mass > best.prob || (atom.mass == best.prob && prefer_location(atom.x, best.x))) best = {atom.x, atom.mass};
  return best;
}

VerificationReport verify_theorem1(unsigned n, const Rational& p, const Strategy& strategy) {
  require_guard(n, kVerifyGuard);
  require_probability(p);

  VerificationReport report;
  report.n = n;
  report.p = p;
  report.bound = concentration_bound(n, p).prob;
  const double bound_value = report.bound.get_d();
  const double pf = p.get_d();

  if (const auto* grid = std::get_if<GridStrategy>(&strategy)) {
    if (grid->max_abs < 1) throw std::invalid_argument("grid max_abs must be at least 1");
    report.strategy = "grid";
    report.backend = "rational";
    Rational worst = -1;
    enumerate_grid(n, grid->max_abs, [&](const std::vector<int>& ints) {
      std::vector<Rational> v(ints.begin(), ints.end());
      const auto conc = concentration(ExactCoefficients(v), p);
      ++report.samples_tested;
      if (conc.prob > report.bound) ++report.violations;
      if (conc.prob > worst) {
        worst = conc.prob;
        report.worst_case = as_strings(v);
      }
    });
    report.max_observed = to_string(worst);
    report.max_observed_value = worst.get_d();
  } else if (const auto* random = std::get_if<RandomStrategy>(&strategy)) {
    if (!(random->lo < random->hi) || random->min_abs < 0 ||
        std::max(std::fabs(random->lo), std::fabs(random->hi)) <= random->min_abs)
      throw std::invalid_argument("random strategy range admits no coefficients");
    report.strategy = "random";
    report.backend = "float";
    std::mt19937_64 rng(random->seed);
    std::uniform_real_distribution<double> dist(random->lo, random->hi);
    double worst = -1.0;
    std::vector<double> v(n);
    for (std::size_t s = 0; s < random->count; ++s) {
      for (auto& a : v) {
        do {
          a = dist(rng);
        } while (std::fabs(a) < random->min_abs || a == 0.0);
      }
      const auto conc = concentration(RealCoefficients(v), pf);
      ++report.samples_tested;
      if (conc.prob > bound_value + kFloatCompareTolerance) ++report.violations;
      if (conc.prob > worst) {
        worst = conc.prob;
        report.worst_case = as_strings(v);
      }
    }
    report.max_observed = decimal_text(worst);
    report.max_observed_value = worst;
  } else {
    const auto& climb = std::get<HillClimbStrategy>(strategy);
    if (!(climb.radius > 0)) throw std::invalid_argument("hill-climb radius must be positive");
    report.strategy = "hill-climb";
    report.backend = "float";
    std::mt19937_64 rng(climb.seed);
    std::uniform_real_distribution<double> dist(-climb.radius, climb.radius);
    double worst = -1.0;
    for (unsigned ell = 0; ell <= n; ++ell) {
      std::vector<double> base(n, -1.0);
      std::fill(base.begin(), base.begin() + ell, 1.0);
      const double base_conc = concentration(RealCoefficients(base), pf).prob;
      if (base_conc > worst) {
        worst = base_conc;
        report.worst_case = as_strings(base);
      }
      for (unsigned i = 0; i < n; ++i) {
        for (std::size_t step = 0; step < climb.steps; ++step) {
          std::vector<double> v = base;
          do {
            v[i] = base[i] + dist(rng);
          } while (std::fabs(v[i]) < 1e-6);
          const double conc = concentration(RealCoefficients(v), pf).prob;
          ++report.samples_tested;
          if (conc > base_conc + kFloatCompareTolerance || conc > bound_value + kFloatCompareTolerance)
            ++report.violations;
          if (conc > worst) {
            worst = conc;
            report.worst_case = as_strings(v);
          }
        }
      }
    }
    report.max_observed = decimal_text(worst);
    report.max_observed_value = worst;
  }
  report.pass = report.violations == 0;
  return report;
}

Rational alpha_from_multiset(std::span<const Rational> multiset, unsigned k, const Rational& r) {
  if (k > multiset.size()) throw std::invalid_argument("k exceeds the multiset size");
  for (const auto& a : multiset)
    if (a <= 0) throw std::invalid_argument("multiset entries must be positive");
  if (multiset.empty()) return r == 0 ? Rational(1) : Rational(0);
  const auto table = subset_sums(ExactCoefficients(std::vector<Rational>(multiset.begin(), multiset.end())));
  auto it = std::lower_bound(table.values.begin(), table.values.end(), r);
  if (it == table.values.end() || *it != r) return Rational(0);
  const auto count = table.counts[static_cast<std::size_t>(it - table.values.begin())][k];
  Rational q(Integer(static_cast<unsigned long>(count)), binomial(multiset.size(), k));
  q.canonicalize();
  return q;
}

}  // namespace elo::oracle
