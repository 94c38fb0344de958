#include "elo/pure_decomp.hpp"

#include "elo/exact_dist.hpp"

#include <json.hpp>

#include <algorithm>
#include <stdexcept>

namespace elo::pure {

namespace {

std::vector<Rational> binomial_weights(unsigned n, const Rational& p) {
  std::vector<Rational> w(n + 1);
  for (unsigned k = 0; k <= n; ++k) w[k] = binom_pmf(n, static_cast<long>(k), p);
  return w;
}

// Pr(Y = r) = sum_k f(k) gamma(k, r).
std::map<Rational, Rational> mix_rows(const SubsetProfile& gamma, const std::vector<Rational>& f) {
  std::map<Rational, Rational> out;
  for (unsigned k = 0; k <= gamma.max_index(); ++k) {
    if (f[k] == 0) continue;
    for (const auto& [r, w] : gamma.row(k)) out[r] += f[k] * w;
  }
  return out;
}

nlohmann::json integer_to_json(const Integer& v) {
  if (v.fits_slong_p()) return v.get_si();
  return v.get_str(10);
}

Integer integer_from_json(const nlohmann::json& j) {
  if (j.is_number_integer()) return Integer(j.get<long>());
  if (j.is_string()) return Integer(j.get<std::string>(), 10);
  throw std::invalid_argument("profile entry field must be an integer or a digit string");
}

Rational fraction_from_json(const nlohmann::json& num, const nlohmann::json& den) {
  Integer d = integer_from_json(den);
  if (d <= 0) throw std::invalid_argument("profile entry denominator must be positive");
  Rational q(integer_from_json(num), d);
  q.canonicalize();
  return q;
}

// Exact accumulator for the grid search: int64 when the scaled total fits.
template <class Acc>
struct PureSearch {
  unsigned ell;
  unsigned m;
  int grid;
  std::vector<std::vector<Acc>> product;  // s^(ell+m) f(k) g(j)

  Acc best{-1};
  std::vector<int> best_r;
  std::vector<int> best_s;
  std::size_t configurations = 0;

  Acc value(const std::vector<int>& r, const std::vector<int>& s) const {
    Acc total{0};
    std::size_t j = 0;
    for (std::size_t k = 0; k < r.size(); ++k) {
      while (j < s.size() && s[j] < r[k]) ++j;
      if (j == s.size()) break;
      if (s[j] == r[k]) total += product[k][j];
    }
    return total;
  }

  void run() {
    // r_0 = 0, r_1..r_ell from {1..G-1}; shifted s'_j = s_j + x from {-(G-1)..G-1}.
    std::vector<int> r(ell + 1, 0);
    std::vector<int> s(m + 1, 0);
    std::vector<int> r_pool;
    for (int v = 1; v < grid; ++v) r_pool.push_back(v);
    std::vector<int> s_pool;
    for (int v = -(grid - 1); v < grid; ++v) s_pool.push_back(v);

    std::vector<std::size_t> ri(ell);
    for (std::size_t a = 0; a < ell; ++a) ri[a] = a;
    while (true) {
      for (std::size_t a = 0; a < ell; ++a) r[a + 1] = r_pool[ri[a]];
      std::vector<std::size_t> si(m + 1);
      for (std::size_t b = 0; b <= m; ++b) si[b] = b;
      while (true) {
        for (std::size_t b = 0; b <= m; ++b) s[b] = s_pool[si[b]];
        ++configurations;
        const Acc v = value(r, s);
        if (v > best) {
          best = v;
          best_r = r;
          best_s = s;
        }
        if (!next_combination(si, s_pool.size())) break;
      }
      if (!next_combination(ri, r_pool.size())) break;
    }
  }

  static bool next_combination(std::vector<std::size_t>& idx, std::size_t pool) {
    const std::size_t k = idx.size();
    if (k == 0) return false;
    std::size_t i = k;
    while (i > 0 && idx[i - 1] == pool - k + (i - 1)) --i;
    if (i == 0) return false;
    ++idx[i - 1];
    for (std::size_t j = i; j < k; ++j) idx[j] = idx[j - 1] + 1;
    return true;
  }
};

template <class Acc>
PureSearch<Acc> run_search(unsigned ell, unsigned m, unsigned grid,
                           const std::vector<std::vector<Integer>>& scaled) {
  PureSearch<Acc> search;
  search.ell = ell;
  search.m = m;
  search.grid = static_cast<int>(grid);
  search.product.assign(ell + 1, std::vector<Acc>(m + 1));
  for (unsigned k = 0; k <= ell; ++k)
    for (unsigned j = 0; j <= m; ++j) {
      if constexpr (std::is_same_v<Acc, Integer>)
        search.product[k][j] = scaled[k][j];
      else
        search.product[k][j] = static_cast<Acc>(scaled[k][j].get_si());
    }
  search.run();
  return search;
}

}  // namespace

SubsetProfile::SubsetProfile(unsigned max_index) : rows_(max_index + 1) {}

void SubsetProfile::set(unsigned k, const Rational& r, const Rational& weight) {
  auto& row = rows_.at(k);
  if (weight == 0)
    row.erase(r);
  else
    row[r] = weight;
}

void SubsetProfile::add(unsigned k, const Rational& r, const Rational& weight) {
  auto& row = rows_.at(k);
  auto [it, inserted] = row.try_emplace(r, 0);
  it->second += weight;
  if (it->second == 0) row.erase(it);
}

Rational SubsetProfile::at(unsigned k, const Rational& r) const {
  const auto& row = rows_.at(k);
  auto it = row.find(r);
  return it == row.end() ? Rational(0) : it->second;
}

void SubsetProfile::scale(const Rational& factor) {
  if (factor == 0) throw std::invalid_argument("scale factor must be nonzero");
  for (auto& row : rows_)
    for (auto& [r, w] : row) w *= factor;
}

std::size_t SubsetProfile::support_size() const {
  std::size_t total = 0;
  for (const auto& row : rows_) total += row.size();
  return total;
}

PureProfile::PureProfile(std::vector<Rational> points) : points_(std::move(points)) {
  if (points_.empty()) throw std::invalid_argument("a pure profile needs at least one point");
  for (std::size_t k = 1; k < points_.size(); ++k)
    if (!(points_[k - 1] < points_[k])) throw std::invalid_argument("pure profile points must strictly increase");
}

SubsetProfile PureProfile::to_profile() const {
  SubsetProfile out(max_index());
  for (unsigned k = 0; k <= max_index(); ++k) out.set(k, points_[k], 1);
  return out;
}

Rational ConvexDecomposition::total_weight() const {
  Rational sum = 0;
  for (const auto& t : terms) sum += t.weight;
  return sum;
}

SubsetProfile ConvexDecomposition::recombine() const {
  SubsetProfile out(max_index);
  for (const auto& t : terms)
    for (unsigned k = 0; k <= max_index; ++k) out.add(k, t.profile.points()[k], t.weight);
  return out;
}

PropertyReport check_properties(const SubsetProfile& gamma) {
  PropertyReport report;
  const unsigned i = gamma.max_index();
  std::vector<Rational> totals(i + 1);
  for (unsigned k = 0; k <= i; ++k) {
    for (const auto& [r, w] : gamma.row(k)) {
      if (w < 0) report.nonnegative = false;
      totals[k] += w;
    }
    if (totals[k] != 1) report.rows_normalized = false;
  }

  auto flag = [&](unsigned k, std::optional<Rational> r, const Rational& value) {
    if (value > 1 && report.chain_condition) {
      report.chain_condition = false;
      report.violation = ChainViolation{k, std::move(r), value};
    }
  };

  for (unsigned k = 0; k < i; ++k) {
    const auto& lower = gamma.row(k);
    const auto& upper = gamma.row(k + 1);
    flag(k, std::nullopt, totals[k]);  // r = -inf
    std::vector<Rational> points;
    for (const auto& [r, w] : lower) points.push_back(r);
    for (const auto& [r, w] : upper) points.push_back(r);
    std::sort(points.begin(), points.end());
    points.erase(std::unique(points.begin(), points.end()), points.end());

    // upper partial sums are right-continuous, lower tail sums left-continuous.
    Rational upper_le = 0;
    Rational lower_lt = 0;
    auto up = upper.begin();
    auto lo = lower.begin();
    for (const auto& r : points) {
      while (up != upper.end() && up->first <= r) upper_le += (up++)->second;
      while (lo != lower.end() && lo->first < r) lower_lt += (lo++)->second;
      flag(k, r, upper_le + (totals[k] - lower_lt));
    }
    flag(k, std::nullopt, totals[k + 1]);  // r = +inf
  }
  return report;
}

SubsetProfile profile_from_multiset(std::span<const Rational> multiset) {
  const auto size = static_cast<unsigned>(multiset.size());
  SubsetProfile gamma(size);
  if (size == 0) {
    gamma.set(0, 0, 1);
    return gamma;
  }
  for (const auto& a : multiset)
    if (a <= 0) throw std::invalid_argument("multiset entries must be positive");
  const auto table = oracle::subset_sums(oracle::ExactCoefficients(std::vector<Rational>(multiset.begin(), multiset.end())));
  for (std::size_t a = 0; a < table.values.size(); ++a)
    for (unsigned k = 0; k <= size; ++k) {
      if (table.counts[a][k] == 0) continue;
      Rational w(Integer(static_cast<unsigned long>(table.counts[a][k])), binomial(size, k));
      w.canonicalize();
      gamma.set(k, table.values[a], w);
    }
  return gamma;
}

ConvexDecomposition decompose(const SubsetProfile& gamma, const std::function<void(const SubsetProfile&)>& observer) {
  const auto report = check_properties(gamma);
  if (!report.all()) throw std::invalid_argument("profile violates the nonnegativity, normalization or chain property");

  const unsigned i = gamma.max_index();
  ConvexDecomposition out;
  out.max_index = i;
  SubsetProfile current = gamma;
  Rational remaining = 1;  // weight of `current` in the original profile

  while (true) {
    std::vector<Rational> minima(i + 1);
    Rational lambda = 2;
    for (unsigned k = 0; k <= i; ++k) {
      const auto& [r, w] = *current.row(k).begin();
      minima[k] = r;
      lambda = std::min(lambda, w);
      if (k > 0 && !(minima[k - 1] < minima[k]))
        throw std::logic_error("row minima are not strictly increasing at k = " + std::to_string(k));
    }

    if (current.support_size() == i + 1) {
      out.terms.push_back({remaining, PureProfile(std::move(minima))});
      break;
    }
    if (lambda >= 1) throw std::logic_error("extraction weight reached 1 with support left over");

    out.terms.push_back({remaining * lambda, PureProfile(minima)});
    for (unsigned k = 0; k <= i; ++k) current.add(k, minima[k], -lambda);
    current.scale(1 / (1 - lambda));
    remaining *= 1 - lambda;

    if (observer) observer(current);
    if (!check_properties(current).all()) throw std::logic_error("intermediate profile left the admissible class");
  }
  return out;
}

Rational bilinear_B(const SubsetProfile& alpha, const SubsetProfile& beta, const Rational& p, const Rational& x) {
  require_probability(p);
  const auto y = mix_rows(alpha, binomial_weights(alpha.max_index(), p));
  const auto z = mix_rows(beta, binomial_weights(beta.max_index(), p));
  Rational sum = 0;
  for (const auto& [r, w] : y) {
    auto it = z.find(r - x);
    if (it != z.end()) sum += w * it->second;
  }
  return sum;
}

Rational pure_value(const PureProfile& alpha, const PureProfile& beta, const Rational& p, const Rational& x) {
  require_probability(p);
  const auto f = binomial_weights(alpha.max_index(), p);
  const auto g = binomial_weights(beta.max_index(), p);
  const auto& s = beta.points();
  Rational sum = 0;
  for (unsigned k = 0; k <= alpha.max_index(); ++k) {
    const Rational target = alpha.points()[k] - x;
    auto it = std::lower_bound(s.begin(), s.end(), target);
    if (it != s.end() && *it == target) sum += f[k] * g[static_cast<std::size_t>(it - s.begin())];
  }
  return sum;
}

PureMaximum max_over_pure(unsigned ell, unsigned m, const Rational& p, const Rational& x, unsigned grid_size) {
  require_probability(p);
  if (ell + m > kMaxPureTotal) throw std::invalid_argument("ell + m exceeds the enumeration guard");
  if (grid_size > kMaxPureGrid) throw std::invalid_argument("grid size exceeds the enumeration guard");
  if (grid_size < ell + m + 1) throw std::invalid_argument("grid size must be at least ell + m + 1");

  const Integer r = p.get_num();
  const Integer c = p.get_den() - p.get_num();
  auto scaled_binom = [&](unsigned n, unsigned k) -> Integer {
    Integer a, b;
    mpz_pow_ui(a.get_mpz_t(), r.get_mpz_t(), k);
    mpz_pow_ui(b.get_mpz_t(), c.get_mpz_t(), n - k);
    return binomial(n, k) * a * b;
  };
  std::vector<std::vector<Integer>> scaled(ell + 1, std::vector<Integer>(m + 1));
  for (unsigned k = 0; k <= ell; ++k)
    for (unsigned j = 0; j <= m; ++j) scaled[k][j] = scaled_binom(ell, k) * scaled_binom(m, j);

  Integer denominator;
  mpz_pow_ui(denominator.get_mpz_t(), p.get_den_mpz_t(), ell + m);

  PureMaximum out;
  std::vector<int> best_r;
  std::vector<int> best_s;
  Integer best;
  if (denominator < Integer(1) << 62) {
    auto search = run_search<long>(ell, m, grid_size, scaled);
    best = Integer(search.best);
    best_r = search.best_r;
    best_s = search.best_s;
    out.configurations = search.configurations;
  } else {
    auto search = run_search<Integer>(ell, m, grid_size, scaled);
    best = search.best;
    best_r = search.best_r;
    best_s = search.best_s;
    out.configurations = search.configurations;
  }
  out.best_value = Rational(best, denominator);
  out.best_value.canonicalize();

  std::vector<Rational> alpha_points(best_r.begin(), best_r.end());
  std::vector<Rational> beta_points;
  for (int v : best_s) beta_points.push_back(Rational(v) - x);
  out.best_alpha = PureProfile(std::move(alpha_points));
  out.best_beta = PureProfile(std::move(beta_points));

  const auto dist = build_dist(ell, m, p);
  out.binomial_max = dist.max_mass();
  const auto modes = dist.modes();
  out.binomial_argmax = *std::min_element(modes.begin(), modes.end(), [](long a, long b) {
    return std::labs(a) < std::labs(b) || (std::labs(a) == std::labs(b) && a < b);
  });
  out.equals_binomial_max = out.best_value == out.binomial_max;

  // Offset matching r_k = k, s_j + x = j + d.
  std::vector<Rational> offset_r;
  std::vector<Rational> offset_s;
  for (unsigned k = 0; k <= ell; ++k) offset_r.emplace_back(static_cast<long>(k));
  for (unsigned j = 0; j <= m; ++j) offset_s.push_back(Rational(static_cast<long>(j) + out.binomial_argmax) - x);
  out.attained_by_offset =
      pure_value(PureProfile(std::move(offset_r)), PureProfile(std::move(offset_s)), p, x) == out.best_value;
  return out;
}

PipelineReport pipeline_check(const oracle::ExactCoefficients& coeffs, const Rational& p, const Rational& x) {
  require_probability(p);
  std::vector<Rational> positives;
  std::vector<Rational> negatives;
  for (const auto& a : coeffs.values()) (a > 0 ? positives : negatives).push_back(a > 0 ? a : Rational(-a));

  PipelineReport report;
  report.ell = static_cast<unsigned>(positives.size());
  report.m = static_cast<unsigned>(negatives.size());
  report.point_prob = oracle::point_prob(coeffs, p, x);

  const auto alpha = profile_from_multiset(positives);
  const auto beta = profile_from_multiset(negatives);
  report.bilinear = bilinear_B(alpha, beta, p, x);

  const auto alpha_terms = decompose(alpha);
  const auto beta_terms = decompose(beta);
  report.pure_bound = 0;
  report.decomposition_sum = 0;
  for (const auto& a : alpha_terms.terms)
    for (const auto& b : beta_terms.terms) {
      const Rational v = pure_value(a.profile, b.profile, p, x);
      report.decomposition_sum += a.weight * b.weight * v;
      report.pure_bound = std::max(report.pure_bound, v);
    }
  report.binomial_bound = build_dist(report.ell, report.m, p).max_mass();
  report.holds = report.point_prob == report.bilinear && report.bilinear == report.decomposition_sum &&
                 report.bilinear <= report.pure_bound && report.pure_bound <= report.binomial_bound;
  return report;
}

std::string profile_to_json(const SubsetProfile& gamma) {
  nlohmann::json entries = nlohmann::json::array();
  for (unsigned k = 0; k <= gamma.max_index(); ++k)
    for (const auto& [r, w] : gamma.row(k))
      entries.push_back({k, integer_to_json(r.get_num()), integer_to_json(r.get_den()), integer_to_json(w.get_num()),
                         integer_to_json(w.get_den())});
  nlohmann::json doc;
  doc["i"] = gamma.max_index();
  doc["entries"] = std::move(entries);
  return doc.dump();
}

SubsetProfile profile_from_json(std::string_view text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw std::invalid_argument(std::string("profile JSON: ") + e.what());
  }
  if (!doc.is_object() || !doc.contains("i") || !doc["i"].is_number_unsigned() || !doc.contains("entries") ||
      !doc["entries"].is_array())
    throw std::invalid_argument("profile JSON must be {\"i\": <nonneg int>, \"entries\": [...]}");
  const auto i = doc["i"].get<unsigned>();
  SubsetProfile gamma(i);
  for (const auto& e : doc["entries"]) {
    if (!e.is_array() || e.size() != 5 || !e[0].is_number_unsigned())
      throw std::invalid_argument("profile entry must be [k, r_num, r_den, w_num, w_den]");
    const auto k = e[0].get<unsigned>();
    if (k > i) throw std::invalid_argument("profile entry k exceeds i");
    gamma.add(k, fraction_from_json(e[1], e[2]), fraction_from_json(e[3], e[4]));
  }
  return gamma;
}

}  // namespace elo::pure
