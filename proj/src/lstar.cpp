#include "elo/lstar.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <stdexcept>
#include <thread>

namespace elo::lstar {

namespace mp = boost::multiprecision;

namespace {

std::vector<Real> binomial_pmf_vector(unsigned long n, const Real& p) {
  std::vector<Real> f(n + 1);
  f[0] = mp::pow(1 - p, Real(n));
  const Real ratio = p / (1 - p);
  for (unsigned long k = 0; k < n; ++k) f[k + 1] = f[k] * ratio * (n - k) / (k + 1);
  return f;
}

struct SplitPmf {
  std::vector<Real> up;    // Bin(ell, p)
  std::vector<Real> down;  // Bin(m, p)

  long ell() const { return static_cast<long>(up.size()) - 1; }
  long m() const { return static_cast<long>(down.size()) - 1; }

  Real at(long d) const {
    if (d < -m() || d > ell()) return Real(0);
    Real sum = 0;
    const long j_hi = std::min(m(), ell() - d);
    for (long j = std::max(0L, -d); j <= j_hi; ++j)
      sum += up[static_cast<std::size_t>(j + d)] * down[static_cast<std::size_t>(j)];
    return sum;
  }
};

struct Candidate {
  unsigned long ell;
  long x;
  Real prob;
};

template <class Fn>
void parallel_for(std::size_t count, unsigned threads, Fn&& fn) {
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, std::max<std::size_t>(count, 1)));
  if (threads <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  std::vector<std::thread> pool;
  for (unsigned w = 0; w < threads; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < count; i = next++) {
        try {
          fn(i);
        } catch (...) {
          std::lock_guard lock(failure_mutex);
          if (!failure) failure = std::current_exception();
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
}

LStarOutcome from_exact(const LStarResult& r) {
  LStarOutcome out;
  out.n = r.n;
  out.backend = Backend::rational;
  out.ell_star = r.ell_star;
  out.x_star = r.x_star;
  out.prob_exact = r.prob;
  out.prob = to_real(r.prob);
  out.ties = r.ties;
  out.degenerate = r.degenerate;
  return out;
}

Rational deviation_of(const LStarOutcome& result, const LStarPrediction& prediction) {
  if (prediction.kind == PredictionKind::exact_value)
    return Rational(static_cast<long>(result.ell_star)) - Rational(static_cast<long>(prediction.value));
  return fraction(static_cast<long>(result.ell_star), static_cast<long>(result.n)) - prediction.ratio;
}

std::optional<unsigned long> smallest_period(const std::vector<Rational>& residues, std::size_t from) {
  const std::size_t count = residues.size() - from;
  for (std::size_t period = 1; period <= count / 2; ++period) {
    bool ok = true;
    for (std::size_t i = from; i + period < residues.size() && ok; ++i) ok = residues[i] == residues[i + period];
    if (ok) return period;
  }
  return std::nullopt;
}

}  // namespace

PInput parse_p(std::string_view text, bool irrational) {
  PInput p;
  p.text = std::string(text);
  p.exact = parse_rational(text);
  require_probability(p.exact);
  p.decimal = looks_decimal(text);
  if (irrational && !p.decimal) throw std::invalid_argument("irrational intent requires a decimal surrogate for p");
  p.irrational = irrational;
  return p;
}

std::string to_string(CaseKind kind) {
  switch (kind) {
    case CaseKind::small_p: return "small-p";
    case CaseKind::even_n: return "even-n";
    case CaseKind::rational_odd_denominator: return "rational-odd-denominator";
    case CaseKind::rational_even_denominator: return "rational-even-denominator";
    case CaseKind::irrational_surrogate: return "irrational-surrogate";
  }
  return "unknown";
}

std::string to_string(Backend backend) {
  switch (backend) {
    case Backend::automatic: return "automatic";
    case Backend::rational: return "rational";
    case Backend::floating: return "float";
  }
  return "unknown";
}

bool is_small_p(unsigned long n, const Rational& p) {
  require_probability(p);
  return pow(Rational(1) - p, n) * 2 >= 1;
}

PCase classify(unsigned long n, const PInput& p) {
  PCase c;
  c.r = p.exact.get_num();
  c.s = p.exact.get_den();
  if (is_small_p(n, p.exact)) {
    c.kind = CaseKind::small_p;
  } else if (n % 2 == 0) {
    c.kind = CaseKind::even_n;
  } else if (p.irrational) {
    c.kind = CaseKind::irrational_surrogate;
    c.precision_bits = precision_bits();
  } else if (mpz_odd_p(c.s.get_mpz_t())) {
    c.kind = CaseKind::rational_odd_denominator;
  } else {
    c.kind = CaseKind::rational_even_denominator;
  }
  return c;
}

LStarPrediction predict(unsigned long n, const PInput& p) {
  if (n == 0) throw std::invalid_argument("n must be positive");
  if (!(p.exact > 0 && p.exact < 1)) throw std::invalid_argument("prediction requires 0 < p < 1");
  LStarPrediction out;
  out.pcase = classify(n, p);
  out.degenerate = p.exact == Rational(1, 2);
  switch (out.pcase.kind) {
    case CaseKind::small_p:
      out.value = (n + 1) / 2;
      out.x_star = 0;
      out.provenance = "any n, p <= 1 - (1/2)^(1/n): ceil(n/2)";
      break;
    case CaseKind::even_n:
      out.value = n / 2;
      out.x_star = 0;
      out.provenance = "n even, any p: n/2";
      break;
    case CaseKind::irrational_surrogate:
      out.kind = PredictionKind::asymptotic_ratio;
      out.ratio = Rational(1, 2);
      out.provenance = "n odd, p irrational: (1/2 + o(1)) n";
      break;
    case CaseKind::rational_odd_denominator: {
      // s <= n for the row to name a valid split; clip otherwise.
      const Integer s = out.pcase.s;
      out.value = s <= n ? (n + s.get_ui()) / 2 : n;
      out.x_star = out.pcase.r.get_si();
      out.provenance = "n odd, p = r/s, s odd: (n + s)/2, x* = r";
      break;
    }
    case CaseKind::rational_even_denominator:
      if (out.degenerate) {
        out.value = (n + 1) / 2;
        out.provenance = "p = 1/2: every split ties, canonical ceil(n/2)";
      } else {
        out.kind = PredictionKind::asymptotic_ratio;
        const Integer gap = abs(out.pcase.s - 2 * out.pcase.r);
        out.ratio = Rational(1, 2) + fraction(3, 5 * gap);
        out.provenance = "n odd, p = r/s, s even: (1/2 + 3/(5|1-2p|s) + o(1)) n";
      }
      break;
  }
  return out;
}

std::string LStarOutcome::prob_decimal(int digits) const {
  if (prob_exact) return to_decimal(*prob_exact, digits);
  return to_decimal(prob, digits);
}

Real float_tie_tolerance() {
  return mp::ldexp(Real(1), -static_cast<int>(precision_bits()) + 24);
}

Real float_bin_diff_pmf(unsigned long ell, unsigned long m, const Real& p, long d) {
  if (!(p >= 0 && p <= 1)) throw std::invalid_argument("p must lie in [0, 1]");
  if (p == 0) return Real(d == 0 ? 1 : 0);
  if (p == 1) return Real(d == static_cast<long>(ell) - static_cast<long>(m) ? 1 : 0);
  SplitPmf split{binomial_pmf_vector(ell, p), binomial_pmf_vector(m, p)};
  return split.at(d);
}

LStarOutcome concentration_bound_float(unsigned long n, const Real& p) {
  if (n == 0) throw std::invalid_argument("n must be positive");
  if (!(p >= 0 && p <= 1)) throw std::invalid_argument("p must lie in [0, 1]");
  LStarOutcome out;
  out.n = n;
  out.backend = Backend::floating;

  if (p == 0 || p == 1) {
    out.degenerate = true;
    out.prob = 1;
    for (unsigned long ell = 0; ell <= n; ++ell)
      out.ties.push_back({ell, p == 0 ? 0 : 2 * static_cast<long>(ell) - static_cast<long>(n)});
    const SplitPoint best = canonical_split(n, out.ties);
    out.ell_star = best.ell;
    out.x_star = best.x;
    return out;
  }

  const Real tol = float_tie_tolerance();
  std::vector<Candidate> candidates;
  for (unsigned long ell = (n + 1) / 2; ell <= n; ++ell) {
    const unsigned long m = n - ell;
    SplitPmf split{binomial_pmf_vector(ell, p), binomial_pmf_vector(m, p)};
    const Real mean = Real(static_cast<long>(ell) - static_cast<long>(m)) * p;
    long d = mp::lround(mean);
    d = std::clamp(d, -static_cast<long>(m), static_cast<long>(ell));
    Real v = split.at(d);
    // Unimodal: climb until neither neighbour is larger.
    while (true) {
      Real up = split.at(d + 1);
      if (up > v) {
        ++d;
        v = std::move(up);
        continue;
      }
      Real down = split.at(d - 1);
      if (down > v) {
        --d;
        v = std::move(down);
        continue;
      }
      break;
    }
    for (long x = d - 1; x <= d + 1; ++x) {
      Real w = x == d ? v : split.at(x);
      if (w >= v * (1 - tol)) {
        candidates.push_back({ell, x, w});
        if (2 * ell != n) candidates.push_back({m, -x, w});
      } else if (x == d + 1 || x == d - 1) {
        continue;
      }
    }
  }
  Real best = 0;
  for (const auto& c : candidates) best = mp::max(best, c.prob);
  for (const auto& c : candidates)
    if (c.prob >= best * (1 - tol)) out.ties.push_back({c.ell, c.x});
  std::sort(out.ties.begin(), out.ties.end());
  out.ties.erase(std::unique(out.ties.begin(), out.ties.end()), out.ties.end());
  out.prob = best;
  out.degenerate = p == Real(0.5);
  const SplitPoint canonical = canonical_split(n, out.ties);
  out.ell_star = canonical.ell;
  out.x_star = canonical.x;
  return out;
}

LStarOutcome exact_lstar(unsigned long n, const PInput& p, Backend backend) {
  if (backend == Backend::automatic) backend = p.decimal ? Backend::floating : Backend::rational;
  if (backend == Backend::rational) return from_exact(concentration_bound(n, p.exact));
  return concentration_bound_float(n, p.value());
}

std::vector<ScanRow> scan(const PInput& p, unsigned long n_from, unsigned long n_to, unsigned long stride,
                          Backend backend, unsigned threads) {
  if (n_from == 0) throw std::invalid_argument("scan range must start at n >= 1");
  if (stride == 0) throw std::invalid_argument("scan stride must be positive");
  if (n_to < n_from) throw std::invalid_argument("scan range is empty");
  if (!(p.exact > 0 && p.exact < 1)) throw std::invalid_argument("scan requires 0 < p < 1");
  std::vector<unsigned long> ns;
  for (unsigned long n = n_from; n <= n_to; n += stride) ns.push_back(n);
  std::vector<ScanRow> rows(ns.size());
  parallel_for(ns.size(), threads, [&](std::size_t i) {
    ScanRow row;
    row.n = ns[i];
    row.result = exact_lstar(ns[i], p, backend);
    row.prediction = predict(ns[i], p);
    row.deviation = deviation_of(row.result, row.prediction);
    rows[i] = std::move(row);
  });
  return rows;
}

std::string prediction_text(const LStarPrediction& prediction) {
  if (prediction.kind == PredictionKind::exact_value) return std::to_string(prediction.value);
  return to_decimal(prediction.ratio, 12);
}

void write_scan_csv(std::ostream& os, const PInput& p, const std::vector<ScanRow>& rows) {
  os << "n,p,ell_star,x_star,prob,prediction,deviation,tie_count\n";
  for (const auto& row : rows) {
    const std::string deviation = row.prediction.kind == PredictionKind::exact_value ? elo::to_string(row.deviation)
                                                                                     : to_decimal(row.deviation, 12);
    os << row.n << ',' << p.text << ',' << row.result.ell_star << ',' << row.result.x_star << ','
       << row.result.prob_decimal(30) << ',' << prediction_text(row.prediction) << ',' << deviation << ','
       << row.result.ties.size() << '\n';
  }
}

std::optional<unsigned long> agreement_threshold(const std::vector<ScanRow>& rows) {
  std::optional<unsigned long> threshold;
  for (auto it = rows.rbegin(); it != rows.rend(); ++it) {
    const auto& pred = it->prediction;
    const bool match = pred.kind == PredictionKind::exact_value && it->result.ell_star == pred.value &&
                       (!pred.x_star || *pred.x_star == it->result.x_star);
    if (!match) break;
    threshold = it->n;
  }
  return threshold;
}

PeriodicityReport periodicity_probe(const PInput& p, unsigned long n_from, unsigned long n_to, Backend backend,
                                    unsigned threads) {
  if (!(p.exact > 0 && p.exact < 1)) throw std::invalid_argument("periodicity probe requires 0 < p < 1");
  if (p.exact == Rational(1, 2)) throw std::invalid_argument("periodicity probe is singular at p = 1/2");
  const Integer r = p.exact.get_num();
  const Integer s = p.exact.get_den();
  if (mpz_odd_p(s.get_mpz_t())) throw std::invalid_argument("periodicity probe requires an even denominator");
  if (n_from % 2 == 0) ++n_from;
  if (n_to < n_from) throw std::invalid_argument("periodicity window contains no odd n");

  PeriodicityReport report;
  report.slope = Rational(1, 2) + fraction(3, 5 * abs(s - 2 * r));
  for (unsigned long n = n_from; n <= n_to; n += 2) report.ns.push_back(n);
  report.ell_stars.resize(report.ns.size());
  if (backend == Backend::automatic) backend = p.decimal ? Backend::floating : Backend::rational;
  parallel_for(report.ns.size(), threads, [&](std::size_t i) {
    report.ell_stars[i] = static_cast<long>(exact_lstar(report.ns[i], p, backend).ell_star);
  });
  report.max_abs_residue = 0;
  for (std::size_t i = 0; i < report.ns.size(); ++i) {
    Rational residue = Rational(report.ell_stars[i]) - report.slope * Rational(static_cast<long>(report.ns[i]));
    report.max_abs_residue = std::max(report.max_abs_residue, Rational(abs(residue)));
    report.residues.push_back(std::move(residue));
  }
  report.period = smallest_period(report.residues, 0);
  report.tail_period = smallest_period(report.residues, report.residues.size() / 2);
  return report;
}

}  // namespace elo::lstar
