#pragma once

#include "elo/exact_dist.hpp"
#include "elo/rational.hpp"
#include "elo/real.hpp"

#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

// The optimal number ell* of +1 coefficients: predictions from the case
// table, exhaustive computation, scans over n and the periodicity probe.
namespace elo::lstar {

/// A probability as written by the caller. Decimal strings are exact
/// rationals too; `decimal` only selects the float backend by default.
struct PInput {
  std::string text;
  Rational exact;
  bool decimal = false;
  /// Set only by the caller: treat the decimal as an irrational surrogate.
  bool irrational = false;

  Real value() const { return to_real(exact); }
};

/// Throws std::invalid_argument unless the text parses to p in [0, 1].
/// Irrational intent requires a decimal.
PInput parse_p(std::string_view text, bool irrational = false);

enum class CaseKind { small_p, even_n, rational_odd_denominator, rational_even_denominator, irrational_surrogate };

std::string to_string(CaseKind kind);

struct PCase {
  CaseKind kind = CaseKind::even_n;
  Integer r;  // p = r/s in lowest terms (rational rows)
  Integer s;
  unsigned precision_bits = 0;  // irrational surrogates only
};

/// (1 - p)^n >= 1/2, i.e. p <= 1 - (1/2)^(1/n); exact for rational p.
bool is_small_p(unsigned long n, const Rational& p);

/// Precedence: small p, then even n, then the odd-n rows by denominator
/// parity (or declared irrationality).
PCase classify(unsigned long n, const PInput& p);

enum class PredictionKind { exact_value, asymptotic_ratio };

struct LStarPrediction {
  PredictionKind kind = PredictionKind::exact_value;
  PCase pcase;
  unsigned long value = 0;       // exact_value rows
  std::optional<long> x_star;    // when the row also fixes x*
  Rational ratio;                // asymptotic_ratio rows: ell*/n -> ratio
  std::string provenance;
  /// p = 1/2: every split ties, value is the canonical ceil(n/2).
  bool degenerate = false;
};

/// Requires n >= 1 and 0 < p < 1.
LStarPrediction predict(unsigned long n, const PInput& p);

enum class Backend { automatic, rational, floating };

std::string to_string(Backend backend);

/// ell* from either backend. The float backend carries probabilities at the
/// current Real precision and detects ties with relative tolerance
/// float_tie_tolerance().
struct LStarOutcome {
  unsigned long n = 0;
  Backend backend = Backend::rational;
  unsigned long ell_star = 0;
  long x_star = 0;
  std::optional<Rational> prob_exact;
  Real prob;
  std::vector<SplitPoint> ties;
  bool degenerate = false;

  std::string prob_decimal(int digits = 30) const;
};

Real float_tie_tolerance();

/// Pr(Bin(ell, p) - Bin(m, p) = d) in Real arithmetic.
Real float_bin_diff_pmf(unsigned long ell, unsigned long m, const Real& p, long d);

/// Float counterpart of concentration_bound. Scans ell >= ceil(n/2) and
/// mirrors (ell, x) -> (n - ell, -x); per split, climbs to the mode of the
/// log-concave pmf starting from round(tp).
LStarOutcome concentration_bound_float(unsigned long n, const Real& p);

/// Automatic picks rational for "r/s" input and float for decimals.
LStarOutcome exact_lstar(unsigned long n, const PInput& p, Backend backend = Backend::automatic);

struct ScanRow {
  unsigned long n = 0;
  LStarOutcome result;
  LStarPrediction prediction;
  /// ell* - value, or ell*/n - ratio.
  Rational deviation;
};

/// Rows for n = n_from, n_from + stride, ..., <= n_to, ordered by n.
/// threads = 0 uses the hardware concurrency.
std::vector<ScanRow> scan(const PInput& p, unsigned long n_from, unsigned long n_to, unsigned long stride,
                          Backend backend = Backend::automatic, unsigned threads = 1);

/// CSV with header n,p,ell_star,x_star,prob,prediction,deviation,tie_count.
void write_scan_csv(std::ostream& os, const PInput& p, const std::vector<ScanRow>& rows);

std::string prediction_text(const LStarPrediction& prediction);

/// Smallest scanned n from which every later row matches an exact-value
/// prediction (ell* and, when predicted, x*). Empty if the last row misses.
std::optional<unsigned long> agreement_threshold(const std::vector<ScanRow>& rows);

struct PeriodicityReport {
  Rational slope;  // 1/2 + 3/(5 |1 - 2p| s)
  std::vector<unsigned long> ns;
  std::vector<long> ell_stars;
  std::vector<Rational> residues;  // ell* - slope n
  Rational max_abs_residue;
  /// Smallest P with residue(n + 2P) = residue(n) across the window.
  std::optional<unsigned long> period;
  /// Same test restricted to the second half of the window.
  std::optional<unsigned long> tail_period;
};

/// Requires p = r/s with s even and p != 1/2; scans the odd n in
/// [n_from, n_to].
PeriodicityReport periodicity_probe(const PInput& p, unsigned long n_from, unsigned long n_to,
                                    Backend backend = Backend::rational, unsigned threads = 1);

}  // namespace elo::lstar
