#include "elo/cli.hpp"

#include "elo/exact_dist.hpp"
#include "elo/fourier.hpp"
#include "elo/lstar.hpp"
#include "elo/oracle.hpp"
#include "elo/pure_decomp.hpp"
#include "elo/rational.hpp"
#include "elo/real.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <ctime>
#include <fstream>
#include <functional>
#include <iomanip>
#include <sstream>
#include <stdexcept>

namespace elo::cli {

namespace {

using Json = nlohmann::ordered_json;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Options {
  unsigned long n = 0;
  std::string p;
  long t = 0;
  long x = 0;
  std::string tol;
  std::string format = "json";
  unsigned threads = 1;
  std::uint64_t seed = 1;
  std::string range;
  std::string backend = "auto";
  bool irrational = false;
  std::string strategy = "grid";
  std::size_t samples = 10000;
  double radius = 0.5;
  std::size_t steps = 20;
  int max_abs = 3;
  std::string multiset;
  std::string input;
};

struct Range {
  unsigned long from = 0;
  unsigned long to = 0;
  unsigned long step = 1;
};

void put_rational(Json& j, const std::string& key, const Rational& q) {
  j[key] = to_string(q);
  j[key + "_kind"] = "rational";
}

void put_decimal(Json& j, const std::string& key, const std::string& text) {
  j[key] = text;
  j[key + "_kind"] = "decimal";
}

void put_real(Json& j, const std::string& key, const Real& v) { put_decimal(j, key, to_decimal(v, 30)); }

template <class Fn>
auto flag(const std::string& name, Fn&& fn) {
  try {
    return fn();
  } catch (const std::invalid_argument& e) {
    throw UsageError("--" + name + ": " + e.what());
  }
}

lstar::PInput parse_p_flag(const Options& o) {
  if (o.p.empty()) throw UsageError("--p is required");
  return flag("p", [&] { return lstar::parse_p(o.p, o.irrational); });
}

void put_p(Json& j, const lstar::PInput& p) {
  j["p"] = p.text;
  j["p_kind"] = p.decimal ? "decimal" : "rational";
  if (p.irrational) j["p_irrational_surrogate"] = true;
}

lstar::Backend parse_backend(const std::string& text) {
  if (text == "auto") return lstar::Backend::automatic;
  if (text == "rational") return lstar::Backend::rational;
  if (text == "float") return lstar::Backend::floating;
  throw UsageError("--backend: expected auto, rational or float, got '" + text + "'");
}

Range parse_range(const std::string& text, unsigned long default_step) {
  if (text.empty()) throw UsageError("--range is required");
  std::vector<unsigned long> parts;
  std::stringstream ss(text);
  std::string part;
  while (std::getline(ss, part, ':')) {
    std::size_t used = 0;
    unsigned long v = 0;
    try {
      if (part.empty() || part[0] == '-') throw std::invalid_argument("negative");
      v = std::stoul(part, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != part.size()) throw UsageError("--range: expected a:b or a:b:step, got '" + text + "'");
    parts.push_back(v);
  }
  if (parts.size() < 2 || parts.size() > 3) throw UsageError("--range: expected a:b or a:b:step, got '" + text + "'");
  Range r{parts[0], parts[1], parts.size() == 3 ? parts[2] : default_step};
  if (r.from == 0) throw UsageError("--range: start must be at least 1");
  if (r.to < r.from) throw UsageError("--range: end precedes start");
  if (r.step == 0) throw UsageError("--range: step must be positive");
  return r;
}

Json ties_json(const std::vector<SplitPoint>& ties) {
  Json out = Json::array();
  for (const auto& s : ties) out.push_back(Json::array({s.ell, s.x}));
  return out;
}

void put_outcome(Json& j, const lstar::LStarOutcome& r) {
  j["backend"] = lstar::to_string(r.backend);
  j["ell_star"] = r.ell_star;
  j["x_star"] = r.x_star;
  if (r.prob_exact) {
    put_rational(j, "prob", *r.prob_exact);
    put_decimal(j, "prob_decimal", to_decimal(*r.prob_exact, 30));
  } else {
    put_real(j, "prob", r.prob);
  }
  j["tie_count"] = r.ties.size();
  j["ties"] = ties_json(r.ties);
  j["degenerate"] = r.degenerate;
}

Json prediction_json(const lstar::LStarPrediction& pred) {
  Json j;
  j["case"] = lstar::to_string(pred.pcase.kind);
  if (pred.kind == lstar::PredictionKind::exact_value) {
    j["kind"] = "exact-value";
    j["value"] = pred.value;
  } else {
    j["kind"] = "asymptotic-ratio";
    put_rational(j, "ratio", pred.ratio);
    put_decimal(j, "ratio_decimal", to_decimal(pred.ratio, 20));
  }
  j["x_star"] = pred.x_star ? Json(*pred.x_star) : Json(nullptr);
  j["provenance"] = pred.provenance;
  j["degenerate"] = pred.degenerate;
  return j;
}

using Action = std::function<int(std::ostream&, Json&)>;

Action cmd_bound(const Options& o) {
  auto p = parse_p_flag(o);
  const auto backend = parse_backend(o.backend);
  if (o.n == 0) throw UsageError("--n must be at least 1");
  return [=](std::ostream&, Json& payload) {
    payload["n"] = o.n;
    put_p(payload, p);
    put_outcome(payload, lstar::exact_lstar(o.n, p, backend));
    return kExitOk;
  };
}

Action cmd_lstar(const Options& o) {
  auto p = parse_p_flag(o);
  const auto backend = parse_backend(o.backend);
  if (o.n == 0) throw UsageError("--n must be at least 1");
  if (!(p.exact > 0 && p.exact < 1)) throw UsageError("--p: prediction requires 0 < p < 1");
  return [=](std::ostream&, Json& payload) {
    const auto result = lstar::exact_lstar(o.n, p, backend);
    const auto pred = lstar::predict(o.n, p);
    payload["n"] = o.n;
    put_p(payload, p);
    put_outcome(payload, result);
    payload["prediction"] = prediction_json(pred);
    if (pred.kind == lstar::PredictionKind::exact_value) {
      put_rational(payload, "deviation",
                   Rational(static_cast<long>(result.ell_star)) - Rational(static_cast<long>(pred.value)));
      payload["agrees"] = result.ell_star == pred.value && (!pred.x_star || *pred.x_star == result.x_star);
    } else {
      put_rational(payload, "deviation", fraction(static_cast<long>(result.ell_star), static_cast<long>(o.n)) - pred.ratio);
      payload["agrees"] = nullptr;
    }
    return kExitOk;
  };
}

Action cmd_scan(const Options& o) {
  auto p = parse_p_flag(o);
  const auto backend = parse_backend(o.backend);
  const Range range = parse_range(o.range, 1);
  if (o.format != "json" && o.format != "csv") throw UsageError("--format: expected json or csv");
  if (!(p.exact > 0 && p.exact < 1)) throw UsageError("--p: scan requires 0 < p < 1");
  return [=](std::ostream& out, Json& payload) {
    const auto rows = lstar::scan(p, range.from, range.to, range.step, backend, o.threads);
    if (o.format == "csv") {
      lstar::write_scan_csv(out, p, rows);
      return kExitOk;
    }
    put_p(payload, p);
    payload["range"] = {{"from", range.from}, {"to", range.to}, {"step", range.step}};
    Json list = Json::array();
    for (const auto& row : rows) {
      Json j;
      j["n"] = row.n;
      put_outcome(j, row.result);
      j["prediction"] = prediction_json(row.prediction);
      put_rational(j, "deviation", row.deviation);
      list.push_back(std::move(j));
    }
    payload["rows"] = std::move(list);
    const auto threshold = lstar::agreement_threshold(rows);
    payload["agreement_threshold"] = threshold ? Json(*threshold) : Json(nullptr);
    return kExitOk;
  };
}

Action cmd_probe(const Options& o) {
  auto p = parse_p_flag(o);
  const auto backend = parse_backend(o.backend);
  const Range range = parse_range(o.range, 2);
  if (!(p.exact > 0 && p.exact < 1)) throw UsageError("--p: requires 0 < p < 1");
  if (p.exact == Rational(1, 2)) throw UsageError("--p: the slope is singular at p = 1/2");
  if (mpz_odd_p(p.exact.get_den_mpz_t())) throw UsageError("--p: requires an even denominator");
  return [=](std::ostream&, Json& payload) {
    const auto report = lstar::periodicity_probe(p, range.from, range.to, backend, o.threads);
    put_p(payload, p);
    put_rational(payload, "slope", report.slope);
    Json rows = Json::array();
    for (std::size_t i = 0; i < report.ns.size(); ++i) {
      Json j;
      j["n"] = report.ns[i];
      j["ell_star"] = report.ell_stars[i];
      put_rational(j, "residue", report.residues[i]);
      rows.push_back(std::move(j));
    }
    payload["rows"] = std::move(rows);
    put_rational(payload, "max_abs_residue", report.max_abs_residue);
    payload["period"] = report.period ? Json(*report.period) : Json(nullptr);
    payload["tail_period"] = report.tail_period ? Json(*report.tail_period) : Json(nullptr);
    payload["period_note"] = report.period ? "shift by 2P in n" : "no period found in window";
    return kExitOk;
  };
}

oracle::Strategy parse_strategy(const Options& o) {
  if (o.strategy == "grid") return oracle::GridStrategy{o.max_abs};
  if (o.strategy == "random") {
    oracle::RandomStrategy s;
    s.count = o.samples;
    s.seed = o.seed;
    return s;
  }
  if (o.strategy == "hill-climb") {
    oracle::HillClimbStrategy s;
    s.radius = o.radius;
    s.steps = o.steps;
    s.seed = o.seed;
    return s;
  }
  throw UsageError("--strategy: expected grid, random or hill-climb, got '" + o.strategy + "'");
}

Action cmd_verify(const Options& o) {
  auto p = parse_p_flag(o);
  if (o.n == 0 || o.n > oracle::kVerifyGuard)
    throw UsageError("--n must lie in [1, " + std::to_string(oracle::kVerifyGuard) + "]");
  if (o.max_abs < 1) throw UsageError("--max-abs must be at least 1");
  const auto strategy = parse_strategy(o);
  return [=](std::ostream&, Json& payload) {
    const auto report = oracle::verify_theorem1(static_cast<unsigned>(o.n), p.exact, strategy);
    payload["n"] = report.n;
    put_p(payload, p);
    payload["strategy"] = report.strategy;
    payload["backend"] = report.backend;
    payload["samples_tested"] = report.samples_tested;
    if (report.backend == "rational")
      put_rational(payload, "max_observed", parse_rational(report.max_observed));
    else
      put_decimal(payload, "max_observed", report.max_observed);
    put_rational(payload, "bound", report.bound);
    payload["worst_case"] = report.worst_case;
    payload["violations"] = report.violations;
    payload["pass"] = report.pass;
    return kExitOk;
  };
}

std::vector<Rational> parse_multiset(const std::string& text) {
  std::vector<Rational> values;
  std::stringstream ss(text);
  std::string part;
  while (std::getline(ss, part, ',')) {
    Rational v = flag("multiset", [&] { return parse_rational(part); });
    if (v <= 0) throw UsageError("--multiset: values must be positive");
    values.push_back(v);
  }
  if (values.empty()) throw UsageError("--multiset: empty");
  return values;
}

Action cmd_decompose(const Options& o) {
  if (o.multiset.empty() == o.input.empty()) throw UsageError("decompose takes exactly one of --multiset, --input");
  pure::SubsetProfile gamma(0);
  if (!o.multiset.empty()) {
    gamma = pure::profile_from_multiset(parse_multiset(o.multiset));
  } else {
    std::ifstream in(o.input);
    if (!in) throw UsageError("--input: cannot open '" + o.input + "'");
    std::stringstream buffer;
    buffer << in.rdbuf();
    try {
      gamma = pure::profile_from_json(buffer.str());
    } catch (const std::exception& e) {
      throw UsageError(std::string("--input: ") + e.what());
    }
  }
  return [=](std::ostream&, Json& payload) {
    const auto props = pure::check_properties(gamma);
    payload["i"] = gamma.max_index();
    payload["support_size"] = gamma.support_size();
    payload["profile"] = Json::parse(pure::profile_to_json(gamma));
    Json pj;
    pj["nonnegative"] = props.nonnegative;
    pj["rows_normalized"] = props.rows_normalized;
    pj["chain_condition"] = props.chain_condition;
    if (props.violation) {
      Json v;
      v["k"] = props.violation->k;
      v["r"] = props.violation->r ? Json(to_string(*props.violation->r)) : Json(nullptr);
      put_rational(v, "value", props.violation->value);
      pj["violation"] = std::move(v);
    }
    payload["properties"] = std::move(pj);
    if (!props.all()) throw std::invalid_argument("profile violates the subset-profile properties");

    std::size_t intermediate_failures = 0;
    const auto dec = pure::decompose(gamma, [&](const pure::SubsetProfile& rest) {
      if (!pure::check_properties(rest).all()) ++intermediate_failures;
    });
    Json terms = Json::array();
    for (const auto& term : dec.terms) {
      Json t;
      put_rational(t, "weight", term.weight);
      Json pts = Json::array();
      for (const auto& r : term.profile.points()) pts.push_back(to_string(r));
      t["points"] = std::move(pts);
      t["points_kind"] = "rational";
      terms.push_back(std::move(t));
    }
    payload["terms"] = std::move(terms);
    payload["term_count"] = dec.terms.size();
    put_rational(payload, "total_weight", dec.total_weight());
    payload["recombination_exact"] = dec.recombine() == gamma;
    payload["intermediate_failures"] = intermediate_failures;
    return kExitOk;
  };
}

Action cmd_fourier(const Options& o) {
  auto p = parse_p_flag(o);
  fourier::FourierParams params{o.n, o.t, o.x, p.value()};
  flag("t", [&] {
    params.validate();
    return 0;
  });
  std::optional<Real> tol;
  if (!o.tol.empty()) {
    tol = flag("tol", [&] { return parse_real(o.tol); });
    if (!(*tol > 0)) throw UsageError("--tol must be positive");
  }
  return [=](std::ostream&, Json& payload) {
    const Real tolerance = tol ? *tol : fourier::default_tolerance(params.n, params.p);
    const auto q = fourier::q_integral(params, tolerance);
    const auto base = fourier::base_integral(params.n, params.p, tolerance);
    const Real prob_fourier = (base.value - q.value) / pi();
    const Rational prob_exact = bin_diff_pmf(params.ell(), params.m(), p.exact, params.x);

    payload["n"] = params.n;
    payload["t"] = params.t;
    payload["x"] = params.x;
    put_p(payload, p);
    put_real(payload, "q", q.value);
    if (fourier::asymptotic_applicable(params)) {
      const Real qa = fourier::q_asymptotic(params);
      put_real(payload, "q_asym", qa);
      put_real(payload, "ratio", q.value / qa);
    } else {
      payload["q_asym"] = nullptr;
      payload["ratio"] = nullptr;
    }
    put_real(payload, "prob_fourier", prob_fourier);
    put_rational(payload, "prob_exact", prob_exact);
    put_real(payload, "abs_diff", boost::multiprecision::abs(prob_fourier - to_real(prob_exact)));
    put_real(payload, "tol", tolerance);
    put_real(payload, "quadrature_error_estimate", q.abs_error_estimate + base.abs_error_estimate);
    payload["precision_bits"] = precision_bits();
    return kExitOk;
  };
}

std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  std::ostringstream os;
  os << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  return os.str();
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  std::vector<const char*> argv{"elo_cli"};
  for (const auto& a : args) argv.push_back(a.c_str());
  return run(static_cast<int>(argv.size()), argv.data(), out, err);
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Exact and asymptotic Bernoulli(p) Littlewood-Offord computations"};
  app.require_subcommand(1, 1);
  Options o;

  auto add_p = [&](CLI::App* sub) {
    sub->add_option("--p", o.p, "probability: r/s (exact) or a decimal")->required();
  };
  auto add_backend = [&](CLI::App* sub) {
    sub->add_option("--backend", o.backend, "auto, rational or float")->capture_default_str();
    sub->add_flag("--irrational", o.irrational, "treat a decimal p as an irrational surrogate");
  };
  auto add_threads = [&](CLI::App* sub) {
    sub->add_option("--threads", o.threads, "worker threads, 0 = all cores")->capture_default_str();
  };

  auto* bound = app.add_subcommand("bound", "maximum concentration over +-1 splits of n");
  bound->add_option("--n", o.n, "number of coefficients")->required();
  add_p(bound);
  add_backend(bound);

  auto* verify = app.add_subcommand("verify", "search for coefficient vectors beating the +-1 bound");
  verify->add_option("--n", o.n, "number of coefficients")->required();
  add_p(verify);
  verify->add_option("--strategy", o.strategy, "grid, random or hill-climb")->capture_default_str();
  verify->add_option("--samples", o.samples, "random vectors")->capture_default_str();
  verify->add_option("--seed", o.seed, "sampling seed")->capture_default_str();
  verify->add_option("--radius", o.radius, "hill-climb perturbation radius")->capture_default_str();
  verify->add_option("--steps", o.steps, "hill-climb perturbations per coordinate")->capture_default_str();
  verify->add_option("--max-abs", o.max_abs, "grid coefficient bound")->capture_default_str();

  auto* decompose = app.add_subcommand("decompose", "convex decomposition of a subset profile into pure chains");
  decompose->add_option("--multiset", o.multiset, "comma-separated positive values");
  decompose->add_option("--input", o.input, "profile JSON file");

  auto* fourier = app.add_subcommand("fourier-check", "Fourier inversion and the large-n expansion of q");
  fourier->add_option("--n", o.n, "n = ell + m")->required();
  fourier->add_option("--t", o.t, "t = ell - m")->required();
  fourier->add_option("--x", o.x, "point")->required();
  add_p(fourier);
  fourier->add_option("--tol", o.tol, "absolute quadrature tolerance");

  auto* lstar_cmd = app.add_subcommand("lstar", "optimal split with its predicted value");
  lstar_cmd->add_option("--n", o.n, "number of coefficients")->required();
  add_p(lstar_cmd);
  add_backend(lstar_cmd);

  auto* scan = app.add_subcommand("scan", "optimal split across a range of n");
  add_p(scan);
  scan->add_option("--range", o.range, "a:b or a:b:step")->required();
  scan->add_option("--format", o.format, "json or csv")->capture_default_str();
  add_backend(scan);
  add_threads(scan);

  auto* probe = app.add_subcommand("probe-periodicity", "residues of ell* against the linear trend, odd n");
  add_p(probe);
  probe->add_option("--range", o.range, "a:b (odd n only)")->required();
  add_backend(probe);
  add_threads(probe);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "usage error: " << e.what() << '\n';
    return kExitUsage;
  }

  CLI::App* sub = app.get_subcommands().front();
  const std::string name = sub->get_name();

  Action action;
  try {
    PrecisionScope precision(precision_bits_from_env());
    if (name == "bound") action = cmd_bound(o);
    else if (name == "verify") action = cmd_verify(o);
    else if (name == "decompose") action = cmd_decompose(o);
    else if (name == "fourier-check") action = cmd_fourier(o);
    else if (name == "lstar") action = cmd_lstar(o);
    else if (name == "scan") action = cmd_scan(o);
    else action = cmd_probe(o);
  } catch (const std::exception& e) {
    err << "usage error: " << e.what() << '\n';
    return kExitUsage;
  }

  Json envelope;
  envelope["schema_version"] = kSchemaVersion;
  Json echo;
  echo["name"] = name;
  std::vector<std::string> echoed;
  for (int i = 1; i < argc; ++i) echoed.emplace_back(argv[i]);
  echo["argv"] = echoed;
  envelope["command"] = std::move(echo);
  envelope["timestamp"] = utc_timestamp();

  Json payload = Json::object();
  int status = kExitOk;
  std::ostringstream direct;
  try {
    PrecisionScope precision(precision_bits_from_env());
    status = action(direct, payload);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    payload["error"] = e.what();
    status = kExitComputation;
  }

  if (status == kExitOk && !direct.str().empty()) {
    out << direct.str();
    return status;
  }
  envelope["payload"] = std::move(payload);
  envelope["exit_status"] = status;
  out << envelope.dump(2) << '\n';
  return status;
}

}  // namespace elo::cli
