#include "elo/cli.hpp"
#include "elo/rational.hpp"

#include <doctest.h>
#include <json.hpp>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

using Json = nlohmann::json;

namespace {

struct Invocation {
  int status;
  std::string out;
  std::string err;
};

Invocation invoke(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  const int status = elo::cli::run(args, out, err);
  return {status, out.str(), err.str()};
}

Json payload_of(const Invocation& r) {
  const Json doc = Json::parse(r.out);
  REQUIRE(doc.contains("payload"));
  return doc["payload"];
}

// Every string-valued field whose sibling "<key>_kind" exists names a kind.
void check_kinds(const Json& j) {
  if (j.is_object()) {
    for (auto it = j.begin(); it != j.end(); ++it) {
      const std::string& key = it.key();
      if (key.size() > 5 && key.compare(key.size() - 5, 5, "_kind") == 0) {
        REQUIRE((it.value() == "rational" || it.value() == "decimal"));
        REQUIRE(j.contains(key.substr(0, key.size() - 5)));
      }
      check_kinds(it.value());
    }
  } else if (j.is_array()) {
    for (const auto& v : j) check_kinds(v);
  }
}

}  // namespace

TEST_CASE("bound --n 4 --p 1/2") {
  const auto r = invoke({"bound", "--n", "4", "--p", "1/2"});
  REQUIRE(r.status == 0);
  const Json doc = Json::parse(r.out);
  CHECK(doc["schema_version"] == elo::cli::kSchemaVersion);
  CHECK(doc["command"]["name"] == "bound");
  CHECK(doc["exit_status"] == 0);
  CHECK(doc.contains("timestamp"));
  const Json p = doc["payload"];
  CHECK(p["ell_star"] == 2);
  CHECK(p["x_star"] == 0);
  CHECK(p["prob"] == "3/8");
  CHECK(p["prob_kind"] == "rational");
  CHECK(p["backend"] == "rational");
  CHECK(p["degenerate"] == true);
  check_kinds(p);
}

TEST_CASE("lstar --n 101 --p 1/3") {
  const auto r = invoke({"lstar", "--n", "101", "--p", "1/3"});
  REQUIRE(r.status == 0);
  const Json p = payload_of(r);
  CHECK(p["ell_star"] == 52);
  CHECK(p["x_star"] == 1);
  CHECK(p["prediction"]["value"] == 52);
  CHECK(p["prediction"]["kind"] == "exact-value");
  CHECK(p["agrees"] == true);
  check_kinds(p);
}

TEST_CASE("lstar ratio row and decimal p") {
  const auto r = invoke({"lstar", "--n", "41", "--p", "0.25"});
  REQUIRE(r.status == 0);
  const Json p = payload_of(r);
  CHECK(p["backend"] == "float");
  CHECK(p["p_kind"] == "decimal");
  CHECK(p["prob_kind"] == "decimal");
  CHECK(p["prediction"]["ratio"] == "4/5");
  check_kinds(p);
  const auto exact = payload_of(invoke({"lstar", "--n", "41", "--p", "0.25", "--backend", "rational"}));
  CHECK(exact["backend"] == "rational");
  CHECK(exact["ell_star"] == p["ell_star"]);
}

TEST_CASE("fourier-check --n 10 --t 0 --x 0 --p 1/2") {
  const auto r = invoke({"fourier-check", "--n", "10", "--t", "0", "--x", "0", "--p", "1/2", "--tol", "1e-12"});
  REQUIRE(r.status == 0);
  const Json p = payload_of(r);
  CHECK(p["prob_exact"] == "63/256");
  CHECK(p["prob_exact_kind"] == "rational");
  const double fourier = std::stod(p["prob_fourier"].get<std::string>());
  CHECK(std::abs(fourier - 63.0 / 256) < 1e-12);
  CHECK(p["q_asym"].is_null());
  check_kinds(p);

  const auto asym = payload_of(invoke({"fourier-check", "--n", "1001", "--t", "3", "--x", "1", "--p", "1/3"}));
  CHECK(asym["q_asym"].is_string());
  CHECK(asym["ratio"].is_string());
}

TEST_CASE("scan JSON and CSV") {
  const auto json = invoke({"scan", "--p", "1/3", "--range", "9:21:2", "--threads", "2"});
  REQUIRE(json.status == 0);
  const Json p = payload_of(json);
  CHECK(p["rows"].size() == 7);
  CHECK(p["rows"][0]["n"] == 9);
  CHECK(p["agreement_threshold"] == 9);
  check_kinds(p);

  const auto csv = invoke({"scan", "--p", "1/3", "--range", "9:13:2", "--format", "csv"});
  REQUIRE(csv.status == 0);
  CHECK(csv.out.rfind("n,p,ell_star,x_star,prob,prediction,deviation,tie_count\n", 0) == 0);
  CHECK(csv.out.find("schema_version") == std::string::npos);
}

TEST_CASE("probe-periodicity") {
  const auto r = invoke({"probe-periodicity", "--p", "1/4", "--range", "101:121"});
  REQUIRE(r.status == 0);
  const Json p = payload_of(r);
  CHECK(p["slope"] == "4/5");
  CHECK(p["rows"].size() == 11);
  check_kinds(p);
  CHECK(invoke({"probe-periodicity", "--p", "1/3", "--range", "101:121"}).status == elo::cli::kExitUsage);
  CHECK(invoke({"probe-periodicity", "--p", "1/2", "--range", "101:121"}).status == elo::cli::kExitUsage);
}

TEST_CASE("verify") {
  const auto r = invoke({"verify", "--n", "4", "--p", "1/3"});
  REQUIRE(r.status == 0);
  const Json p = payload_of(r);
  CHECK(p["pass"] == true);
  CHECK(p["violations"] == 0);
  CHECK(p["strategy"] == "grid");
  check_kinds(p);

  const auto random = payload_of(
      invoke({"verify", "--n", "5", "--p", "1/4", "--strategy", "random", "--samples", "200", "--seed", "9"}));
  CHECK(random["samples_tested"] == 200);
  CHECK(random["max_observed_kind"] == "decimal");
  CHECK(invoke({"verify", "--n", "4", "--p", "1/3", "--strategy", "bogus"}).status == elo::cli::kExitUsage);
}

TEST_CASE("decompose from a multiset and from a file") {
  const auto r = invoke({"decompose", "--multiset", "1,2,4"});
  REQUIRE(r.status == 0);
  const Json p = payload_of(r);
  CHECK(p["i"] == 3);
  CHECK(p["recombination_exact"] == true);
  CHECK(p["total_weight"] == "1");
  CHECK(p["intermediate_failures"] == 0);
  check_kinds(p);

  const std::string path = "cli_profile_test.json";
  {
    std::ofstream f(path);
    f << p["profile"].dump();
  }
  const auto again = payload_of(invoke({"decompose", "--input", path}));
  CHECK(again["terms"] == p["terms"]);

  {
    std::ofstream f(path);
    f << R"({"i": 1, "entries": [[0, 1, 1, 1, 1], [1, 1, 2, 1, 1]]})";
  }
  const auto invalid = invoke({"decompose", "--input", path});
  CHECK(invalid.status == elo::cli::kExitComputation);
  CHECK(!invalid.err.empty());
  CHECK(Json::parse(invalid.out)["exit_status"] == elo::cli::kExitComputation);
  std::remove(path.c_str());

  CHECK(invoke({"decompose"}).status == elo::cli::kExitUsage);
  CHECK(invoke({"decompose", "--multiset", "1,2", "--input", "x"}).status == elo::cli::kExitUsage);
  CHECK(invoke({"decompose", "--multiset", "1,-2"}).status == elo::cli::kExitUsage);
}

TEST_CASE("usage errors exit 2 and name the flag") {
  const auto none = invoke({});
  CHECK(none.status == elo::cli::kExitUsage);
  CHECK(none.out.empty());

  const auto bad_p = invoke({"bound", "--n", "4", "--p", "7/3"});
  CHECK(bad_p.status == elo::cli::kExitUsage);
  CHECK(bad_p.err.find("--p") != std::string::npos);

  const auto bad_range = invoke({"scan", "--p", "1/3", "--range", "9:x"});
  CHECK(bad_range.status == elo::cli::kExitUsage);
  CHECK(bad_range.err.find("--range") != std::string::npos);

  CHECK(invoke({"scan", "--p", "1/3", "--range", "9:21", "--format", "xml"}).status == elo::cli::kExitUsage);
  CHECK(invoke({"bound", "--n", "4", "--p", "1/2", "--bogus"}).status == elo::cli::kExitUsage);
  CHECK(invoke({"bound", "--p", "1/2"}).status == elo::cli::kExitUsage);
  CHECK(invoke({"fourier-check", "--n", "10", "--t", "1", "--x", "0", "--p", "1/3"}).status == elo::cli::kExitUsage);
  CHECK(invoke({"lstar", "--n", "5", "--p", "1/3", "--irrational"}).status == elo::cli::kExitUsage);
  CHECK(invoke({"bound", "--n", "5", "--p", "1/3", "--backend", "gpu"}).status == elo::cli::kExitUsage);
}

TEST_CASE("precision override from the environment") {
  setenv("ELO_PRECISION_BITS", "256", 1);
  const auto r = payload_of(invoke({"fourier-check", "--n", "10", "--t", "2", "--x", "1", "--p", "1/3"}));
  CHECK(r["precision_bits"].get<unsigned>() >= 256);
  setenv("ELO_PRECISION_BITS", "junk", 1);
  CHECK(invoke({"bound", "--n", "4", "--p", "1/2"}).status == elo::cli::kExitUsage);
  unsetenv("ELO_PRECISION_BITS");
}

TEST_CASE("payloads are byte-identical across runs") {
  for (const auto& args : std::vector<std::vector<std::string>>{
           {"bound", "--n", "9", "--p", "2/5"},
           {"lstar", "--n", "31", "--p", "0.3"},
           {"fourier-check", "--n", "21", "--t", "3", "--x", "1", "--p", "1/3"},
           {"scan", "--p", "1/4", "--range", "11:19:4", "--threads", "2"},
           {"verify", "--n", "5", "--p", "1/3", "--strategy", "random", "--samples", "100"}}) {
    const auto a = invoke(args);
    const auto b = invoke(args);
    REQUIRE(a.status == 0);
    CHECK(payload_of(a).dump() == payload_of(b).dump());
  }
}
