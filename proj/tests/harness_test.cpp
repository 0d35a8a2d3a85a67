#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "census/harness.hpp"

using namespace census;

namespace {

std::string slurp(const std::string& path) {
  std::ifstream f(path);
  std::ostringstream os;
  os << f.rdbuf();
  return os.str();
}

}  // namespace

TEST_CASE("fit recovers an exact constant") {
  std::vector<std::pair<double, double>> pts;
  for (const double n : {256.0, 1024.0, 4096.0}) pts.emplace_back(n, 3 * n * std::log2(n));
  const auto fit = fit_complexity(pts, ComplexityForm::n_log_n);
  CHECK(fit.c == doctest::Approx(3.0));
  for (const double r : fit.residuals) CHECK(std::abs(r) < 1e-6);
  for (const double r : fit.ratios) CHECK(r == doctest::Approx(3.0));
}

TEST_CASE("fit needs two distinct population sizes") {
  const std::vector<std::pair<double, double>> one{{256.0, 10.0}};
  CHECK_THROWS_AS(fit_complexity(one, ComplexityForm::n_log_n), std::invalid_argument);
  const std::vector<std::pair<double, double>> same{{256.0, 10.0}, {256.0, 12.0}};
  CHECK_THROWS_AS(fit_complexity(same, ComplexityForm::n_log_n), std::invalid_argument);
}

TEST_CASE("form values") {
  CHECK(form_value(ComplexityForm::n_log_n, 1024) == doctest::Approx(10240));
  CHECK(form_value(ComplexityForm::n_log2_n, 1024) == doctest::Approx(102400));
  CHECK(form_value(ComplexityForm::n2_log_n, 16) == doctest::Approx(1024));
}

TEST_CASE("percentile uses nearest rank") {
  CHECK(percentile({5, 1, 3, 2, 4}, 0.5) == 3);
  CHECK(percentile({5, 1, 3, 2, 4}, 0.95) == 5);
  CHECK(percentile({7}, 0.95) == 7);
  CHECK_THROWS(percentile({}, 0.5));
}

TEST_CASE("five approximate runs give a success rate in steps of 0.2") {
  ExperimentSpec spec;
  spec.protocol = "approximate";
  spec.ns = {256};
  spec.seeds = seed_range(5);
  const auto r = sweep(spec);
  REQUIRE(r.runs.size() == 5);
  REQUIRE(r.aggregates.size() == 1);
  const double steps = r.aggregates[0].success_rate / 0.2;
  CHECK(std::abs(steps - std::round(steps)) < 1e-9);
}

TEST_CASE("backup-exact over n = 2..16 always succeeds") {
  const auto spec = parse_config("protocol = backup-exact\nn = 2..16\nseeds = 3\n");
  const auto r = sweep(spec);
  CHECK(r.aggregates.size() == 15);
  for (const auto& a : r.aggregates) CHECK(a.success_rate == 1.0);
}

TEST_CASE("broadcast times scale as n ln n") {
  ExperimentSpec spec;
  spec.protocol = "broadcast";
  spec.ns = {256, 1024, 4096};
  spec.seeds = seed_range(30);
  const auto r = sweep(spec);
  for (const auto& a : r.aggregates) {
    REQUIRE(a.median_tc.has_value());
    const double ratio = *a.median_tc / (a.n * std::log(static_cast<double>(a.n)));
    CHECK(ratio >= 0.5);
    CHECK(ratio <= 4.0);
  }
}

TEST_CASE("backup-exact times track n^2 log n within a factor of four") {
  ExperimentSpec spec;
  spec.protocol = "backup-exact";
  spec.ns = {16, 32, 64};
  spec.seeds = seed_range(20);
  const auto r = sweep(spec);
  std::vector<double> ratios;
  for (const auto& a : r.aggregates) ratios.push_back(*a.median_tc / form_value(ComplexityForm::n2_log_n, a.n));
  const auto [lo, hi] = std::minmax_element(ratios.begin(), ratios.end());
  CHECK(*hi / *lo <= 4.0);
}

TEST_CASE("CSV and JSON schemas") {
  ExperimentSpec spec;
  spec.protocol = "count-exact";
  spec.ns = {64, 32};
  spec.seeds = {3, 1};
  const auto r = sweep(spec);
  const auto csv = to_csv(r);
  std::istringstream in(csv);
  std::string line;
  std::getline(in, line);
  CHECK(line == "protocol,n,seed,profile,correct,t_convergence,t_stabilization,distinct_states,error_raised");
  std::vector<std::string> rows;
  while (std::getline(in, line)) rows.push_back(line);
  REQUIRE(rows.size() == 4);
  CHECK(rows[0].starts_with("count-exact,32,1,desk,"));
  CHECK(rows[3].starts_with("count-exact,64,3,desk,"));

  const auto j = nlohmann::json::parse(to_json(r));
  REQUIRE(j.is_array());
  REQUIRE(j.size() == 2);
  std::vector<std::string> keys;
  for (const auto& [k, v] : j[0].items()) keys.push_back(k);
  std::sort(keys.begin(), keys.end());
  CHECK(keys == std::vector<std::string>{"fitted_c", "form", "median_tc", "n", "p95_tc", "protocol", "success_rate"});
  CHECK(j[0]["n"] == 32);
  CHECK(j[0]["form"] == "n log n");
}

TEST_CASE("empty results emit a header-only CSV and an empty JSON array") {
  const ExperimentResult empty;
  CHECK(to_csv(empty) == std::string(kCsvHeader) + "\n");
  CHECK(nlohmann::json::parse(to_json(empty)) == nlohmann::json::array());
}

TEST_CASE("identical specs produce byte-identical files") {
  ExperimentSpec spec;
  spec.protocol = "approximate-stable";
  spec.ns = {64, 128};
  spec.seeds = seed_range(3);
  const std::string dir = CENSUS_TEST_TMP;
  spec.outputs = {dir + "/a.csv", dir + "/a.json"};
  sweep(spec, 2);
  const auto csv1 = slurp(dir + "/a.csv");
  const auto json1 = slurp(dir + "/a.json");
  sweep(spec, 1);
  CHECK(slurp(dir + "/a.csv") == csv1);
  CHECK(slurp(dir + "/a.json") == json1);
  CHECK_FALSE(csv1.empty());
}

TEST_CASE("configuration errors are reported before any run") {
  ExperimentSpec spec;
  spec.protocol = "no-such-protocol";
  spec.ns = {16};
  spec.seeds = {0};
  CHECK_THROWS_AS(validate(spec), std::invalid_argument);
  spec.protocol = "approximate";
  spec.overrides["no_such_key"] = "3";
  CHECK_THROWS_AS(validate(spec), std::invalid_argument);
  spec.overrides.clear();
  spec.ns = {1};
  CHECK_THROWS_AS(validate(spec), std::invalid_argument);
  spec.ns = {16};
  spec.fault = "corrupt-k:x@pre-refine";
  CHECK_THROWS_AS(validate(spec), std::invalid_argument);
  spec.fault = "";
  spec.outputs = {"out.txt"};
  CHECK_THROWS_AS(validate(spec), std::invalid_argument);
  spec.outputs.clear();
  spec.ns = {512};
  spec.trace = "t.ndjson";
  CHECK_THROWS_AS(validate(spec), std::invalid_argument);
}

TEST_CASE("config parsing") {
  const auto spec = parse_config(
      "# sample\n"
      "protocol = count-exact-stable\n"
      "n = 64, 128..130\n"
      "seed = 4, 9\n"
      "profile = paper\n"
      "override = clock_modulus=60, outer_modulus=30\n"
      "fault = dup-leader@post-election\n"
      "out = a.csv, b.json\n");
  CHECK(spec.protocol == "count-exact-stable");
  CHECK(spec.ns == std::vector<std::uint32_t>{64, 128, 129, 130});
  CHECK(spec.seeds == std::vector<std::uint64_t>{4, 9});
  CHECK(spec.profile == "paper");
  CHECK(spec.overrides.at("clock_modulus") == "60");
  CHECK(spec.overrides.at("outer_modulus") == "30");
  CHECK(spec.fault == "dup-leader@post-election");
  CHECK(spec.outputs == std::vector<std::string>{"a.csv", "b.json"});
  CHECK_THROWS_AS(parse_config("colour = blue\n"), std::invalid_argument);
  CHECK_THROWS_AS(parse_config("protocol broadcast\n"), std::invalid_argument);
  CHECK_THROWS_AS(parse_config("n = ten\n"), std::invalid_argument);
}

TEST_CASE("fault descriptors round-trip") {
  for (const char* text : {"corrupt-k:-3@pre-errordetect", "corrupt-k:5@pre-refine", "dup-leader@post-election"}) {
    CHECK(to_string(parse_fault(text)) == text);
  }
  CHECK(parse_fault("") == Fault{});
  CHECK_THROWS_AS(parse_fault("corrupt-k:1@later"), std::invalid_argument);
  CHECK_THROWS_AS(parse_fault("flip-coin"), std::invalid_argument);
}

TEST_CASE("every registered protocol runs a small cell") {
  for (const auto& p : protocols()) {
    RunLimits limits;
    limits.max_interactions = default_max_interactions(p.name, 32);
    const auto m = run_cell(p.name, 32, 1, desk_profile(), Fault{}, limits);
    CAPTURE(p.name);
    if (p.name != "clock") CHECK(m.correct);
  }
}
