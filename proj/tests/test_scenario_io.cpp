#include <fstream>

#include "coopfarm/scenario_io.hpp"
#include "doctest.h"
#include "oracles.hpp"

using namespace coopfarm;

namespace {

ScenarioErrorKind kind_of(const std::string& text) {
  try {
    parse_scenario(text);
  } catch (const ScenarioError& e) {
    return e.kind();
  }
  FAIL("expected a ScenarioError");
  return ScenarioErrorKind::parse;
}

std::string path_of(const std::string& text) {
  try {
    parse_scenario(text);
  } catch (const ScenarioError& e) {
    return e.field_path();
  }
  return "<no error>";
}

SimulationReport full_report() {
  const auto sc = load_scenario(oracle::fixture("four_farm.json"));
  SimulationReport r;
  r.command = "simulate";
  r.arm = "fair";
  r.scenario = sc;
  r.farms = build_farms(sc);
  auto o = run_fair_strategy(sc);
  r.scores = o.scores;
  r.clustering = o.clustering;
  r.assignment = o.assignment;
  r.equilibrium = analyze_equilibria(r.farms, sc.costs, sc.payoff);
  r.rounds = simulate_rounds(sc, *r.assignment, 5);
  return r;
}

}  // namespace

TEST_CASE("minimal scenario takes the defaults") {
  const auto sc = load_scenario(oracle::fixture("minimal.json"));
  REQUIRE(sc.farms.size() == 1);
  CHECK(sc.farms[0].device_count == 4);
  CHECK(sc.farms[0].quality == 0.8);
  ScenarioConfig defaults;
  CHECK(sc.costs == defaults.costs);
  CHECK(sc.payoff == defaults.payoff);
  CHECK(sc.pipeline == defaults.pipeline);
  CHECK(sc.dynamics == defaults.dynamics);
  CHECK(sc.seed == 0);
}

TEST_CASE("scenario errors are classified and located") {
  CHECK(kind_of(R"({"farms": [{"device_count": 1, "quality": 1.5}]})") == ScenarioErrorKind::validation);
  CHECK(path_of(R"({"farms": [{"device_count": 1, "quality": 1.5}]})") == "farms[0].quality");
  CHECK(path_of(R"({"farms": [{"device_count": 1, "quality": 0.5}, {"device_count": 0, "quality": 0.5}]})") ==
        "farms[1].device_count");
  CHECK(kind_of(R"({"farms": [], "farms": []})") == ScenarioErrorKind::parse);
  CHECK(kind_of(R"({"farms": [{"device_count": 1, "quality": 0.5, "quality": 0.6}]})") == ScenarioErrorKind::parse);
  CHECK(kind_of("{not json") == ScenarioErrorKind::parse);
  CHECK(kind_of(R"({"farms": [{"device_count": 1, "quality": 0.5}], "bogus": 1})") == ScenarioErrorKind::validation);
  CHECK(kind_of(R"({"farms": []})") == ScenarioErrorKind::validation);
  CHECK(kind_of(R"({"version": "coopfarm-scenario/9", "farms": [{"device_count": 1, "quality": 0.5}]})") ==
        ScenarioErrorKind::validation);
  CHECK(path_of(R"({"farms": [{"device_count": 1, "quality": 0.5}], "payoff": {"a_min": 0.9, "a_max": 0.5}})").rfind("payoff", 0) == 0);
  CHECK(path_of(R"({"farms": [{"device_count": 1, "quality": 0.5, "corruption": {"mode": "melt", "rate": 0.1}}]})") ==
        "farms[0].corruption.mode");

  try {
    load_scenario("/nonexistent/scenario.json");
    FAIL("expected missing file");
  } catch (const ScenarioError& e) {
    CHECK(e.kind() == ScenarioErrorKind::missing_file);
  }
}

TEST_CASE("scenario round-trips through canonical JSON") {
  for (const char* name : {"minimal.json", "two_farm.json", "four_farm.json", "eight_farm.json", "synergy.json",
                           "mixed_threats.json"}) {
    const auto sc = load_scenario(oracle::fixture(name));
    const auto text = scenario_to_json(sc);
    CHECK(parse_scenario(text) == sc);
    CHECK(scenario_to_json(parse_scenario(text)) == text);
  }
}

TEST_CASE("awkward doubles survive the round trip") {
  ScenarioConfig sc;
  sc.farms = {{3, 0.1 + 0.2, std::nullopt}, {5, 1.0 / 3.0, CorruptionSpec{CorruptionMode::label_flip, 5e-324}}};
  sc.costs.membership = 1e-300;
  sc.payoff.benefit_coefficient = 123456789.123456789;
  sc.seed = 18446744073709551615ull;
  CHECK(parse_scenario(scenario_to_json(sc)) == sc);
}

TEST_CASE("reports round-trip and write identically") {
  const auto r = full_report();
  const auto text = report_to_json(r);
  CHECK(parse_report(text) == r);

  const auto dir = oracle::scratch_dir("report");
  const auto a = write_report(r, dir / "a.json", true);
  const auto b = write_report(r, dir / "b.json", true);
  CHECK(read_text_file(a.json) == read_text_file(b.json));
  REQUIRE(a.scores_csv.has_value());
  REQUIRE(a.rounds_csv.has_value());
  CHECK(a.scores_csv->filename() == "a_scores.csv");
  CHECK(read_text_file(*a.rounds_csv) == read_text_file(*b.rounds_csv));
  CHECK(load_report(a.json) == r);
  std::filesystem::remove_all(dir);
}

TEST_CASE("a report without rounds keeps an empty array") {
  SimulationReport r;
  r.command = "naive";
  r.arm = "naive";
  r.scenario = load_scenario(oracle::fixture("minimal.json"));
  r.farms = build_farms(r.scenario);
  r.assignment = run_naive_coop(r.farms, r.scenario.payoff.accuracy_model);
  const auto text = report_to_json(r);
  CHECK(text.find("\"rounds\": []") != std::string::npos);
  CHECK(parse_report(text) == r);
  CHECK(rounds_csv(r).find('\n') == rounds_csv(r).size() - 1);  // header only
}

TEST_CASE("large games keep only the two extreme witnesses") {
  PayoffParams p;
  std::vector<Farm> fs;
  for (std::size_t i = 0; i < 13; ++i) fs.push_back(make_farm(i, 5, 0.5, p.accuracy_model));
  SimulationReport r;
  r.command = "equilibrium";
  r.scenario.farms.assign(13, FarmSpec{5, 0.5, std::nullopt});
  r.farms = fs;
  r.equilibrium = analyze_equilibria(fs, {0.1, 0.1, 0.1, 0.1, 0.1, 0}, p);
  const auto back = parse_report(report_to_json(r));
  REQUIRE(back.equilibrium.has_value());
  CHECK(back.equilibrium->report.nash_masks == r.equilibrium->report.nash_masks);
  CHECK(back.equilibrium->report.witness_deviations.size() <= 2);
  CHECK(report_to_json(back) == report_to_json(r));
}

TEST_CASE("report parse errors") {
  CHECK_THROWS_AS(parse_report("{}"), ScenarioError);
  CHECK_THROWS_AS(parse_report(R"({"version": "coopfarm-report/1"})"), ScenarioError);
  auto text = report_to_json(full_report());
  text.replace(text.find("coopfarm-report/1"), 17, "coopfarm-report/0");
  CHECK_THROWS_AS(parse_report(text), ScenarioError);
}

TEST_CASE("writing into a missing directory is an I/O error") {
  CHECK_THROWS_AS(write_text_file("/nonexistent/dir/file.json", "x"), IoError);
  CHECK_THROWS_AS(read_text_file("/nonexistent/file.json"), IoError);
}
