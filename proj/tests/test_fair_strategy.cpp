#include <algorithm>
#include <random>

#include "coopfarm/fair_strategy.hpp"
#include "coopfarm/scenario_io.hpp"
#include "doctest.h"
#include "oracles.hpp"

using namespace coopfarm;

namespace {

std::vector<Farm> farms_with_quality(const std::vector<double>& qs, const AccuracyModelParams& m = {}) {
  std::vector<Farm> out;
  for (std::size_t i = 0; i < qs.size(); ++i) out.push_back(make_farm(i, 10, qs[i], m));
  return out;
}

std::vector<AccuracyScore> scores(const std::vector<double>& acc) {
  std::vector<AccuracyScore> out;
  for (std::size_t i = 0; i < acc.size(); ++i) out.push_back({i, acc[i]});
  return out;
}

bool rule_holds(const FairOutcome& o) {
  const auto sizes = o.clustering.cluster_sizes();
  for (std::size_t i = 0; i < o.assignment.strategy_of.size(); ++i) {
    const bool cp = o.assignment.strategy_of[i] == Strategy::CP;
    if (cp != (sizes[o.clustering.assignment[i]] >= 2)) return false;
  }
  return true;
}

}  // namespace

TEST_CASE("two tight pairs become two blocs") {
  const auto fs = farms_with_quality({0.95, 0.94, 0.4, 0.41});
  const auto o = cluster_and_assign(fs, scores({0.95, 0.94, 0.40, 0.41}), 2, 10, 1, {});
  CHECK(o.assignment.blocs.size() == 2);
  for (auto s : o.assignment.strategy_of) CHECK(s == Strategy::CP);
  CHECK(o.assignment.blocs[0].members.size() == 2);
  CHECK(o.assignment.blocs[1].members.size() == 2);
  CHECK(rule_holds(o));
}

TEST_CASE("an outlier farm is left to play DF") {
  const auto fs = farms_with_quality({0.9, 0.9, 0.1});
  const auto o = cluster_and_assign(fs, scores({0.9, 0.9, 0.1}), 2, 10, 1, {});
  REQUIRE(o.assignment.blocs.size() == 1);
  CHECK(o.assignment.blocs[0].members == std::vector<std::size_t>{0, 1});
  CHECK(o.assignment.strategy_of[2] == Strategy::DF);
  const std::vector<Farm> pair{fs[0], fs[1]};
  CHECK(o.assignment.blocs[0].coop_accuracy == coalition_accuracy(pair, {}));
}

TEST_CASE("a single farm plays DF") {
  ScenarioConfig sc;
  sc.farms = {{10, 0.8, std::nullopt}};
  const auto o = run_fair_strategy(sc);
  CHECK(o.clustering.k == 1);
  CHECK(o.assignment.blocs.empty());
  CHECK(o.assignment.strategy_of == std::vector<Strategy>{Strategy::DF});
}

TEST_CASE("naive arm is one all-CP bloc") {
  const auto sc = load_scenario(oracle::fixture("four_farm.json"));
  const auto a = run_naive_coop(sc);
  REQUIRE(a.blocs.size() == 1);
  CHECK(a.blocs[0].members == std::vector<std::size_t>{0, 1, 2, 3});
  for (auto s : a.strategy_of) CHECK(s == Strategy::CP);

  const auto farms = build_farms(sc);
  const std::vector<Farm> high{farms[0], farms[1]};
  CHECK(a.blocs[0].coop_accuracy < coalition_accuracy(high, sc.payoff.accuracy_model));
}

TEST_CASE("four-farm fixture: fair arm pairs farms by quality") {
  const auto sc = load_scenario(oracle::fixture("four_farm.json"));
  const auto o = run_fair_strategy(sc);
  REQUIRE(o.assignment.blocs.size() == 2);
  CHECK(o.assignment.blocs[0].members == std::vector<std::size_t>{2, 3});
  CHECK(o.assignment.blocs[1].members == std::vector<std::size_t>{0, 1});
  CHECK(o.scores[0].accuracy - o.scores[2].accuracy >= 0.3);
}

TEST_CASE("naive bloc: the high-quality farms leave in round 1") {
  const auto sc = load_scenario(oracle::fixture("four_farm.json"));
  const auto trace = simulate_rounds(sc, run_naive_coop(sc), 10);
  REQUIRE(trace.size() == 10);
  CHECK(trace[0].defections_this_round == std::vector<std::size_t>{0, 1});
  CHECK(trace[1].strategy_of[0] == Strategy::DF);
  CHECK(trace[1].strategy_of[1] == Strategy::DF);
  // The low pair left behind is exactly the fair arm's low bloc, whose
  // margin is positive, so it stays.
  for (std::size_t r = 1; r < trace.size(); ++r) CHECK(trace[r].defections_this_round.empty());
  CHECK(trace[9].strategy_of[2] == Strategy::CP);
}

TEST_CASE("penalty is charged once on defection") {
  const auto sc = load_scenario(oracle::fixture("four_farm.json"));
  const auto farms = build_farms(sc);
  const auto trace = simulate_rounds(sc, run_naive_coop(sc), 3);
  const double grand = coalition_accuracy(farms, sc.payoff.accuracy_model);
  CHECK(trace[0].payoffs[0] ==
        doctest::Approx(payoff_cp(grand, sc.costs, sc.payoff) - sc.costs.penalty).epsilon(1e-13));
  CHECK(trace[1].payoffs[0] == doctest::Approx(payoff_df(farms[0].local_accuracy, sc.costs, sc.payoff)));
}

TEST_CASE("fair blocs on the fixtures never lose a member") {
  for (const char* name : {"four_farm.json", "eight_farm.json"}) {
    const auto sc = load_scenario(oracle::fixture(name));
    const auto o = run_fair_strategy(sc);
    const auto trace = simulate_rounds(sc, o.assignment, 100);
    for (const auto& t : trace) CHECK(t.defections_this_round.empty());
  }
}

TEST_CASE("all-DF start is a fixed point") {
  const auto fs = farms_with_quality({0.2, 0.5, 0.9});
  BlocAssignment none;
  none.strategy_of.assign(3, Strategy::DF);
  const auto trace = simulate_rounds(fs, none, {0.1, 0.1, 0.1, 0.1, 0.1, 0.1}, {}, 5);
  for (const auto& t : trace) {
    CHECK(t.defections_this_round.empty());
    CHECK(t.payoffs == trace[0].payoffs);
    CHECK(t.strategy_of == none.strategy_of);
  }
}

TEST_CASE("dynamics are rational and monotone on random blocs") {
  std::mt19937_64 gen(44);
  std::uniform_real_distribution<double> u(0, 1);
  for (int t = 0; t < 100; ++t) {
    const std::size_t n = 2 + gen() % 8;
    std::vector<double> qs(n);
    for (auto& q : qs) q = u(gen);
    PayoffParams p;
    p.benefit_coefficient = 10 * u(gen);
    const double c = 0.2 * u(gen);
    const CostVector costs{c, c, c, c, c, 0.3 * u(gen)};
    const auto fs = farms_with_quality(qs, p.accuracy_model);
    const auto a = run_naive_coop(fs, p.accuracy_model);
    const auto trace = simulate_rounds(fs, a, costs, p, static_cast<int>(n) + 3);

    std::size_t changes = 0;
    for (std::size_t r = 0; r < trace.size(); ++r) {
      const auto& tr = trace[r];
      std::vector<std::size_t> members;
      for (std::size_t i = 0; i < n; ++i)
        if (tr.strategy_of[i] == Strategy::CP) members.push_back(i);
      if (!members.empty()) {
        std::vector<Farm> bloc;
        for (auto i : members) bloc.push_back(fs[i]);
        const double in_bloc = payoff_cp(coalition_accuracy(bloc, p.accuracy_model), costs, p);
        for (auto i : members) {
          const bool leaves = std::find(tr.defections_this_round.begin(), tr.defections_this_round.end(), i) !=
                              tr.defections_this_round.end();
          const double solo = payoff_df(fs[i].local_accuracy, costs, p);
          if (!leaves) CHECK(solo <= in_bloc + kDefaultTieTolerance);
          else CHECK(solo > in_bloc + kDefaultTieTolerance);
        }
      }
      if (r > 0)
        for (std::size_t i = 0; i < n; ++i)
          if (trace[r - 1].strategy_of[i] == Strategy::DF) CHECK(tr.strategy_of[i] == Strategy::DF);
      changes += !tr.defections_this_round.empty();
    }
    CHECK(changes <= n);
    CHECK(trace.back().defections_this_round.empty());
  }
}

TEST_CASE("assignment rule holds across random pipelines") {
  std::mt19937_64 gen(3);
  std::uniform_real_distribution<double> u(0, 1);
  for (int t = 0; t < 20; ++t) {
    ScenarioConfig sc;
    sc.seed = gen();
    const std::size_t n = 1 + gen() % 7;
    for (std::size_t i = 0; i < n; ++i) sc.farms.push_back({1 + static_cast<int>(gen() % 5), u(gen), std::nullopt});
    sc.pipeline.k = 1 + gen() % 3;
    sc.pipeline.gen.records_per_device = 20;
    sc.pipeline.gen.golden_records = 400;
    sc.pipeline.classifier_steps = 4000;
    CHECK(rule_holds(run_fair_strategy(sc)));
  }
}

TEST_CASE("fair pipeline is deterministic and schedule-independent") {
  const auto sc = load_scenario(oracle::fixture("mixed_threats.json"));
  const auto a = run_fair_strategy(sc, Execution::serial);
  CHECK(a == run_fair_strategy(sc, Execution::parallel));
  CHECK(a == run_fair_strategy(sc, Execution::parallel));
}

TEST_CASE("bad inputs") {
  const auto fs = farms_with_quality({0.5, 0.6});
  CHECK_THROWS_AS(cluster_and_assign(fs, scores({0.5}), 2, 1, 1, {}), std::invalid_argument);
  CHECK_THROWS_AS(run_naive_coop(std::span<const Farm>{}, {}), std::invalid_argument);
  BlocAssignment short_one;
  short_one.strategy_of = {Strategy::CP};
  CHECK_THROWS_AS(simulate_rounds(fs, short_one, {}, {}, 3), std::invalid_argument);
  CHECK_THROWS_AS(simulate_rounds(fs, run_naive_coop(fs, {}), {}, {}, 0), std::invalid_argument);
}
