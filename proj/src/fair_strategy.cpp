#include "coopfarm/fair_strategy.hpp"

#include <algorithm>
#include <stdexcept>

namespace coopfarm {

namespace {

std::vector<Farm> select(std::span<const Farm> farms, std::span<const std::size_t> ids) {
  std::vector<Farm> out;
  out.reserve(ids.size());
  for (auto id : ids) out.push_back(farms[id]);
  return out;
}

double bloc_accuracy(std::span<const Farm> farms, std::span<const std::size_t> members,
                     const AccuracyModelParams& params) {
  const auto chosen = select(farms, members);
  return coalition_accuracy(chosen, params);
}

}  // namespace

BlocAssignment assign_blocs(std::span<const Farm> farms, const Clustering& clustering,
                            const AccuracyModelParams& params) {
  if (clustering.assignment.size() != farms.size())
    throw std::invalid_argument("clustering does not cover every farm");

  std::vector<std::vector<std::size_t>> members(clustering.k);
  for (std::size_t i = 0; i < farms.size(); ++i) members.at(clustering.assignment[i]).push_back(i);

  BlocAssignment out;
  out.strategy_of.assign(farms.size(), Strategy::DF);
  for (std::size_t c = 0; c < clustering.k; ++c) {
    if (members[c].size() < 2) continue;
    for (auto id : members[c]) out.strategy_of[id] = Strategy::CP;
    out.blocs.push_back({c, members[c], bloc_accuracy(farms, members[c], params)});
  }
  return out;
}

FairOutcome cluster_and_assign(std::span<const Farm> farms, std::span<const AccuracyScore> scores,
                               std::size_t k, std::size_t restarts, std::uint64_t seed,
                               const AccuracyModelParams& params, Execution exec) {
  if (farms.empty()) throw std::invalid_argument("scenario has no farms");
  if (scores.size() != farms.size()) throw std::invalid_argument("one score per farm required");

  std::vector<double> points;
  points.reserve(scores.size());
  for (const auto& s : scores) points.push_back(s.accuracy);

  auto distinct = points;
  std::sort(distinct.begin(), distinct.end());
  const auto n_distinct =
      static_cast<std::size_t>(std::unique(distinct.begin(), distinct.end()) - distinct.begin());

  FairOutcome out;
  out.scores.assign(scores.begin(), scores.end());
  out.clustering = kmeans_1d(points, std::min(k, n_distinct), restarts, seed, exec);
  out.assignment = assign_blocs(farms, out.clustering, params);
  return out;
}

FairOutcome run_fair_strategy(const ScenarioConfig& scenario, Execution exec) {
  const auto farms = build_farms(scenario);
  const auto& pipe = scenario.pipeline;

  const auto datasets = generate_datasets(farms, pipe.gen, scenario.seed, exec);
  const auto golden = golden_fixture(pipe.gen, scenario.seed);
  const auto model = train_classifier(golden, pipe.lambda_reg, pipe.classifier_steps,
                                      training_seed(scenario.seed));
  const auto scores = score_farms(model, datasets, exec);
  return cluster_and_assign(farms, scores, pipe.k, pipe.restarts, clustering_seed(scenario.seed),
                            scenario.payoff.accuracy_model, exec);
}

BlocAssignment run_naive_coop(std::span<const Farm> farms, const AccuracyModelParams& params) {
  if (farms.empty()) throw std::invalid_argument("scenario has no farms");
  BlocAssignment out;
  out.strategy_of.assign(farms.size(), Strategy::CP);
  Bloc bloc;
  bloc.members.resize(farms.size());
  for (std::size_t i = 0; i < farms.size(); ++i) bloc.members[i] = i;
  bloc.coop_accuracy = coalition_accuracy(farms, params);
  out.blocs.push_back(std::move(bloc));
  return out;
}

BlocAssignment run_naive_coop(const ScenarioConfig& scenario) {
  const auto farms = build_farms(scenario);
  return run_naive_coop(farms, scenario.payoff.accuracy_model);
}

std::vector<RoundTrace> simulate_rounds(std::span<const Farm> farms, const BlocAssignment& assignment,
                                        const CostVector& costs, const PayoffParams& params,
                                        int rounds, double epsilon) {
  if (rounds < 1) throw std::invalid_argument("rounds: must be >= 1");
  if (assignment.strategy_of.size() != farms.size())
    throw std::invalid_argument("assignment does not cover every farm");

  std::vector<Strategy> strategy = assignment.strategy_of;
  std::vector<std::vector<std::size_t>> blocs;
  for (const auto& b : assignment.blocs) blocs.push_back(b.members);

  std::vector<double> solo(farms.size());
  for (std::size_t i = 0; i < farms.size(); ++i) solo[i] = payoff_df(farms[i].local_accuracy, costs, params);

  std::vector<RoundTrace> trace;
  trace.reserve(static_cast<std::size_t>(rounds));
  for (int r = 1; r <= rounds; ++r) {
    RoundTrace t;
    t.round = r;
    t.strategy_of = strategy;
    t.payoffs = solo;

    for (const auto& members : blocs) {
      if (members.empty()) continue;
      const double in_bloc = payoff_cp(bloc_accuracy(farms, members, params.accuracy_model), costs, params);
      for (auto id : members) {
        t.payoffs[id] = in_bloc;
        if (solo[id] > in_bloc + epsilon) {
          t.defections_this_round.push_back(id);
          t.payoffs[id] -= costs.penalty;
        }
      }
    }
    std::sort(t.defections_this_round.begin(), t.defections_this_round.end());

    for (auto id : t.defections_this_round) strategy[id] = Strategy::DF;
    for (auto& members : blocs)
      std::erase_if(members, [&](std::size_t id) { return strategy[id] == Strategy::DF; });

    trace.push_back(std::move(t));
  }
  return trace;
}

std::vector<RoundTrace> simulate_rounds(const ScenarioConfig& scenario,
                                        const BlocAssignment& assignment, int rounds) {
  const auto farms = build_farms(scenario);
  return simulate_rounds(farms, assignment, scenario.costs, scenario.payoff, rounds,
                         scenario.dynamics.epsilon);
}

}  // namespace coopfarm
