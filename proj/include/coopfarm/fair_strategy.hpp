#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "coopfarm/core_model.hpp"
#include "coopfarm/execution.hpp"
#include "coopfarm/quality_ml.hpp"
#include "coopfarm/scenario.hpp"

namespace coopfarm {

struct Bloc {
  std::size_t cluster = 0;
  std::vector<std::size_t> members;  // ascending farm ids
  double coop_accuracy = 0.0;

  bool operator==(const Bloc&) const = default;
};

struct BlocAssignment {
  std::vector<Bloc> blocs;
  std::vector<Strategy> strategy_of;

  bool operator==(const BlocAssignment&) const = default;
};

struct FairOutcome {
  std::vector<AccuracyScore> scores;
  Clustering clustering;
  BlocAssignment assignment;

  bool operator==(const FairOutcome&) const = default;
};

struct RoundTrace {
  int round = 0;
  // Strategies in effect during the round.
  std::vector<Strategy> strategy_of;
  // Realized payoffs; a farm leaving this round also pays the penalty.
  std::vector<double> payoffs;
  // Farms that switch to DF at the end of the round.
  std::vector<std::size_t> defections_this_round;

  bool operator==(const RoundTrace&) const = default;
};

// Every cluster with two or more members becomes one bloc of CP farms;
// farms alone in their cluster play DF.
BlocAssignment assign_blocs(std::span<const Farm> farms, const Clustering& clustering,
                            const AccuracyModelParams& params);

// Clusters the given accuracy scores and assigns blocs. k is capped at the
// number of distinct scores.
FairOutcome cluster_and_assign(std::span<const Farm> farms, std::span<const AccuracyScore> scores,
                               std::size_t k, std::size_t restarts, std::uint64_t seed,
                               const AccuracyModelParams& params,
                               Execution exec = Execution::parallel);

// generate data -> train reference classifier on the golden fixture ->
// score every farm -> cluster accuracies -> assign blocs.
FairOutcome run_fair_strategy(const ScenarioConfig& scenario, Execution exec = Execution::parallel);

// Comparison arm: one bloc holding every farm, all CP.
BlocAssignment run_naive_coop(std::span<const Farm> farms, const AccuracyModelParams& params);
BlocAssignment run_naive_coop(const ScenarioConfig& scenario);

// Repeated rounds. Each round every CP farm compares its in-bloc payoff
// with going alone; those strictly better off alone (by more than epsilon)
// leave together at the round's end and pay the penalty once. Leaving is
// permanent. Bloc accuracy follows the remaining members.
std::vector<RoundTrace> simulate_rounds(std::span<const Farm> farms, const BlocAssignment& assignment,
                                        const CostVector& costs, const PayoffParams& params,
                                        int rounds, double epsilon = kDefaultTieTolerance);

std::vector<RoundTrace> simulate_rounds(const ScenarioConfig& scenario,
                                        const BlocAssignment& assignment, int rounds);

}  // namespace coopfarm
