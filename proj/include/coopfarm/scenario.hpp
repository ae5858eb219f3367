#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "coopfarm/core_model.hpp"
#include "coopfarm/datagen.hpp"

namespace coopfarm {

struct FarmSpec {
  int device_count = 1;
  double quality = 1.0;
  std::optional<CorruptionSpec> corruption;

  bool operator==(const FarmSpec&) const = default;
};

struct PipelineConfig {
  std::size_t k = 2;
  std::size_t restarts = 10;
  double lambda_reg = 0.01;
  std::int64_t classifier_steps = 20000;
  GenConfig gen;

  bool operator==(const PipelineConfig&) const = default;
};

struct DynamicsConfig {
  int rounds = 100;
  double epsilon = kDefaultTieTolerance;

  bool operator==(const DynamicsConfig&) const = default;
};

struct ScenarioConfig {
  std::vector<FarmSpec> farms;
  CostVector costs;
  // penalty_in_coop_cost lives here as payoff.penalty_in_coop_cost.
  PayoffParams payoff;
  PipelineConfig pipeline;
  DynamicsConfig dynamics;
  std::uint64_t seed = 0;

  bool operator==(const ScenarioConfig&) const = default;
};

// Farms with ids 0..N-1 and local accuracy from the closed form.
std::vector<Farm> build_farms(const ScenarioConfig& config);

// Seeds for the pipeline stages, all derived from the scenario seed.
std::uint64_t training_seed(std::uint64_t scenario_seed);
std::uint64_t clustering_seed(std::uint64_t scenario_seed);

}  // namespace coopfarm
