#include "coopfarm/scenario.hpp"

#include "coopfarm/rng.hpp"

namespace coopfarm {

std::vector<Farm> build_farms(const ScenarioConfig& config) {
  std::vector<Farm> farms;
  farms.reserve(config.farms.size());
  for (std::size_t i = 0; i < config.farms.size(); ++i) {
    const auto& spec = config.farms[i];
    farms.push_back(
        make_farm(i, spec.device_count, spec.quality, config.payoff.accuracy_model, spec.corruption));
  }
  return farms;
}

std::uint64_t training_seed(std::uint64_t scenario_seed) { return mix_seed(scenario_seed, 2); }
std::uint64_t clustering_seed(std::uint64_t scenario_seed) { return mix_seed(scenario_seed, 3); }

}  // namespace coopfarm
