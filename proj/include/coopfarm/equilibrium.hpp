#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "coopfarm/core_model.hpp"
#include "coopfarm/execution.hpp"

namespace coopfarm {

inline constexpr std::size_t kMaxEnumerationFarms = 20;

// A strictly improving unilateral change: farm `farm` flipping its strategy
// raises its payoff from old_payoff to new_payoff.
struct Deviation {
  std::size_t farm = 0;
  double old_payoff = 0.0;
  double new_payoff = 0.0;

  bool operator==(const Deviation&) const = default;
};

struct WitnessedProfile {
  std::uint32_t profile_mask = 0;
  Deviation deviation;

  bool operator==(const WitnessedProfile&) const = default;
};

struct NashCheck {
  bool is_nash = true;
  std::optional<Deviation> witness;
};

struct EquilibriumReport {
  std::size_t farm_count = 0;
  std::uint64_t profiles_evaluated = 0;
  // Cooperator masks (bit i = farm i plays CP), ascending.
  std::vector<std::uint32_t> nash_masks;
  bool all_df_is_ne = false;
  bool all_cp_is_ne = false;
  // One entry per non-equilibrium profile, ascending mask order. Together
  // with nash_masks this covers every profile exactly once.
  std::vector<WitnessedProfile> witness_deviations;

  std::vector<StrategyProfile> nash_profiles() const;

  bool operator==(const EquilibriumReport&) const = default;
};

struct Theorem1Check {
  bool condition_met = false;  // every farm: coop cost >= c^plocal + B(a({i}) - a_i)
  bool holds = false;          // All-DF is a weak NE
  bool implication_ok() const { return !condition_met || holds; }

  bool operator==(const Theorem1Check&) const = default;
};

struct Theorem2Counterexample {
  double benefit_coefficient = 0.0;
  double coop_cost = 0.0;
  double local_compute = 0.0;
  double grand_coalition_accuracy = 0.0;

  bool operator==(const Theorem2Counterexample&) const = default;
};

struct Theorem2Check {
  bool all_cp_is_ne = false;
  bool claim_holds = false;  // All-CP is not an NE
  // u_i(DF) - u_i(CP | All-CP) per farm.
  std::vector<double> margins;
  std::optional<Theorem2Counterexample> counterexample;

  bool operator==(const Theorem2Check&) const = default;
};

struct EquilibriumAnalysis {
  EquilibriumReport report;
  Theorem1Check theorem1;
  Theorem2Check theorem2;

  bool operator==(const EquilibriumAnalysis&) const = default;
};

// Weak Nash test: no single farm can raise its own payoff by more than
// epsilon by flipping its strategy. The witness is the lowest-index farm
// with an improving flip.
NashCheck is_nash(std::span<const Farm> farms, const StrategyProfile& profile,
                  const CostVector& costs, const PayoffParams& params,
                  double epsilon = kDefaultTieTolerance);

// Evaluates every one of the 2^N profiles. Throws std::length_error
// ("profile space too large") when N exceeds kMaxEnumerationFarms.
EquilibriumReport enumerate_equilibria(std::span<const Farm> farms, const CostVector& costs,
                                       const PayoffParams& params,
                                       double epsilon = kDefaultTieTolerance,
                                       Execution exec = Execution::parallel);

Theorem1Check check_theorem1(std::span<const Farm> farms, const CostVector& costs,
                             const PayoffParams& params, double epsilon = kDefaultTieTolerance);

Theorem2Check check_theorem2(std::span<const Farm> farms, const CostVector& costs,
                             const PayoffParams& params, double epsilon = kDefaultTieTolerance);

EquilibriumAnalysis analyze_equilibria(std::span<const Farm> farms, const CostVector& costs,
                                       const PayoffParams& params,
                                       double epsilon = kDefaultTieTolerance,
                                       Execution exec = Execution::parallel);

}  // namespace coopfarm
