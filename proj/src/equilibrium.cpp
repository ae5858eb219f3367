#include "coopfarm/equilibrium.hpp"

#include <bit>
#include <cmath>
#include <stdexcept>

namespace coopfarm {

namespace {

constexpr std::uint32_t bit(std::size_t i) { return std::uint32_t{1} << i; }

// Accuracy of the coalition encoded by every mask. Members are visited in
// ascending index order so values match coalition_accuracy() on the same set.
std::vector<double> coalition_accuracy_table(std::span<const Farm> farms,
                                             const AccuracyModelParams& params, Execution exec) {
  const std::size_t n = farms.size();
  const std::int64_t count = std::int64_t{1} << n;
  std::vector<double> table(static_cast<std::size_t>(count), 0.0);

  auto fill = [&](std::int64_t m) {
    const auto mask = static_cast<std::uint32_t>(m);
    const int members = std::popcount(mask);
    if (members == 0) return;
    if (members == 1) {
      table[m] = farms[std::countr_zero(mask)].local_accuracy;
      return;
    }
    double volume = 0.0;
    double weighted_quality = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      if (!(mask & bit(i))) continue;
      volume += farms[i].device_count;
      weighted_quality += farms[i].device_count * farms[i].quality;
    }
    const double mean_quality = weighted_quality / volume;
    const double saturation = -std::expm1(-volume / params.volume_scale);
    table[m] = params.a_min + (params.a_max - params.a_min) * mean_quality * saturation;
  };

  if (exec == Execution::parallel) {
#pragma omp parallel for schedule(static)
    for (std::int64_t m = 0; m < count; ++m) fill(m);
  } else {
    for (std::int64_t m = 0; m < count; ++m) fill(m);
  }
  return table;
}

struct ProfileOutcome {
  std::int32_t deviator = -1;  // -1 means the profile is a weak NE
  double old_payoff = 0.0;
  double new_payoff = 0.0;
};

}  // namespace

std::vector<StrategyProfile> EquilibriumReport::nash_profiles() const {
  std::vector<StrategyProfile> out;
  out.reserve(nash_masks.size());
  for (auto m : nash_masks) out.push_back(StrategyProfile::from_mask(m, farm_count));
  return out;
}

NashCheck is_nash(std::span<const Farm> farms, const StrategyProfile& profile,
                  const CostVector& costs, const PayoffParams& params, double epsilon) {
  if (farms.empty()) throw std::invalid_argument("is_nash requires at least one farm");
  const auto current = profile_payoffs(farms, profile, costs, params);
  for (std::size_t i = 0; i < farms.size(); ++i) {
    const auto deviated = profile_payoffs(farms, profile.flipped(i), costs, params);
    if (deviated[i] > current[i] + epsilon) {
      return {false, Deviation{i, current[i], deviated[i]}};
    }
  }
  return {true, std::nullopt};
}

EquilibriumReport enumerate_equilibria(std::span<const Farm> farms, const CostVector& costs,
                                       const PayoffParams& params, double epsilon,
                                       Execution exec) {
  const std::size_t n = farms.size();
  if (n == 0) throw std::invalid_argument("enumerate_equilibria requires at least one farm");
  if (n > kMaxEnumerationFarms) throw std::length_error("profile space too large");

  const auto acc = coalition_accuracy_table(farms, params.accuracy_model, exec);
  const std::int64_t count = std::int64_t{1} << n;
  std::vector<ProfileOutcome> outcomes(static_cast<std::size_t>(count));

  std::vector<double> df_payoff(n);
  for (std::size_t i = 0; i < n; ++i) df_payoff[i] = payoff_df(farms[i].local_accuracy, costs, params);

  auto evaluate = [&](std::int64_t m) {
    const auto mask = static_cast<std::uint32_t>(m);
    const double cp_here = mask ? payoff_cp(acc[mask], costs, params) : 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      double old_payoff;
      double new_payoff;
      if (mask & bit(i)) {
        old_payoff = cp_here;
        new_payoff = df_payoff[i];
      } else {
        old_payoff = df_payoff[i];
        new_payoff = payoff_cp(acc[mask | bit(i)], costs, params);
      }
      if (new_payoff > old_payoff + epsilon) {
        outcomes[m] = {static_cast<std::int32_t>(i), old_payoff, new_payoff};
        return;
      }
    }
  };

  if (exec == Execution::parallel) {
#pragma omp parallel for schedule(static)
    for (std::int64_t m = 0; m < count; ++m) evaluate(m);
  } else {
    for (std::int64_t m = 0; m < count; ++m) evaluate(m);
  }

  EquilibriumReport report;
  report.farm_count = n;
  report.profiles_evaluated = static_cast<std::uint64_t>(count);
  for (std::int64_t m = 0; m < count; ++m) {
    const auto& o = outcomes[m];
    const auto mask = static_cast<std::uint32_t>(m);
    if (o.deviator < 0) {
      report.nash_masks.push_back(mask);
    } else {
      report.witness_deviations.push_back(
          {mask, Deviation{static_cast<std::size_t>(o.deviator), o.old_payoff, o.new_payoff}});
    }
  }
  const auto all_cp = static_cast<std::uint32_t>(count - 1);
  report.all_df_is_ne = outcomes[0].deviator < 0;
  report.all_cp_is_ne = outcomes[all_cp].deviator < 0;
  return report;
}

Theorem1Check check_theorem1(std::span<const Farm> farms, const CostVector& costs,
                             const PayoffParams& params, double epsilon) {
  const double coop_cost = effective_coop_cost(costs, params);
  Theorem1Check out;
  out.condition_met = true;
  for (const auto& f : farms) {
    const double solo = coalition_accuracy(std::span<const Farm>(&f, 1), params.accuracy_model);
    const double threshold =
        costs.local_compute + params.benefit_coefficient * (solo - f.local_accuracy);
    if (!(coop_cost >= threshold)) out.condition_met = false;
  }
  out.holds = is_nash(farms, StrategyProfile::all(farms.size(), Strategy::DF), costs, params,
                      epsilon)
                  .is_nash;
  return out;
}

Theorem2Check check_theorem2(std::span<const Farm> farms, const CostVector& costs,
                             const PayoffParams& params, double epsilon) {
  const auto all_cp = StrategyProfile::all(farms.size(), Strategy::CP);
  const double grand = coalition_accuracy(farms, params.accuracy_model);
  const double cp = payoff_cp(grand, costs, params);

  Theorem2Check out;
  out.margins.reserve(farms.size());
  for (const auto& f : farms) out.margins.push_back(payoff_df(f.local_accuracy, costs, params) - cp);
  out.all_cp_is_ne = is_nash(farms, all_cp, costs, params, epsilon).is_nash;
  out.claim_holds = !out.all_cp_is_ne;
  if (out.all_cp_is_ne) {
    out.counterexample = Theorem2Counterexample{params.benefit_coefficient,
                                                effective_coop_cost(costs, params),
                                                costs.local_compute, grand};
  }
  return out;
}

EquilibriumAnalysis analyze_equilibria(std::span<const Farm> farms, const CostVector& costs,
                                       const PayoffParams& params, double epsilon,
                                       Execution exec) {
  EquilibriumAnalysis a;
  a.report = enumerate_equilibria(farms, costs, params, epsilon, exec);
  a.theorem1 = check_theorem1(farms, costs, params, epsilon);
  a.theorem2 = check_theorem2(farms, costs, params, epsilon);
  return a;
}

}  // namespace coopfarm
