#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace coopfarm {

enum class Strategy : std::uint8_t { CP, DF };

std::string_view to_string(Strategy s);
Strategy strategy_from_string(std::string_view s);

enum class CorruptionMode : std::uint8_t { none, label_flip, stuck_sensor, dropout };

std::string_view to_string(CorruptionMode m);
CorruptionMode corruption_mode_from_string(std::string_view s);

struct CorruptionSpec {
  CorruptionMode mode = CorruptionMode::none;
  double rate = 0.0;

  void validate() const;
  bool operator==(const CorruptionSpec&) const = default;
};

struct Farm {
  std::size_t id = 0;
  int device_count = 1;
  double quality = 1.0;
  double local_accuracy = 0.0;
  std::optional<CorruptionSpec> malicious;

  void validate() const;
  bool operator==(const Farm&) const = default;
};

// The five cooperative cost components plus the cost of building a model
// locally. Only the first five enter the cooperative total.
struct CostVector {
  double membership = 0.0;
  double penalty = 0.0;
  double upload_comm = 0.0;
  double download_comm = 0.0;
  double storage = 0.0;
  double local_compute = 0.0;

  void validate() const;
  CostVector scaled(double factor) const;
  bool operator==(const CostVector&) const = default;
};

struct AccuracyModelParams {
  double a_min = 0.5;
  double a_max = 0.99;
  double volume_scale = 10.0;

  void validate() const;
  bool operator==(const AccuracyModelParams&) const = default;
};

struct PayoffParams {
  double benefit_coefficient = 1.0;
  AccuracyModelParams accuracy_model;
  // When false the membership-breach penalty is left out of the cooperative
  // payoff and only charged at the round a member defects.
  bool penalty_in_coop_cost = true;

  void validate() const;
  bool operator==(const PayoffParams&) const = default;
};

class StrategyProfile {
 public:
  StrategyProfile() = default;
  explicit StrategyProfile(std::vector<Strategy> strategies);

  static StrategyProfile all(std::size_t n, Strategy s);
  // Bit i of mask set means farm i cooperates.
  static StrategyProfile from_mask(std::uint32_t mask, std::size_t n);

  std::size_t size() const { return strategies_.size(); }
  Strategy operator[](std::size_t i) const { return strategies_[i]; }
  const std::vector<Strategy>& strategies() const { return strategies_; }

  std::size_t cooperator_count() const { return cooperators_; }
  std::size_t defector_count() const { return strategies_.size() - cooperators_; }

  std::uint32_t mask() const;
  StrategyProfile flipped(std::size_t i) const;

  // Compact form: one 'C' or 'D' per farm, farm 0 first.
  std::string to_code() const;
  static StrategyProfile from_code(std::string_view code);

  bool operator==(const StrategyProfile& other) const { return strategies_ == other.strategies_; }

 private:
  std::vector<Strategy> strategies_;
  std::size_t cooperators_ = 0;
};

// c^o + c^p + c^m + c^m' + c^s. local_compute is not part of the sum.
double total_coop_cost(const CostVector& costs);

// Cost actually subtracted from the cooperative payoff, honoring
// PayoffParams::penalty_in_coop_cost.
double effective_coop_cost(const CostVector& costs, const PayoffParams& params);

// Closed-form accuracy of a model trained on a coalition's pooled data:
//   a_min + (a_max - a_min) * Q * (1 - exp(-V / V0))
// with V the pooled device count and Q the device-weighted mean quality.
double accuracy_closed_form(std::span<const Farm> members, const AccuracyModelParams& params);

// A singleton coalition returns the farm's own local_accuracy; larger
// coalitions use the closed form. Throws std::invalid_argument on an empty set.
double coalition_accuracy(std::span<const Farm> members, const AccuracyModelParams& params);

double payoff_cp(double coalition_acc, const CostVector& costs, const PayoffParams& params);
double payoff_df(double local_acc, const CostVector& costs, const PayoffParams& params);

// Per-farm payoffs under a profile. Cooperators share the accuracy of the
// coalition formed by every CP farm in the profile.
std::vector<double> profile_payoffs(std::span<const Farm> farms, const StrategyProfile& profile,
                                    const CostVector& costs, const PayoffParams& params);

// Builds a farm whose local accuracy is the singleton closed form.
Farm make_farm(std::size_t id, int device_count, double quality, const AccuracyModelParams& params,
               std::optional<CorruptionSpec> malicious = std::nullopt);

inline constexpr double kDefaultTieTolerance = 1e-12;

}  // namespace coopfarm
