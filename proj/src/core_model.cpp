#include "coopfarm/core_model.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace coopfarm {

namespace {

void require(bool ok, const std::string& field, const char* what) {
  if (!ok) throw std::invalid_argument(field + ": " + what);
}

void require_cost(double v, const char* field) {
  require(std::isfinite(v) && v >= 0.0, field, "must be finite and >= 0");
}

bool in_unit(double v) { return std::isfinite(v) && v >= 0.0 && v <= 1.0; }

}  // namespace

std::string_view to_string(Strategy s) { return s == Strategy::CP ? "CP" : "DF"; }

Strategy strategy_from_string(std::string_view s) {
  if (s == "CP") return Strategy::CP;
  if (s == "DF") return Strategy::DF;
  throw std::invalid_argument("unknown strategy '" + std::string(s) + "'");
}

std::string_view to_string(CorruptionMode m) {
  switch (m) {
    case CorruptionMode::none: return "none";
    case CorruptionMode::label_flip: return "label_flip";
    case CorruptionMode::stuck_sensor: return "stuck_sensor";
    case CorruptionMode::dropout: return "dropout";
  }
  return "none";
}

CorruptionMode corruption_mode_from_string(std::string_view s) {
  if (s == "none") return CorruptionMode::none;
  if (s == "label_flip") return CorruptionMode::label_flip;
  if (s == "stuck_sensor") return CorruptionMode::stuck_sensor;
  if (s == "dropout") return CorruptionMode::dropout;
  throw std::invalid_argument("mode: unknown corruption mode '" + std::string(s) + "'");
}

void CorruptionSpec::validate() const { require(in_unit(rate), "rate", "must be in [0, 1]"); }

void Farm::validate() const {
  require(device_count >= 1, "device_count", "must be >= 1");
  require(in_unit(quality), "quality", "must be in [0, 1]");
  require(in_unit(local_accuracy), "local_accuracy", "must be in [0, 1]");
  if (malicious) malicious->validate();
}

void CostVector::validate() const {
  require_cost(membership, "membership");
  require_cost(penalty, "penalty");
  require_cost(upload_comm, "upload_comm");
  require_cost(download_comm, "download_comm");
  require_cost(storage, "storage");
  require_cost(local_compute, "local_compute");
}

CostVector CostVector::scaled(double factor) const {
  return {membership * factor, penalty * factor,  upload_comm * factor,
          download_comm * factor, storage * factor, local_compute * factor};
}

void AccuracyModelParams::validate() const {
  require(in_unit(a_min), "a_min", "must be in [0, 1]");
  require(in_unit(a_max) && a_max > a_min, "a_max", "must be in (a_min, 1]");
  require(std::isfinite(volume_scale) && volume_scale > 0.0, "volume_scale", "must be > 0");
}

void PayoffParams::validate() const {
  require(std::isfinite(benefit_coefficient) && benefit_coefficient > 0.0, "benefit_coefficient",
          "must be > 0");
  accuracy_model.validate();
}

StrategyProfile::StrategyProfile(std::vector<Strategy> strategies)
    : strategies_(std::move(strategies)),
      cooperators_(static_cast<std::size_t>(
          std::count(strategies_.begin(), strategies_.end(), Strategy::CP))) {}

StrategyProfile StrategyProfile::all(std::size_t n, Strategy s) {
  return StrategyProfile(std::vector<Strategy>(n, s));
}

StrategyProfile StrategyProfile::from_mask(std::uint32_t mask, std::size_t n) {
  std::vector<Strategy> s(n, Strategy::DF);
  for (std::size_t i = 0; i < n; ++i)
    if (mask & (std::uint32_t{1} << i)) s[i] = Strategy::CP;
  return StrategyProfile(std::move(s));
}

std::uint32_t StrategyProfile::mask() const {
  if (strategies_.size() > 32) throw std::length_error("profile too wide for a 32-bit mask");
  std::uint32_t m = 0;
  for (std::size_t i = 0; i < strategies_.size(); ++i)
    if (strategies_[i] == Strategy::CP) m |= std::uint32_t{1} << i;
  return m;
}

StrategyProfile StrategyProfile::flipped(std::size_t i) const {
  auto s = strategies_;
  s.at(i) = s[i] == Strategy::CP ? Strategy::DF : Strategy::CP;
  return StrategyProfile(std::move(s));
}

std::string StrategyProfile::to_code() const {
  std::string code;
  code.reserve(strategies_.size());
  for (auto s : strategies_) code.push_back(s == Strategy::CP ? 'C' : 'D');
  return code;
}

StrategyProfile StrategyProfile::from_code(std::string_view code) {
  std::vector<Strategy> s;
  s.reserve(code.size());
  for (char c : code) {
    if (c == 'C')
      s.push_back(Strategy::CP);
    else if (c == 'D')
      s.push_back(Strategy::DF);
    else
      throw std::invalid_argument("profile code may only contain 'C' or 'D'");
  }
  return StrategyProfile(std::move(s));
}

double total_coop_cost(const CostVector& costs) {
  return costs.membership + costs.penalty + costs.upload_comm + costs.download_comm + costs.storage;
}

double effective_coop_cost(const CostVector& costs, const PayoffParams& params) {
  if (params.penalty_in_coop_cost) return total_coop_cost(costs);
  return costs.membership + costs.upload_comm + costs.download_comm + costs.storage;
}

double accuracy_closed_form(std::span<const Farm> members, const AccuracyModelParams& params) {
  if (members.empty()) throw std::invalid_argument("empty coalition");
  double volume = 0.0;
  double weighted_quality = 0.0;
  for (const auto& f : members) {
    volume += f.device_count;
    weighted_quality += f.device_count * f.quality;
  }
  const double mean_quality = weighted_quality / volume;
  const double saturation = -std::expm1(-volume / params.volume_scale);
  return params.a_min + (params.a_max - params.a_min) * mean_quality * saturation;
}

double coalition_accuracy(std::span<const Farm> members, const AccuracyModelParams& params) {
  if (members.empty()) throw std::invalid_argument("empty coalition");
  if (members.size() == 1) return members.front().local_accuracy;
  return accuracy_closed_form(members, params);
}

double payoff_cp(double coalition_acc, const CostVector& costs, const PayoffParams& params) {
  return params.benefit_coefficient * coalition_acc - effective_coop_cost(costs, params);
}

double payoff_df(double local_acc, const CostVector& costs, const PayoffParams& params) {
  return params.benefit_coefficient * local_acc - costs.local_compute;
}

std::vector<double> profile_payoffs(std::span<const Farm> farms, const StrategyProfile& profile,
                                    const CostVector& costs, const PayoffParams& params) {
  if (farms.size() != profile.size())
    throw std::invalid_argument("profile length does not match farm count");

  std::vector<Farm> coalition;
  for (std::size_t i = 0; i < farms.size(); ++i)
    if (profile[i] == Strategy::CP) coalition.push_back(farms[i]);

  const double coop_acc =
      coalition.empty() ? 0.0 : coalition_accuracy(coalition, params.accuracy_model);

  std::vector<double> payoffs(farms.size());
  for (std::size_t i = 0; i < farms.size(); ++i) {
    payoffs[i] = profile[i] == Strategy::CP ? payoff_cp(coop_acc, costs, params)
                                            : payoff_df(farms[i].local_accuracy, costs, params);
  }
  return payoffs;
}

Farm make_farm(std::size_t id, int device_count, double quality, const AccuracyModelParams& params,
               std::optional<CorruptionSpec> malicious) {
  Farm f;
  f.id = id;
  f.device_count = device_count;
  f.quality = quality;
  f.malicious = malicious;
  f.local_accuracy = accuracy_closed_form(std::span<const Farm>(&f, 1), params);
  return f;
}

}  // namespace coopfarm
