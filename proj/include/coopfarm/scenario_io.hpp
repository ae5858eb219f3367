#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "coopfarm/equilibrium.hpp"
#include "coopfarm/errors.hpp"
#include "coopfarm/fair_strategy.hpp"
#include "coopfarm/scenario.hpp"

namespace coopfarm {

inline constexpr std::string_view kScenarioVersion = "coopfarm-scenario/1";
inline constexpr std::string_view kReportVersion = "coopfarm-report/1";

// Reports list every witness deviation only up to this many profiles;
// larger games keep the All-DF and All-CP witnesses.
inline constexpr std::uint64_t kMaxSerializedWitnessProfiles = 4096;

// Throws ScenarioError(validation) naming the first violated field.
void validate_scenario(const ScenarioConfig& config);

// Parses and validates scenario JSON. Duplicate keys and unknown keys are
// rejected; omitted optional fields take the defaults of ScenarioConfig.
ScenarioConfig parse_scenario(const std::string& text);
ScenarioConfig load_scenario(const std::filesystem::path& path);

// Canonical JSON text (fixed key order, shortest round-trip floats).
std::string scenario_to_json(const ScenarioConfig& config);

struct SimulationReport {
  std::string version{kReportVersion};
  std::string command;
  std::string arm;  // "fair" or "naive" for bloc-producing commands, else empty
  ScenarioConfig scenario;
  std::vector<Farm> farms;
  std::vector<AccuracyScore> scores;
  std::optional<Clustering> clustering;
  std::optional<BlocAssignment> assignment;
  std::optional<EquilibriumAnalysis> equilibrium;
  std::vector<RoundTrace> rounds;

  bool operator==(const SimulationReport&) const = default;
};

std::string report_to_json(const SimulationReport& report);
SimulationReport parse_report(const std::string& text);
SimulationReport load_report(const std::filesystem::path& path);

struct ReportFiles {
  std::filesystem::path json;
  std::optional<std::filesystem::path> scores_csv;
  std::optional<std::filesystem::path> rounds_csv;
};

// Writes the canonical JSON to `path`. With `with_csv`, also writes
// <stem>_scores.csv and <stem>_rounds.csv in the same directory.
// Throws IoError.
ReportFiles write_report(const SimulationReport& report, const std::filesystem::path& path,
                         bool with_csv = false);

std::string scores_csv(const SimulationReport& report);
std::string rounds_csv(const SimulationReport& report);

void write_text_file(const std::filesystem::path& path, const std::string& text);
std::string read_text_file(const std::filesystem::path& path);

}  // namespace coopfarm
