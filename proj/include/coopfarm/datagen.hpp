#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <string_view>
#include <vector>

#include "coopfarm/core_model.hpp"
#include "coopfarm/execution.hpp"

namespace coopfarm {

enum class RecordLabel : std::uint8_t { valid, anomalous };

std::string_view to_string(RecordLabel l);

inline constexpr std::size_t kFeatureCount = 6;

struct SensorRecord {
  double soil_moisture = 0.0;      // volumetric %
  double soil_nutrient = 0.0;      // ppm
  double water_quality = 0.0;      // index, 0-100
  double watering_schedule = 0.0;  // hours between irrigations
  double yield_metric = 0.0;       // t/ha
  double sharing_timeliness = 0.0; // [0, 1]
  RecordLabel label = RecordLabel::valid;

  std::array<double, kFeatureCount> features() const;
  void set_feature(std::size_t index, double value);

  bool operator==(const SensorRecord&) const = default;
};

// Golden distribution of one attribute. Valid readings are a normal draw
// truncated to +/-3 sigma; anomalous readings sit 4-5 sigma from the mean.
// degraded_sign is the direction a failing sensor or poor practice pushes
// the reading (e.g. lower moisture, longer watering interval).
struct FieldSpec {
  std::string_view name;
  double mean;
  double sigma;
  int degraded_sign;
};

inline constexpr std::array<FieldSpec, kFeatureCount> kFieldSpecs{{
    {"soil_moisture", 25.0, 5.0, -1},       // valid range 5-45
    {"soil_nutrient", 40.0, 7.5, -1},       // 10-70
    {"water_quality", 70.0, 5.0, -1},       // 50-90
    {"watering_schedule", 39.0, 8.25, +1},  // 6-72 h
    {"yield_metric", 7.0, 1.25, -1},        // 2-12
    {"sharing_timeliness", 0.5, 0.06, -1},  // 0.26-0.74
}};

inline constexpr double kValidClip = 3.0;
inline constexpr double kAnomalyMin = 4.0;
inline constexpr double kAnomalyMax = 5.0;

struct GenConfig {
  int records_per_device = 50;
  int golden_records = 2000;

  void validate() const;
  bool operator==(const GenConfig&) const = default;
};

inline constexpr std::int64_t kGoldenFarmId = -1;

struct FarmDataset {
  std::int64_t farm_id = 0;
  std::vector<SensorRecord> records;
  std::uint64_t generation_seed = 0;

  bool operator==(const FarmDataset&) const = default;
};

// Records for one farm. With probability (1 - quality) a record gets
// heavy noise (every field pushed 4-5 sigma off the mean in a random
// direction) and is labeled anomalous. The farm's corruption, if any, is
// applied afterwards. The stream seed is seed ^ farm.id.
FarmDataset generate_dataset(const Farm& farm, const GenConfig& config, std::uint64_t seed);

std::vector<FarmDataset> generate_datasets(std::span<const Farm> farms, const GenConfig& config,
                                           std::uint64_t seed,
                                           Execution exec = Execution::parallel);

// Balanced training corpus: exactly half valid records, half anomalies
// displaced along the degraded direction of every field, shuffled.
FarmDataset golden_fixture(const GenConfig& config, std::uint64_t seed);

// CSV with a header row; fields in SensorRecord order, label last.
void write_dataset_csv(const FarmDataset& dataset, const std::filesystem::path& path);
std::vector<SensorRecord> read_dataset_csv(const std::filesystem::path& path);

}  // namespace coopfarm
