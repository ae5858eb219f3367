#include "coopfarm/datagen.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>

#include "coopfarm/errors.hpp"
#include "coopfarm/numfmt.hpp"
#include "coopfarm/rng.hpp"

namespace coopfarm {

namespace {

constexpr std::uint64_t kGoldenStream = 0x601DE11F1C7ULL;

double valid_reading(Rng& rng, const FieldSpec& spec) {
  double z;
  do {
    z = rng.normal();
  } while (z > kValidClip || z < -kValidClip);
  return spec.mean + z * spec.sigma;
}

double displaced_reading(Rng& rng, const FieldSpec& spec, int sign) {
  const double distance = rng.uniform(kAnomalyMin, kAnomalyMax);
  return spec.mean + sign * distance * spec.sigma;
}

SensorRecord valid_record(Rng& rng) {
  SensorRecord r;
  for (std::size_t j = 0; j < kFeatureCount; ++j) r.set_feature(j, valid_reading(rng, kFieldSpecs[j]));
  r.label = RecordLabel::valid;
  return r;
}

void add_heavy_noise(Rng& rng, SensorRecord& r) {
  for (std::size_t j = 0; j < kFeatureCount; ++j) {
    const int sign = rng.bernoulli(0.5) ? +1 : -1;
    r.set_feature(j, displaced_reading(rng, kFieldSpecs[j], sign));
  }
  r.label = RecordLabel::anomalous;
}

RecordLabel flipped(RecordLabel l) {
  return l == RecordLabel::valid ? RecordLabel::anomalous : RecordLabel::valid;
}

// Stuck sensors report the floor of the soil-moisture range.
constexpr double kStuckValue = kFieldSpecs[0].mean - 4.0 * kFieldSpecs[0].sigma;

}  // namespace

std::string_view to_string(RecordLabel l) { return l == RecordLabel::valid ? "valid" : "anomalous"; }

std::array<double, kFeatureCount> SensorRecord::features() const {
  return {soil_moisture, soil_nutrient, water_quality, watering_schedule, yield_metric,
          sharing_timeliness};
}

void SensorRecord::set_feature(std::size_t index, double value) {
  switch (index) {
    case 0: soil_moisture = value; break;
    case 1: soil_nutrient = value; break;
    case 2: water_quality = value; break;
    case 3: watering_schedule = value; break;
    case 4: yield_metric = value; break;
    case 5: sharing_timeliness = value; break;
    default: throw std::out_of_range("feature index");
  }
}

void GenConfig::validate() const {
  if (records_per_device < 1) throw std::invalid_argument("records_per_device: must be >= 1");
  if (golden_records < 2 || golden_records % 2 != 0)
    throw std::invalid_argument("golden_records: must be an even number >= 2");
}

FarmDataset generate_dataset(const Farm& farm, const GenConfig& config, std::uint64_t seed) {
  config.validate();
  farm.validate();

  FarmDataset ds;
  ds.farm_id = static_cast<std::int64_t>(farm.id);
  ds.generation_seed = seed ^ static_cast<std::uint64_t>(farm.id);
  Rng rng(ds.generation_seed);
  // Corruption has its own stream so a corrupted dataset overlays the
  // clean one generated from the same seed.
  Rng corrupt_rng(mix_seed(ds.generation_seed, 1));

  const CorruptionSpec corruption = farm.malicious.value_or(CorruptionSpec{});
  const auto total = static_cast<std::size_t>(farm.device_count) *
                     static_cast<std::size_t>(config.records_per_device);
  ds.records.reserve(total);

  for (std::size_t k = 0; k < total; ++k) {
    SensorRecord r = valid_record(rng);
    if (rng.uniform() < 1.0 - farm.quality) add_heavy_noise(rng, r);

    switch (corruption.mode) {
      case CorruptionMode::none:
        break;
      case CorruptionMode::label_flip:
        if (corrupt_rng.bernoulli(corruption.rate)) r.label = flipped(r.label);
        break;
      case CorruptionMode::stuck_sensor:
        if (corrupt_rng.bernoulli(corruption.rate)) r.soil_moisture = kStuckValue;
        break;
      case CorruptionMode::dropout:
        if (corrupt_rng.bernoulli(corruption.rate)) continue;
        break;
    }
    ds.records.push_back(r);
  }
  return ds;
}

std::vector<FarmDataset> generate_datasets(std::span<const Farm> farms, const GenConfig& config,
                                           std::uint64_t seed, Execution exec) {
  std::vector<FarmDataset> out(farms.size());
  const auto n = static_cast<std::int64_t>(farms.size());
  if (exec == Execution::parallel) {
    // Each farm owns its stream, so the schedule cannot change the output.
    std::exception_ptr failure;
#pragma omp parallel for schedule(dynamic)
    for (std::int64_t i = 0; i < n; ++i) {
      try {
        out[i] = generate_dataset(farms[i], config, seed);
      } catch (...) {
#pragma omp critical
        if (!failure) failure = std::current_exception();
      }
    }
    if (failure) std::rethrow_exception(failure);
  } else {
    for (std::int64_t i = 0; i < n; ++i) out[i] = generate_dataset(farms[i], config, seed);
  }
  return out;
}

FarmDataset golden_fixture(const GenConfig& config, std::uint64_t seed) {
  config.validate();
  FarmDataset ds;
  ds.farm_id = kGoldenFarmId;
  ds.generation_seed = mix_seed(seed, kGoldenStream);
  Rng rng(ds.generation_seed);

  const auto total = static_cast<std::size_t>(config.golden_records);
  ds.records.reserve(total);
  for (std::size_t k = 0; k < total / 2; ++k) ds.records.push_back(valid_record(rng));
  for (std::size_t k = total / 2; k < total; ++k) {
    SensorRecord r;
    for (std::size_t j = 0; j < kFeatureCount; ++j)
      r.set_feature(j, displaced_reading(rng, kFieldSpecs[j], kFieldSpecs[j].degraded_sign));
    r.label = RecordLabel::anomalous;
    ds.records.push_back(r);
  }
  for (std::size_t k = total - 1; k > 0; --k) std::swap(ds.records[k], ds.records[rng.below(k + 1)]);
  return ds;
}

void write_dataset_csv(const FarmDataset& dataset, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError(path, "cannot open for writing");
  for (const auto& spec : kFieldSpecs) out << spec.name << ',';
  out << "label\n";
  for (const auto& r : dataset.records) {
    for (double v : r.features()) out << format_double(v) << ',';
    out << to_string(r.label) << '\n';
  }
  if (!out) throw IoError(path, "write failed");
}

std::vector<SensorRecord> read_dataset_csv(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError(path, "cannot open for reading");
  std::string line;
  if (!std::getline(in, line)) throw IoError(path, "missing header row");

  std::vector<SensorRecord> records;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream row(line);
    std::string cell;
    SensorRecord r;
    for (std::size_t j = 0; j < kFeatureCount; ++j) {
      if (!std::getline(row, cell, ',')) throw IoError(path, "short row");
      r.set_feature(j, parse_double(cell));
    }
    if (!std::getline(row, cell, ',')) throw IoError(path, "missing label");
    if (cell == "valid")
      r.label = RecordLabel::valid;
    else if (cell == "anomalous")
      r.label = RecordLabel::anomalous;
    else
      throw IoError(path, "bad label '" + cell + "'");
    records.push_back(r);
  }
  return records;
}

}  // namespace coopfarm
