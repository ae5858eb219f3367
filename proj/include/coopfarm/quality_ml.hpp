#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "coopfarm/datagen.hpp"
#include "coopfarm/execution.hpp"

namespace coopfarm {

// Linear margin classifier. Input features are standardized with the stored
// per-feature mean and scale before the dot product; empty vectors mean the
// features are used as-is.
struct LinearModel {
  std::vector<std::string> feature_names;
  std::vector<double> weights;
  double bias = 0.0;
  double regularization = 0.0;
  std::int64_t steps_trained = 0;
  std::vector<double> feature_mean;
  std::vector<double> feature_scale;

  double decision(std::span<const double> x) const;
  bool operator==(const LinearModel&) const = default;
};

struct TrainOptions {
  double regularization = 0.01;
  std::int64_t steps = 20000;
  std::uint64_t seed = 0;
  // Record the regularized hinge objective every this many steps (0: never).
  std::int64_t checkpoint_every = 0;
};

struct TrainResult {
  LinearModel model;
  std::vector<double> objective_checkpoints;
};

// Projected stochastic subgradient descent on the regularized hinge loss,
// step size 1/(lambda t). The bias is carried as a constant feature, so it
// is regularized and projected with the weights onto the 1/sqrt(lambda)
// ball. The returned model is the running average of the iterates.
// Labels are +1/-1. Throws std::invalid_argument("degenerate training
// set") unless both labels are present.
TrainResult train_linear(std::span<const std::vector<double>> features, std::span<const int> labels,
                         const TrainOptions& options);

// regularization/2 * ||(w, b)||^2 + mean hinge loss, on already
// standardized features.
double hinge_objective(const LinearModel& model, std::span<const std::vector<double>> features,
                       std::span<const int> labels);

TrainResult train_classifier_traced(const FarmDataset& dataset, const TrainOptions& options);

LinearModel train_classifier(const FarmDataset& dataset, double regularization, std::int64_t steps,
                             std::uint64_t seed);

// Nonnegative decision value means valid; an exact zero is valid.
RecordLabel classify(const LinearModel& model, const SensorRecord& record);

struct AccuracyScore {
  std::size_t farm_id = 0;
  double accuracy = 0.0;

  bool operator==(const AccuracyScore&) const = default;
};

// Fraction of records whose predicted label matches the recorded one.
// Throws std::invalid_argument("no records") on an empty dataset.
AccuracyScore score_farm(const LinearModel& model, const FarmDataset& dataset);

std::vector<AccuracyScore> score_farms(const LinearModel& model, std::span<const FarmDataset> datasets,
                                       Execution exec = Execution::parallel);

// Flat text form: a version line, then one "key value..." line per field.
std::string serialize_model(const LinearModel& model);
LinearModel deserialize_model(const std::string& text);

struct Clustering {
  std::size_t k = 0;
  std::vector<double> centroids;         // ascending
  std::vector<std::size_t> assignment;   // point index -> cluster index
  double inertia = 0.0;

  std::vector<std::size_t> cluster_sizes() const;
  bool operator==(const Clustering&) const = default;
};

// Lloyd's algorithm with D^2-weighted seeding. Each restart uses its own
// stream derived from (seed, restart index); the lowest inertia wins and
// ties go to the lower restart index. Throws std::invalid_argument when
// k is 0, exceeds the point count, or exceeds the number of distinct points.
Clustering kmeans_1d(std::span<const double> points, std::size_t k, std::size_t restarts,
                     std::uint64_t seed, Execution exec = Execution::parallel);

// Globally optimal 1-D clustering by dynamic programming over the sorted
// points (optimal clusters are contiguous runs). O(k n^2); n <= 10^4.
Clustering kmeans_1d_exact(std::span<const double> points, std::size_t k);

}  // namespace coopfarm
