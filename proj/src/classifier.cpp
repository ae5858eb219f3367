#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "coopfarm/numfmt.hpp"
#include "coopfarm/quality_ml.hpp"
#include "coopfarm/rng.hpp"

namespace coopfarm {

namespace {

constexpr std::string_view kModelHeader = "coopfarm-linear-model 1";

int label_sign(RecordLabel l) { return l == RecordLabel::valid ? +1 : -1; }

double raw_score(const LinearModel& m, std::span<const double> x) {
  double s = m.bias;
  for (std::size_t j = 0; j < m.weights.size(); ++j) s += m.weights[j] * x[j];
  return s;
}

template <typename Range>
void write_line(std::ostringstream& out, std::string_view key, const Range& values) {
  out << key;
  for (const auto& v : values) {
    if constexpr (std::is_same_v<std::decay_t<decltype(v)>, double>)
      out << ' ' << format_double(v);
    else
      out << ' ' << v;
  }
  out << '\n';
}

}  // namespace

double LinearModel::decision(std::span<const double> x) const {
  if (x.size() != weights.size()) throw std::invalid_argument("feature count mismatch");
  if (feature_mean.empty()) return raw_score(*this, x);
  double s = bias;
  for (std::size_t j = 0; j < weights.size(); ++j)
    s += weights[j] * ((x[j] - feature_mean[j]) / feature_scale[j]);
  return s;
}

double hinge_objective(const LinearModel& model, std::span<const std::vector<double>> features,
                       std::span<const int> labels) {
  double norm2 = model.bias * model.bias;
  for (double w : model.weights) norm2 += w * w;
  double loss = 0.0;
  for (std::size_t i = 0; i < features.size(); ++i)
    loss += std::max(0.0, 1.0 - labels[i] * raw_score(model, features[i]));
  return 0.5 * model.regularization * norm2 + loss / static_cast<double>(features.size());
}

TrainResult train_linear(std::span<const std::vector<double>> features, std::span<const int> labels,
                         const TrainOptions& options) {
  if (features.size() != labels.size()) throw std::invalid_argument("features/labels length mismatch");
  if (!(options.regularization > 0.0)) throw std::invalid_argument("regularization: must be > 0");
  if (options.steps < 1) throw std::invalid_argument("steps: must be >= 1");
  const bool has_pos = std::find(labels.begin(), labels.end(), +1) != labels.end();
  const bool has_neg = std::find(labels.begin(), labels.end(), -1) != labels.end();
  if (!has_pos || !has_neg) throw std::invalid_argument("degenerate training set");

  const std::size_t dims = features.front().size();
  const double lambda = options.regularization;
  const double radius = 1.0 / std::sqrt(lambda);

  TrainResult result;
  LinearModel& m = result.model;
  m.weights.assign(dims, 0.0);
  m.regularization = lambda;

  // The returned model is the running average of the iterates; the raw
  // iterate is only used to take steps.
  LinearModel iterate = m;
  Rng rng(options.seed);
  const auto n = static_cast<std::uint64_t>(features.size());
  for (std::int64_t t = 1; t <= options.steps; ++t) {
    const auto i = static_cast<std::size_t>(rng.below(n));
    const auto& x = features[i];
    const double y = labels[i];
    const double eta = 1.0 / (lambda * static_cast<double>(t));
    const bool violated = y * raw_score(iterate, x) < 1.0;

    const double shrink = 1.0 - eta * lambda;
    for (auto& w : iterate.weights) w *= shrink;
    iterate.bias *= shrink;
    if (violated) {
      for (std::size_t j = 0; j < dims; ++j) iterate.weights[j] += eta * y * x[j];
      iterate.bias += eta * y;
    }

    double norm2 = iterate.bias * iterate.bias;
    for (double w : iterate.weights) norm2 += w * w;
    if (norm2 > radius * radius) {
      const double scale = radius / std::sqrt(norm2);
      for (auto& w : iterate.weights) w *= scale;
      iterate.bias *= scale;
    }

    const double keep = 1.0 - 1.0 / static_cast<double>(t);
    const double take = 1.0 / static_cast<double>(t);
    for (std::size_t j = 0; j < dims; ++j) m.weights[j] = keep * m.weights[j] + take * iterate.weights[j];
    m.bias = keep * m.bias + take * iterate.bias;

    m.steps_trained = t;
    if (options.checkpoint_every > 0 && t % options.checkpoint_every == 0)
      result.objective_checkpoints.push_back(hinge_objective(m, features, labels));
  }
  return result;
}

TrainResult train_classifier_traced(const FarmDataset& dataset, const TrainOptions& options) {
  if (dataset.records.empty()) throw std::invalid_argument("degenerate training set");
  const auto n = static_cast<double>(dataset.records.size());

  std::vector<double> mean(kFeatureCount, 0.0);
  std::vector<double> scale(kFeatureCount, 0.0);
  for (const auto& r : dataset.records) {
    const auto f = r.features();
    for (std::size_t j = 0; j < kFeatureCount; ++j) mean[j] += f[j];
  }
  for (auto& v : mean) v /= n;
  for (const auto& r : dataset.records) {
    const auto f = r.features();
    for (std::size_t j = 0; j < kFeatureCount; ++j) scale[j] += (f[j] - mean[j]) * (f[j] - mean[j]);
  }
  for (auto& v : scale) {
    v = std::sqrt(v / n);
    if (!(v > 0.0)) v = 1.0;
  }

  std::vector<std::vector<double>> x;
  std::vector<int> y;
  x.reserve(dataset.records.size());
  y.reserve(dataset.records.size());
  for (const auto& r : dataset.records) {
    const auto f = r.features();
    std::vector<double> z(kFeatureCount);
    for (std::size_t j = 0; j < kFeatureCount; ++j) z[j] = (f[j] - mean[j]) / scale[j];
    x.push_back(std::move(z));
    y.push_back(label_sign(r.label));
  }

  auto result = train_linear(x, y, options);
  result.model.feature_mean = std::move(mean);
  result.model.feature_scale = std::move(scale);
  for (const auto& spec : kFieldSpecs) result.model.feature_names.emplace_back(spec.name);
  return result;
}

LinearModel train_classifier(const FarmDataset& dataset, double regularization, std::int64_t steps,
                             std::uint64_t seed) {
  return train_classifier_traced(dataset, {regularization, steps, seed, 0}).model;
}

RecordLabel classify(const LinearModel& model, const SensorRecord& record) {
  const auto f = record.features();
  return model.decision(f) >= 0.0 ? RecordLabel::valid : RecordLabel::anomalous;
}

AccuracyScore score_farm(const LinearModel& model, const FarmDataset& dataset) {
  if (dataset.records.empty()) throw std::invalid_argument("no records");
  std::size_t correct = 0;
  for (const auto& r : dataset.records)
    if (classify(model, r) == r.label) ++correct;
  return {static_cast<std::size_t>(std::max<std::int64_t>(dataset.farm_id, 0)),
          static_cast<double>(correct) / static_cast<double>(dataset.records.size())};
}

std::vector<AccuracyScore> score_farms(const LinearModel& model, std::span<const FarmDataset> datasets,
                                       Execution exec) {
  std::vector<AccuracyScore> out(datasets.size());
  const auto n = static_cast<std::int64_t>(datasets.size());
  for (const auto& ds : datasets)
    if (ds.records.empty()) throw std::invalid_argument("no records");
  if (exec == Execution::parallel) {
#pragma omp parallel for schedule(dynamic)
    for (std::int64_t i = 0; i < n; ++i) out[i] = score_farm(model, datasets[i]);
  } else {
    for (std::int64_t i = 0; i < n; ++i) out[i] = score_farm(model, datasets[i]);
  }
  return out;
}

std::string serialize_model(const LinearModel& model) {
  std::ostringstream out;
  out << kModelHeader << '\n';
  write_line(out, "features", model.feature_names);
  write_line(out, "weights", model.weights);
  out << "bias " << format_double(model.bias) << '\n';
  out << "regularization " << format_double(model.regularization) << '\n';
  out << "steps " << model.steps_trained << '\n';
  write_line(out, "mean", model.feature_mean);
  write_line(out, "scale", model.feature_scale);
  return out.str();
}

LinearModel deserialize_model(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || line != kModelHeader)
    throw std::invalid_argument("unsupported model format");

  LinearModel m;
  auto doubles = [](std::istringstream& row) {
    std::vector<double> v;
    std::string tok;
    while (row >> tok) v.push_back(parse_double(tok));
    return v;
  };
  while (std::getline(in, line)) {
    std::istringstream row(line);
    std::string key;
    row >> key;
    if (key == "features") {
      std::string tok;
      while (row >> tok) m.feature_names.push_back(tok);
    } else if (key == "weights") {
      m.weights = doubles(row);
    } else if (key == "bias") {
      m.bias = doubles(row).at(0);
    } else if (key == "regularization") {
      m.regularization = doubles(row).at(0);
    } else if (key == "steps") {
      row >> m.steps_trained;
    } else if (key == "mean") {
      m.feature_mean = doubles(row);
    } else if (key == "scale") {
      m.feature_scale = doubles(row);
    } else if (!key.empty()) {
      throw std::invalid_argument("unknown model key '" + key + "'");
    }
  }
  if (!m.feature_mean.empty() &&
      (m.feature_mean.size() != m.weights.size() || m.feature_scale.size() != m.weights.size()))
    throw std::invalid_argument("standardization length mismatch");
  return m;
}

}  // namespace coopfarm
