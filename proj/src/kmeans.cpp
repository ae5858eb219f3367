#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "coopfarm/quality_ml.hpp"
#include "coopfarm/rng.hpp"

namespace coopfarm {

namespace {

constexpr int kMaxIterations = 100;
constexpr double kShiftTolerance = 1e-9;
constexpr std::size_t kMaxExactPoints = 10000;

void check_inputs(std::span<const double> points, std::size_t k) {
  if (k == 0) throw std::invalid_argument("k must be >= 1");
  if (points.size() < k) throw std::invalid_argument("k exceeds number of points");
  std::vector<double> sorted(points.begin(), points.end());
  std::sort(sorted.begin(), sorted.end());
  const auto distinct =
      static_cast<std::size_t>(std::unique(sorted.begin(), sorted.end()) - sorted.begin());
  if (k > distinct) throw std::invalid_argument("k exceeds distinct points");
}

// Nearest centroid; ties go to the lower index.
std::size_t nearest(double x, std::span<const double> centroids) {
  std::size_t best = 0;
  double best_d = std::abs(x - centroids[0]);
  for (std::size_t c = 1; c < centroids.size(); ++c) {
    const double d = std::abs(x - centroids[c]);
    if (d < best_d) {
      best_d = d;
      best = c;
    }
  }
  return best;
}

// Cluster means of `assignment`, summed in point order as offsets from the
// cluster's first point, so a cluster of identical points gets that point
// back exactly.
std::vector<double> means(std::span<const double> points, std::span<const std::size_t> assignment,
                          std::size_t k, std::vector<std::size_t>& counts) {
  std::vector<double> anchor(k, 0.0), offsets(k, 0.0);
  counts.assign(k, 0);
  for (std::size_t i = 0; i < points.size(); ++i) {
    const auto c = assignment[i];
    if (counts[c]++ == 0) anchor[c] = points[i];
    offsets[c] += points[i] - anchor[c];
  }
  for (std::size_t c = 0; c < k; ++c)
    if (counts[c] > 0) anchor[c] += offsets[c] / static_cast<double>(counts[c]);
  return anchor;
}

// Sorts centroids, assigns every point to its nearest one and recomputes
// inertia from that assignment.
Clustering finalize(std::span<const double> points, std::vector<double> centroids) {
  std::sort(centroids.begin(), centroids.end());
  Clustering out;
  out.k = centroids.size();
  out.assignment.resize(points.size());
  for (std::size_t i = 0; i < points.size(); ++i) {
    out.assignment[i] = nearest(points[i], centroids);
    const double d = points[i] - centroids[out.assignment[i]];
    out.inertia += d * d;
  }
  out.centroids = std::move(centroids);
  return out;
}

std::vector<double> seed_centroids(std::span<const double> points, std::size_t k, Rng& rng) {
  std::vector<double> centroids;
  centroids.reserve(k);
  centroids.push_back(points[rng.below(points.size())]);
  std::vector<double> d2(points.size());
  while (centroids.size() < k) {
    double total = 0.0;
    for (std::size_t i = 0; i < points.size(); ++i) {
      const double d = points[i] - centroids[nearest(points[i], centroids)];
      d2[i] = d * d;
      total += d2[i];
    }
    // total > 0 because k <= number of distinct points.
    const double target = rng.uniform() * total;
    double acc = 0.0;
    std::size_t pick = points.size() - 1;
    for (std::size_t i = 0; i < points.size(); ++i) {
      acc += d2[i];
      if (acc > target && d2[i] > 0.0) {
        pick = i;
        break;
      }
    }
    while (d2[pick] == 0.0) --pick;
    centroids.push_back(points[pick]);
  }
  return centroids;
}

Clustering lloyd_run(std::span<const double> points, std::size_t k, std::uint64_t stream_seed) {
  Rng rng(stream_seed);
  auto centroids = seed_centroids(points, k, rng);
  std::vector<std::size_t> assignment(points.size());
  std::vector<std::size_t> counts;

  for (int iter = 0; iter < kMaxIterations; ++iter) {
    for (std::size_t i = 0; i < points.size(); ++i) assignment[i] = nearest(points[i], centroids);

    // An empty cluster takes over the point lying farthest from its centroid.
    for (;;) {
      means(points, assignment, k, counts);
      const auto empty = std::find(counts.begin(), counts.end(), std::size_t{0});
      if (empty == counts.end()) break;
      std::size_t far = 0;
      double far_d = -1.0;
      for (std::size_t i = 0; i < points.size(); ++i) {
        if (counts[assignment[i]] < 2) continue;
        const double d = std::abs(points[i] - centroids[assignment[i]]);
        if (d > far_d) {
          far_d = d;
          far = i;
        }
      }
      const auto c = static_cast<std::size_t>(empty - counts.begin());
      assignment[far] = c;
      centroids[c] = points[far];
    }

    auto updated = means(points, assignment, k, counts);
    double shift = 0.0;
    for (std::size_t c = 0; c < k; ++c) shift = std::max(shift, std::abs(updated[c] - centroids[c]));
    centroids = std::move(updated);
    if (shift < kShiftTolerance) break;
  }
  return finalize(points, std::move(centroids));
}

}  // namespace

std::vector<std::size_t> Clustering::cluster_sizes() const {
  std::vector<std::size_t> sizes(k, 0);
  for (auto a : assignment) ++sizes.at(a);
  return sizes;
}

Clustering kmeans_1d(std::span<const double> points, std::size_t k, std::size_t restarts,
                     std::uint64_t seed, Execution exec) {
  check_inputs(points, k);
  restarts = std::max<std::size_t>(restarts, 1);

  std::vector<Clustering> runs(restarts);
  const auto n = static_cast<std::int64_t>(restarts);
  if (exec == Execution::parallel) {
#pragma omp parallel for schedule(dynamic)
    for (std::int64_t r = 0; r < n; ++r) runs[r] = lloyd_run(points, k, mix_seed(seed, r));
  } else {
    for (std::int64_t r = 0; r < n; ++r) runs[r] = lloyd_run(points, k, mix_seed(seed, r));
  }

  std::size_t best = 0;
  for (std::size_t r = 1; r < restarts; ++r)
    if (runs[r].inertia < runs[best].inertia) best = r;
  return std::move(runs[best]);
}

Clustering kmeans_1d_exact(std::span<const double> points, std::size_t k) {
  check_inputs(points, k);
  if (points.size() > kMaxExactPoints) throw std::invalid_argument("too many points for exact k-means");

  const std::size_t n = points.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return points[a] < points[b]; });
  std::vector<double> sorted(n);
  for (std::size_t i = 0; i < n; ++i) sorted[i] = points[order[i]];

  // Shift by the median to keep the prefix sums well conditioned.
  const double shift = sorted[n / 2];
  std::vector<double> s1(n + 1, 0.0), s2(n + 1, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    const double x = sorted[i] - shift;
    s1[i + 1] = s1[i] + x;
    s2[i + 1] = s2[i] + x * x;
  }
  // SSE of sorted[a, b).
  auto sse = [&](std::size_t a, std::size_t b) {
    const double len = static_cast<double>(b - a);
    const double sum = s1[b] - s1[a];
    return std::max(0.0, (s2[b] - s2[a]) - sum * sum / len);
  };

  constexpr double inf = std::numeric_limits<double>::infinity();
  // cost[j][i]: best SSE splitting the first i sorted points into j+1 runs.
  std::vector<std::vector<double>> cost(k, std::vector<double>(n + 1, inf));
  std::vector<std::vector<std::size_t>> split(k, std::vector<std::size_t>(n + 1, 0));
  for (std::size_t i = 1; i <= n; ++i) cost[0][i] = sse(0, i);
  for (std::size_t j = 1; j < k; ++j) {
    for (std::size_t i = j + 1; i <= n; ++i) {
      for (std::size_t m = j; m < i; ++m) {
        const double c = cost[j - 1][m] + sse(m, i);
        if (c < cost[j][i]) {
          cost[j][i] = c;
          split[j][i] = m;
        }
      }
    }
  }

  std::vector<std::size_t> sorted_label(n);
  std::size_t end = n;
  for (std::size_t j = k; j-- > 0;) {
    const std::size_t begin = j == 0 ? 0 : split[j][end];
    for (std::size_t i = begin; i < end; ++i) sorted_label[i] = j;
    end = begin;
  }
  std::vector<std::size_t> assignment(n);
  for (std::size_t i = 0; i < n; ++i) assignment[order[i]] = sorted_label[i];

  std::vector<std::size_t> counts;
  return finalize(points, means(points, assignment, k, counts));
}

}  // namespace coopfarm
