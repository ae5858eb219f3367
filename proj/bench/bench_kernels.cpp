// Serial vs OpenMP timings for the parallel kernels. Each pair of runs is
// also compared for identical output.
//
//   coopfarm_bench [--farms N] [--reps R]

#include <chrono>
#include <cstdio>
#include <string>

#include <omp.h>

#include "CLI11.hpp"
#include "coopfarm/equilibrium.hpp"
#include "coopfarm/quality_ml.hpp"
#include "coopfarm/rng.hpp"

using namespace coopfarm;

namespace {

template <typename F>
double best_ms(int reps, F&& f) {
  double best = 1e300;
  for (int r = 0; r < reps; ++r) {
    const auto t0 = std::chrono::steady_clock::now();
    f();
    const auto t1 = std::chrono::steady_clock::now();
    best = std::min(best, std::chrono::duration<double, std::milli>(t1 - t0).count());
  }
  return best;
}

template <typename F>
void compare(const char* name, int reps, F&& kernel) {
  decltype(kernel(Execution::serial)) serial_out, parallel_out;
  const double s = best_ms(reps, [&] { serial_out = kernel(Execution::serial); });
  const double p = best_ms(reps, [&] { parallel_out = kernel(Execution::parallel); });
  std::printf("%-28s serial %9.2f ms  parallel %9.2f ms  speedup %5.2fx  %s\n", name, s, p, s / p,
              serial_out == parallel_out ? "identical" : "MISMATCH");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Serial vs parallel kernel timings"};
  std::size_t farms = 18;
  int reps = 3;
  app.add_option("--farms", farms, "Farm count for equilibrium enumeration")->check(CLI::Range(1, 20));
  app.add_option("--reps", reps, "Repetitions per measurement (best is reported)")->check(CLI::PositiveNumber);
  CLI11_PARSE(app, argc, argv);

  std::printf("threads: %d\n", omp_get_max_threads());

  PayoffParams params;
  params.benefit_coefficient = 10;
  const CostVector costs{0.1, 0.05, 0.1, 0.05, 0.05, 0.05};
  Rng rng(1);
  std::vector<Farm> fs;
  for (std::size_t i = 0; i < farms; ++i)
    fs.push_back(make_farm(i, 5 + static_cast<int>(rng.below(20)), rng.uniform(), params.accuracy_model));
  compare(("enumerate N=" + std::to_string(farms)).c_str(), reps, [&](Execution e) {
    return enumerate_equilibria(fs, costs, params, kDefaultTieTolerance, e);
  });

  std::vector<double> pts(20000);
  for (auto& v : pts) v = rng.uniform();
  compare("kmeans n=20000 k=4 x32", reps, [&](Execution e) { return kmeans_1d(pts, 4, 32, 7, e); });

  std::vector<Farm> many;
  for (std::size_t i = 0; i < 64; ++i) many.push_back(make_farm(i, 40, rng.uniform(), params.accuracy_model));
  GenConfig gen;
  compare("generate 64 farms", reps, [&](Execution e) { return generate_datasets(many, gen, 3, e); });

  const auto data = generate_datasets(many, gen, 3);
  const auto model = train_classifier(golden_fixture(gen, 3), 0.01, 20000, 4);
  compare("score 64 farms", reps, [&](Execution e) { return score_farms(model, data, e); });
  return 0;
}
