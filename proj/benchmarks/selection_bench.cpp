// Per-query selection cost on a d=10 posterior and a 100-item pool.

#include <random>

#include <benchmark/benchmark.h>

#include "activepref/approximation.hpp"
#include "activepref/synthesis.hpp"

using namespace activepref;

namespace {

struct Fixture {
  PosteriorState state;
  ItemPool pool;
};

const Fixture& fixture() {
  static const Fixture f = [] {
    std::mt19937_64 rng(1);
    std::normal_distribution<double> z(0.0, 1.0);
    SampleMatrix samples(2000, 10);
    for (Eigen::Index i = 0; i < samples.size(); ++i) samples.data()[i] = 0.3 * z(rng);
    SampleMatrix items(100, 10);
    for (Eigen::Index i = 0; i < items.size(); ++i) items.data()[i] = z(rng);
    return Fixture{PosteriorState(std::move(samples)), ItemPool(std::move(items))};
  }();
  return f;
}

void BM_Select(benchmark::State& st, Method method) {
  const Fixture& f = fixture();
  StrategyConfig cfg;
  cfg.method = method;
  const ResponseModel model(0.01);
  std::mt19937_64 rng(2);
  for (auto _ : st) {
    benchmark::DoNotOptimize(select_query(cfg, f.state, model, &f.pool, {}, rng));
  }
}

void BM_Synthesize(benchmark::State& st) {
  const Fixture& f = fixture();
  const ResponseModel model(0.01);
  for (auto _ : st) benchmark::DoNotOptimize(synthesize(f.state, model));
}

}  // namespace

BENCHMARK_CAPTURE(BM_Select, active_discrete, Method::kActiveDiscrete)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_Select, pair_m_dist, Method::kPairMDist)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_Select, opt_dist, Method::kPairOptDist)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_Select, knn_approx, Method::kKnnApprox)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Synthesize)->Unit(benchmark::kMillisecond);
