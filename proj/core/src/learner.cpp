#include "activepref/learner.hpp"

#include <utility>

namespace activepref {

namespace {

constexpr std::uint64_t kSelectStream = 1;
constexpr std::uint64_t kSampleStream = 2;

std::uint64_t step_seed(std::uint64_t seed, std::size_t step, std::uint64_t stream) {
  return mix_seed(mix_seed(seed, step), stream);
}

}  // namespace

ActiveLearner::ActiveLearner(LearnerConfig cfg, std::optional<ItemPool> pool)
    : cfg_(std::move(cfg)), pool_(std::move(pool)) {
  cfg_.strategy.validate();
  if (pool_ && pool_->dim() != cfg_.prior.dim()) {
    throw DimensionMismatch("item pool and prior differ in dimension");
  }
  resample();
}

SelectionResult ActiveLearner::propose() const {
  std::mt19937_64 rng(step_seed(cfg_.seed, step(), kSelectStream));
  return select_query(cfg_.strategy, state_, cfg_.model, pool(), history_, rng);
}

void ActiveLearner::record(const QueryPair& pair, int y,
                           std::optional<IndexPair> pool_indices,
                           double selection_seconds) {
  if (y != 0 && y != 1) throw ConfigError("response must be 0 or 1", "y");
  if (pair.dim() != cfg_.prior.dim()) {
    throw DimensionMismatch("query dimension differs from the prior");
  }
  history_.push_back({pair, y, selection_seconds, pool_indices});
  resample();
}

void ActiveLearner::record(const SelectionResult& selection, int y) {
  record(selection.pair, y, selection.pair_indices,
         selection.diagnostics.selection_seconds);
}

void ActiveLearner::resample() {
  SamplerConfig sc = cfg_.sampler;
  sc.seed = step_seed(cfg_.seed, step(), kSampleStream);
  if (cfg_.warm_start && state_.num_samples() >= 2) {
    sc.initial_point = state_.mean();
    sc.initial_scale = state_.covariance().diagonal().cwiseMax(0.0).cwiseSqrt();
  }
  state_ = sample_posterior(cfg_.prior, cfg_.model, history_, sc);
}

}  // namespace activepref
