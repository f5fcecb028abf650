#pragma once

#include <cstdint>
#include <optional>

#include "activepref/approximation.hpp"
#include "activepref/link_model.hpp"
#include "activepref/posterior.hpp"

namespace activepref {

struct LearnerConfig {
  PriorSpec prior;
  ResponseModel model{};
  StrategyConfig strategy{};
  // Its seed is ignored; per-step seeds derive from `seed` below.
  SamplerConfig sampler{};
  std::uint64_t seed = 0;
  // Start each resample from the previous posterior mean and spread.
  bool warm_start = true;
};

// The sample -> select -> respond -> append loop, one step at a time. Every
// random stream is derived from (seed, step), so replaying a history through
// record() reproduces the same posteriors and proposals exactly.
class ActiveLearner {
 public:
  explicit ActiveLearner(LearnerConfig cfg, std::optional<ItemPool> pool = {});

  const LearnerConfig& config() const { return cfg_; }
  const PosteriorState& posterior() const { return state_; }
  const History& history() const { return history_; }
  const ItemPool* pool() const { return pool_ ? &*pool_ : nullptr; }
  std::size_t step() const { return history_.size(); }

  // Selection for the current step; repeated calls without record() return
  // the same pair.
  SelectionResult propose() const;

  // Appends the response and resamples the posterior.
  void record(const QueryPair& pair, int y,
              std::optional<IndexPair> pool_indices = {},
              double selection_seconds = 0.0);
  void record(const SelectionResult& selection, int y);

 private:
  void resample();

  LearnerConfig cfg_;
  std::optional<ItemPool> pool_;
  History history_;
  PosteriorState state_;
};

}  // namespace activepref
