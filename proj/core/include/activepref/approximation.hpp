#pragma once

#include <optional>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "activepref/info_gain.hpp"
#include "activepref/posterior.hpp"
#include "activepref/synthesis.hpp"
#include "activepref/types.hpp"

namespace activepref {

using IndexPair = std::pair<std::size_t, std::size_t>;

// Embedded items for the constrained setting.
class ItemPool {
 public:
  ItemPool() = default;
  explicit ItemPool(SampleMatrix items,
                    std::optional<std::vector<IndexPair>> candidates = {});

  std::size_t size() const { return static_cast<std::size_t>(items_.rows()); }
  Eigen::Index dim() const { return items_.cols(); }
  const SampleMatrix& items() const { return items_; }
  Vector item(std::size_t i) const { return items_.row(static_cast<Eigen::Index>(i)).transpose(); }
  QueryPair pair(const IndexPair& ij) const { return QueryPair(item(ij.first), item(ij.second)); }

  // Precomputed candidate pairs (i < j), if the pool restricts them.
  const std::optional<std::vector<IndexPair>>& candidates() const { return candidates_; }

 private:
  SampleMatrix items_;
  std::optional<std::vector<IndexPair>> candidates_;
};

enum class Method {
  kInfoSynth,
  kPairMDist,
  kPairOptDist,
  kKnnApprox,
  kNnApprox,
  kActiveDiscrete,
  kRandomDiscrete,
  kRandomSynthesis,
};

std::string_view method_name(Method m);
Method parse_method(std::string_view name);  // throws ConfigError
bool is_pool_method(Method m);

struct StrategyConfig {
  Method method = Method::kInfoSynth;
  double alpha = 0.05;  // Pair M-dist: fraction kept by the Mahalanobis filter
  double beta = 0.3;    // k-NN: fraction of the k^2 combos MI-evaluated
  double gamma = 0.2;   // Pair Opt-dist: fraction kept by the eta filter
  int k = 10;
  double zeta = 0.1;
  std::size_t pair_cap = 200000;
  std::optional<Box> continuous_bounds;
  bool no_repeat = true;
  // Project synthesized pairs onto continuous_bounds.
  bool clamp_to_bounds = false;
  MagnitudeSearch magnitude{};

  void validate() const;  // throws ConfigError
};

struct SelectionDiagnostics {
  std::size_t n_filtered = 0;
  std::size_t n_mi_evals = 0;
  double selection_seconds = 0.0;
  MIEstimate mi_of_selected{};
};

struct SelectionResult {
  QueryPair pair;
  std::optional<IndexPair> pair_indices;  // pair.p = item(first), pair.q = item(second)
  SelectionDiagnostics diagnostics{};
};

// Candidate universe: all unordered pairs (or the pool's own list), minus
// already-asked pairs under no_repeat, uniformly subsampled to pair_cap.
// Sorted lexicographically. Throws if nothing is left.
std::vector<IndexPair> candidate_pairs(const ItemPool& pool,
                                       const StrategyConfig& cfg,
                                       const History& history,
                                       std::mt19937_64& rng);

// Dispatches on cfg.method and fills in diagnostics.
SelectionResult select_query(const StrategyConfig& cfg,
                             const PosteriorState& state,
                             const ResponseModel& model,
                             const ItemPool* pool, const History& history,
                             std::mt19937_64& rng);

SelectionResult active_discrete(const PosteriorState& state,
                                const ResponseModel& model,
                                const ItemPool& pool,
                                std::span<const IndexPair> candidates);

SelectionResult pair_m_dist(const PosteriorState& state,
                            const ResponseModel& model, const ItemPool& pool,
                            const StrategyConfig& cfg,
                            std::span<const IndexPair> candidates);

// lambda = zeta * d / Tr(Sigma).
double opt_dist_lambda(const PosteriorState& state, double zeta);

// eta for the pair, minimised over both orderings.
double opt_dist_eta(const PosteriorState& state, const QueryPair& pair,
                    double r_tilde, double lambda);

SelectionResult pair_opt_dist(const PosteriorState& state,
                              const ResponseModel& model, const ItemPool& pool,
                              const StrategyConfig& cfg,
                              std::span<const IndexPair> candidates);

SelectionResult knn_approx(const PosteriorState& state,
                           const ResponseModel& model, const ItemPool& pool,
                           const StrategyConfig& cfg, const History& history);

SelectionResult random_discrete(const ItemPool& pool,
                                std::span<const IndexPair> candidates,
                                std::mt19937_64& rng);

SelectionResult random_synthesis(const Box& bounds, std::mt19937_64& rng);

}  // namespace activepref
