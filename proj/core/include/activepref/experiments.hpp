#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "activepref/approximation.hpp"
#include "activepref/learner.hpp"
#include "activepref/link_model.hpp"
#include "activepref/posterior.hpp"

namespace activepref {

struct SyntheticSpec {
  Eigen::Index d = 2;
  std::size_t n_items = 100;
  double item_lo = -4.0;
  double item_hi = 4.0;
  double user_lo = -1.0;
  double user_hi = 1.0;
  int trials = 5;
  int queries = 100;
  double sigma0 = 0.1;
  std::uint64_t seed = 0;

  void validate() const;  // throws ConfigError
};

struct SyntheticDataset {
  ItemPool pool;
  Vector true_point;
};

SyntheticDataset generate_synthetic(const SyntheticSpec& spec,
                                    std::mt19937_64& rng);

// CSV, one item per row, optional "# d=<dim>" line; other '#' lines and
// blank lines are skipped. Throws ParseError naming line and column.
ItemPool load_embeddings(const std::string& path);
ItemPool parse_embeddings(std::istream& in, const std::string& source = "<stream>");
void save_embeddings(const std::string& path, const SampleMatrix& items);

// |w_hat - w_star|^2 / d.
double mse(const Vector& w_hat, const Vector& w_star);

// Fraction of discordant item pairs between the distance rankings induced by
// w_hat and w_star. Exact distance ties are broken by item index.
double kendall_tau_distance(const Vector& w_hat, const Vector& w_star,
                            const SampleMatrix& items);

struct RunRecord {
  int trial = 0;
  int query_index = 0;
  std::string method;
  double mse = 0.0;
  double kendall_tau = 0.0;
  double selection_seconds = 0.0;
  double mi_bits = 0.0;
  double posterior_trace = 0.0;
};

inline constexpr const char* kRunRecordHeader =
    "trial,query_index,method,mse,kendall_tau,selection_seconds,mi_bits,"
    "posterior_trace";

// With omit_timing the selection_seconds column is written as 0 so that
// files from identical seeds compare byte-for-byte.
void write_records(std::ostream& out, const std::vector<RunRecord>& records,
                   bool omit_timing = false, bool header = true);

struct ExperimentConfig {
  SyntheticSpec spec{};
  StrategyConfig strategy{};
  SamplerConfig sampler{};
  // Defaults to N(0, I) (or moment-matched to the pool for embeddings).
  std::optional<PriorSpec> prior;
  OracleConfig::Mode oracle_mode = OracleConfig::Mode::kModelConsistent;
  // Oracle noise; the learner's sigma0 when unset.
  std::optional<double> oracle_sigma0;
  // Fixed embeddings instead of a fresh synthetic pool per trial.
  std::optional<ItemPool> embeddings;
  // Worker threads for independent trials; 0 = hardware concurrency.
  int threads = 1;
};

struct TrialResult {
  int trial = 0;
  std::vector<RunRecord> records;  // query_index 0 is the prior estimate
  std::optional<std::string> error;
};

// Runs every trial; a failing trial carries its error and the others still
// complete. Results are ordered by trial and independent of `threads`.
std::vector<TrialResult> run_active_loop(const ExperimentConfig& cfg);

// One trial against a given dataset; the building block of run_active_loop.
std::vector<RunRecord> run_trial(const ExperimentConfig& cfg, int trial,
                                 const SyntheticDataset& data);

// Dataset used for trial `trial` (fresh synthetic or fixed embeddings).
SyntheticDataset trial_dataset(const ExperimentConfig& cfg, int trial);

}  // namespace activepref
