#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <random>
#include <vector>

#include "activepref/approximation.hpp"
#include "activepref/learner.hpp"
#include "activepref/robosim.hpp"

namespace activepref {

// P(A preferred) = 1 / (1 + exp(-kappa (err_b - err_a))).
double gain_preference_probability(double err_a, double err_b, double kappa);

struct GainComparison {
  double error_a = 0.0;  // mean over scenarios, divergence penalised
  double error_b = 0.0;
  double prob_a = 0.5;
  int diverged_a = 0;  // diverged scenarios
  int diverged_b = 0;
  bool coin_flip = false;  // every simulation diverged
  int y = 0;               // 1 when A is preferred
};

// Per-scenario tracking errors, nullopt where the simulation diverged.
std::vector<std::optional<double>> scenario_errors(const GainVector& gains,
                                                   const std::vector<Scenario>& scenarios,
                                                   double dt = 0.02);

// Simulated respondent comparing two gain vectors. A diverged simulation
// scores 10x the worst finite error in the comparison.
GainComparison gain_oracle(const GainVector& a, const GainVector& b,
                           const std::vector<Scenario>& scenarios, double kappa,
                           std::mt19937_64& rng, double dt = 0.02);

// Mean tracking error over the scenarios; +inf if any simulation diverged.
double mean_tracking_error(const GainVector& gains, const std::vector<Scenario>& scenarios,
                           double dt = 0.02);

struct GainTuningConfig {
  std::vector<Scenario> scenarios;
  Method strategy = Method::kInfoSynth;
  int queries = 30;
  double kappa = 5.0;
  double sigma0 = 0.1;
  double gain_lo = 0.05;
  double gain_hi = 20.0;
  double prior_mean_log = 0.0;
  double prior_sd = 1.0;
  std::size_t pool_size = 50;  // active_discrete candidate gains
  SamplerConfig sampler{};
  std::uint64_t seed = 0;
  double dt = 0.02;

  void validate() const;  // throws ConfigError
};

// Learner over W = log(gains) shared by tune_gains and the session service.
ActiveLearner make_gain_learner(const GainTuningConfig& cfg);

struct TuningStep {
  int query_index = 0;
  GainVector estimate;  // exp of the posterior mean
  double mean_error = 0.0;
  std::optional<GainVector> gains_a;
  std::optional<GainVector> gains_b;
  int y = -1;
  bool coin_flip = false;
  double mi_bits = 0.0;
  double posterior_trace = 0.0;
  double selection_seconds = 0.0;
};

// Row 0 is the prior estimate; row q follows the q-th simulated response.
std::vector<TuningStep> tune_gains(const GainTuningConfig& cfg);

void write_tuning_steps(std::ostream& out, const std::vector<TuningStep>& steps,
                        bool omit_timing = false);

}  // namespace activepref
