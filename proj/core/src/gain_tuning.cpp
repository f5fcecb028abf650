#include "activepref/gain_tuning.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <limits>
#include <ostream>

namespace activepref {

namespace {

constexpr std::uint64_t kPoolStream = 21;
constexpr std::uint64_t kOracleStream = 22;
constexpr std::uint64_t kLearnerStream = 23;
constexpr double kDivergencePenalty = 10.0;

}  // namespace

double gain_preference_probability(double err_a, double err_b, double kappa) {
  const double x = kappa * (err_b - err_a);
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

std::vector<std::optional<double>> scenario_errors(const GainVector& gains,
                                                   const std::vector<Scenario>& scenarios,
                                                   double dt) {
  std::vector<std::optional<double>> out;
  out.reserve(scenarios.size());
  for (const auto& sc : scenarios) {
    const SimulationOutcome sim = simulate_until_divergence(gains, sc, dt);
    if (sim.diverged) {
      out.emplace_back();
    } else {
      out.emplace_back(tracking_error(sim.trajectory, sc.path));
    }
  }
  return out;
}

GainComparison gain_oracle(const GainVector& a, const GainVector& b,
                           const std::vector<Scenario>& scenarios, double kappa,
                           std::mt19937_64& rng, double dt) {
  if (!(kappa > 0.0)) throw ConfigError("kappa must be positive", "kappa");
  if (scenarios.empty()) throw ConfigError("empty scenario set", "scenarios");
  auto fut_b = std::async(std::launch::async, [&] { return scenario_errors(b, scenarios, dt); });
  const auto errs_a = scenario_errors(a, scenarios, dt);
  const auto errs_b = fut_b.get();

  double worst = -1.0;
  for (const auto* errs : {&errs_a, &errs_b}) {
    for (const auto& e : *errs) {
      if (e) worst = std::max(worst, *e);
    }
  }
  GainComparison cmp;
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  if (worst < 0.0) {
    cmp.coin_flip = true;
    cmp.diverged_a = cmp.diverged_b = static_cast<int>(scenarios.size());
    cmp.error_a = cmp.error_b = std::numeric_limits<double>::infinity();
    cmp.y = unif(rng) < 0.5 ? 1 : 0;
    return cmp;
  }
  const double penalty = kDivergencePenalty * (worst > 0.0 ? worst : 1.0);
  auto mean_error = [&](const std::vector<std::optional<double>>& errs, int& diverged) {
    double total = 0.0;
    for (const auto& e : errs) {
      if (e) {
        total += *e;
      } else {
        total += penalty;
        ++diverged;
      }
    }
    return total / static_cast<double>(errs.size());
  };
  cmp.error_a = mean_error(errs_a, cmp.diverged_a);
  cmp.error_b = mean_error(errs_b, cmp.diverged_b);
  cmp.prob_a = gain_preference_probability(cmp.error_a, cmp.error_b, kappa);
  cmp.y = unif(rng) < cmp.prob_a ? 1 : 0;
  return cmp;
}

double mean_tracking_error(const GainVector& gains, const std::vector<Scenario>& scenarios,
                           double dt) {
  if (scenarios.empty()) throw ConfigError("empty scenario set", "scenarios");
  double total = 0.0;
  for (const auto& e : scenario_errors(gains, scenarios, dt)) {
    if (!e) return std::numeric_limits<double>::infinity();
    total += *e;
  }
  return total / static_cast<double>(scenarios.size());
}

void GainTuningConfig::validate() const {
  if (scenarios.empty()) throw ConfigError("empty scenario set", "scenarios");
  if (strategy != Method::kInfoSynth && strategy != Method::kActiveDiscrete &&
      strategy != Method::kRandomSynthesis) {
    throw ConfigError("gain tuning supports info_synth, active_discrete and random_synthesis",
                      "strategy");
  }
  if (queries < 0) throw ConfigError("queries must be >= 0", "queries");
  if (!(kappa > 0.0)) throw ConfigError("kappa must be positive", "kappa");
  if (!(sigma0 > 0.0)) throw ConfigError("sigma0 must be positive", "sigma0");
  if (!(gain_lo > 0.0 && gain_lo < gain_hi)) {
    throw ConfigError("gain bounds must satisfy 0 < lo < hi", "gain_bounds");
  }
  if (!(prior_sd > 0.0)) throw ConfigError("prior_sd must be positive", "prior_sd");
  if (strategy == Method::kActiveDiscrete && pool_size < 2) {
    throw ConfigError("pool_size must be >= 2", "pool_size");
  }
  if (!(dt > 0.0)) throw ConfigError("dt must be positive", "dt");
}

ActiveLearner make_gain_learner(const GainTuningConfig& cfg) {
  cfg.validate();
  constexpr Eigen::Index d = 3;
  const Box box = Box::cube(d, std::log(cfg.gain_lo), std::log(cfg.gain_hi));
  LearnerConfig lc;
  lc.prior = PriorSpec::gaussian(Vector::Constant(d, cfg.prior_mean_log),
                                 Vector::Constant(d, cfg.prior_sd));
  lc.model = ResponseModel(cfg.sigma0);
  lc.strategy.method = cfg.strategy;
  lc.strategy.continuous_bounds = box;
  lc.strategy.clamp_to_bounds = true;
  lc.sampler = cfg.sampler;
  lc.seed = mix_seed(cfg.seed, kLearnerStream);

  std::optional<ItemPool> pool;
  if (cfg.strategy == Method::kActiveDiscrete) {
    std::mt19937_64 rng(mix_seed(cfg.seed, kPoolStream));
    SampleMatrix items(static_cast<Eigen::Index>(cfg.pool_size), d);
    for (Eigen::Index r = 0; r < items.rows(); ++r) {
      for (Eigen::Index c = 0; c < d; ++c) {
        std::uniform_real_distribution<double> u(box.lo[c], box.hi[c]);
        items(r, c) = u(rng);
      }
    }
    pool.emplace(std::move(items));
  }
  return ActiveLearner(std::move(lc), std::move(pool));
}

std::vector<TuningStep> tune_gains(const GainTuningConfig& cfg) {
  ActiveLearner learner = make_gain_learner(cfg);
  std::mt19937_64 oracle_rng(mix_seed(cfg.seed, kOracleStream));
  std::vector<TuningStep> out;
  auto push = [&](TuningStep step) {
    step.estimate = GainVector::from_log(learner.posterior().mean());
    step.mean_error = mean_tracking_error(step.estimate, cfg.scenarios, cfg.dt);
    step.posterior_trace = learner.posterior().trace();
    out.push_back(step);
  };
  push(TuningStep{});
  for (int q = 1; q <= cfg.queries; ++q) {
    const SelectionResult sel = learner.propose();
    TuningStep step;
    step.query_index = q;
    step.gains_a = GainVector::from_log(sel.pair.p);
    step.gains_b = GainVector::from_log(sel.pair.q);
    const GainComparison cmp =
        gain_oracle(*step.gains_a, *step.gains_b, cfg.scenarios, cfg.kappa, oracle_rng, cfg.dt);
    step.y = cmp.y;
    step.coin_flip = cmp.coin_flip;
    step.mi_bits = sel.diagnostics.mi_of_selected.value;
    step.selection_seconds = sel.diagnostics.selection_seconds;
    learner.record(sel, cmp.y);
    push(step);
  }
  return out;
}

void write_tuning_steps(std::ostream& out, const std::vector<TuningStep>& steps,
                        bool omit_timing) {
  out << "query_index,k_x,k_y,k_theta,mean_error,choice,coin_flip,mi_bits,"
         "posterior_trace,selection_seconds\n";
  const auto old_precision = out.precision(17);
  for (const auto& s : steps) {
    const char* choice = s.y < 0 ? "" : (s.y == 1 ? "A" : "B");
    out << s.query_index << ',' << s.estimate.k_x << ',' << s.estimate.k_y << ','
        << s.estimate.k_theta << ',' << s.mean_error << ',' << choice << ','
        << (s.coin_flip ? 1 : 0) << ',' << s.mi_bits << ',' << s.posterior_trace << ','
        << (omit_timing ? 0.0 : s.selection_seconds) << '\n';
  }
  out.precision(old_precision);
}

}  // namespace activepref
