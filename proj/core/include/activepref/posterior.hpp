#pragma once

#include <limits>
#include <optional>
#include <random>
#include <utility>
#include <vector>

#include "activepref/link_model.hpp"
#include "activepref/types.hpp"

namespace activepref {

// Prior density over the user point.
struct PriorSpec {
  enum class Kind { kGaussian, kUniformBox };

  Kind kind = Kind::kGaussian;
  Vector mean;    // gaussian
  Vector stddev;  // gaussian, per axis, > 0
  Box box;        // uniform box

  static PriorSpec gaussian(Vector mean, Vector stddev);
  static PriorSpec isotropic_gaussian(Eigen::Index dim, double stddev = 1.0);
  static PriorSpec uniform_box(Box box);

  Eigen::Index dim() const;
  // Up to an additive constant; -inf outside a uniform box.
  double log_density(const Vector& w) const;
  // Prior mean or box center.
  Vector center() const;
  // Per-axis scale used to seed the proposal.
  Vector scale() const;
};

struct ResponseRecord {
  QueryPair pair;
  int y = 0;  // 1 when pair.p was preferred
  double selection_seconds = 0.0;
  // Set when the pair was taken from an item pool.
  std::optional<std::pair<std::size_t, std::size_t>> pool_indices;
};

using History = std::vector<ResponseRecord>;

double log_posterior(const PriorSpec& prior, const ResponseModel& model,
                     const History& history, const Vector& w);

struct SamplerConfig {
  int chains = 4;
  int burn_in = 500;               // per chain
  int samples = 250;               // kept per chain
  double target_accept = 0.3;
  std::uint64_t seed = 0;
  // Chain start and initial proposal scale. When unset the chain starts at the
  // prior center with the prior's scale.
  std::optional<Vector> initial_point;
  std::optional<Vector> initial_scale;
};

// Immutable summary of a pooled sample set.
class PosteriorState {
 public:
  PosteriorState() = default;
  explicit PosteriorState(SampleMatrix samples);

  const SampleMatrix& samples() const { return samples_; }
  Eigen::Index num_samples() const { return samples_.rows(); }
  Eigen::Index dim() const { return samples_.cols(); }

  const Vector& mean() const { return mean_; }
  const Matrix& covariance() const { return cov_; }
  double principal_eigenvalue() const { return lambda1_; }
  // Unit norm; first nonzero component positive.
  const Vector& principal_eigenvector() const { return v1_; }
  double trace() const { return trace_; }

  // Mean acceptance rate of the chains that produced the samples (NaN when
  // the state was built directly from samples).
  double acceptance_rate() const { return acceptance_; }
  void set_acceptance_rate(double a) { acceptance_ = a; }

 private:
  SampleMatrix samples_;
  Vector mean_;
  Matrix cov_;
  double lambda1_ = 0.0;
  Vector v1_;
  double trace_ = 0.0;
  double acceptance_ = std::numeric_limits<double>::quiet_NaN();
};

struct EigenPair {
  double value = 0.0;
  Vector vector;
  int iterations = 0;
};

// Dominant eigenpair of a symmetric PSD matrix by power iteration from e1,
// stopping when |A v - lambda v| <= tol * lambda.
EigenPair principal_eigenpair(const Matrix& sym, double tol = 1e-8,
                              int max_iterations = 100000);

// Random-walk Metropolis with per-axis Gaussian proposals, step size adapted
// towards cfg.target_accept during burn-in and frozen afterwards.
PosteriorState sample_posterior(const PriorSpec& prior,
                                const ResponseModel& model,
                                const History& history,
                                const SamplerConfig& cfg);

inline Vector estimate_user(const PosteriorState& state) { return state.mean(); }

}  // namespace activepref
