#pragma once

#include "activepref/link_model.hpp"
#include "activepref/posterior.hpp"
#include "activepref/types.hpp"

namespace activepref {

// Mutual information between the user point and a binary response, in bits.
struct MIEstimate {
  double value = 0.0;
  double pi = 0.5;  // MC estimate of E_W[Phi(f(W))]
  Eigen::Index n_samples = 0;
};

struct MIGradient {
  Vector grad_p;
  Vector grad_q;

  Vector stacked() const;
};

// Blocks of the 2d x 2d Hessian with respect to z = (p, q). `pq` holds
// d^2 I / dp_i dq_j.
struct MIHessian {
  Matrix pp;
  Matrix pq;
  Matrix qp;
  Matrix qq;

  Matrix full() const;
};

// pi is clamped to [kPiClamp, 1 - kPiClamp] before any log((1-pi)/pi).
inline constexpr double kPiClamp = 1e-9;

// Binary entropy in bits; H(0) = H(1) = 0.
double binary_entropy(double p);

// All estimators below average over the given (frozen) sample rows, so
// derivative estimates and finite differences share common random numbers.
MIEstimate mutual_information(const SampleMatrix& samples,
                              const ResponseModel& model,
                              const QueryPair& pair);
MIEstimate mutual_information(const PosteriorState& state,
                              const ResponseModel& model,
                              const QueryPair& pair);

MIGradient mi_gradient(const SampleMatrix& samples, const ResponseModel& model,
                       const QueryPair& pair);
MIGradient mi_gradient(const PosteriorState& state, const ResponseModel& model,
                       const QueryPair& pair);

MIHessian mi_hessian(const SampleMatrix& samples, const ResponseModel& model,
                     const QueryPair& pair);
MIHessian mi_hessian(const PosteriorState& state, const ResponseModel& model,
                     const QueryPair& pair);

// Quadratic loss model around the optimal pair z*: I(z*) - I(z) ~ 1/2 |dz|_M^2
// with M = -H(z*) projected onto the PSD cone.
struct MahalanobisMetric {
  Matrix M;
  Vector z_star;
  // Number of Hessian eigenvalues clamped during PSD projection.
  int clamped_eigenvalues = 0;

  static MahalanobisMetric at(const PosteriorState& state,
                              const ResponseModel& model,
                              const QueryPair& optimum);
  static MahalanobisMetric from_hessian(const Matrix& hessian, Vector z_star);

  Eigen::Index dim() const { return z_star.size() / 2; }
};

// 1/2 (z - z*)^T M (z - z*), minimised over the two orderings of the pair.
double mahalanobis_distance(const MahalanobisMetric& metric,
                            const QueryPair& pair);

}  // namespace activepref
