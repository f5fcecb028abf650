#pragma once

#include <random>

#include "activepref/types.hpp"

namespace activepref {

// Symmetric link Phi with Phi(-x) = 1 - Phi(x). Only the logistic link is
// provided; the switch keeps room for other symmetric CDFs.
class LinkFunction {
 public:
  enum class Kind { kLogistic };

  constexpr LinkFunction() = default;
  constexpr explicit LinkFunction(Kind kind) : kind_(kind) {}

  Kind kind() const { return kind_; }

  double cdf(double x) const;
  // log Phi(x), accurate in both tails.
  double log_cdf(double x) const;
  double pdf(double x) const;             // Phi'(x)
  double pdf_derivative(double x) const;  // Phi''(x)
  // log(Phi(x) / Phi(-x)).
  double log_odds(double x) const;
  // Phi'(x)^2 / (Phi(x) Phi(-x)), finite for all x.
  double fisher_weight(double x) const;

 private:
  Kind kind_ = Kind::kLogistic;
};

// Confidence-aware response model: noise grows with the squared distances
// between the user and both query items.
struct ResponseModel {
  double sigma0 = 0.1;
  LinkFunction link{};

  ResponseModel() = default;
  explicit ResponseModel(double sigma0_in, LinkFunction link_in = {});
};

// Score f(w) = (|w-q|^2 - |w-p|^2) / (sigma0 sqrt(|w-q|^4 + |w-p|^4)).
// Throws DegenerateQuery when w = p = q.
double f_value(const ResponseModel& model, const Vector& w,
               const QueryPair& pair);

// The same score written in terms of the bisecting hyperplane.
double f_value_hyperplane(const ResponseModel& model, const Vector& w,
                          const Hyperplane& h);

// P(Y = 1 | w), i.e. probability that p is preferred.
double response_probability(const ResponseModel& model, const Vector& w,
                            const QueryPair& pair);

// Simulated respondent with a hidden ideal point.
struct OracleConfig {
  enum class Mode { kModelConsistent, kDeterministic };

  Vector true_point;
  Mode mode = Mode::kModelConsistent;
  // Equal to the learner's sigma0 unless configured otherwise.
  ResponseModel model{};
};

// Returns 1 when p is preferred. Deterministic mode ignores the generator.
int simulate_response(const OracleConfig& oracle, const QueryPair& pair,
                      std::mt19937_64& rng);

}  // namespace activepref
