#include "activepref/link_model.hpp"

#include <cmath>

namespace activepref {

double LinkFunction::cdf(double x) const {
  // Logistic; evaluated on the side that does not overflow.
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

double LinkFunction::log_cdf(double x) const {
  if (x >= 0.0) return -std::log1p(std::exp(-x));
  return x - std::log1p(std::exp(x));
}

double LinkFunction::pdf(double x) const {
  const double e = std::exp(-std::abs(x));
  const double denom = 1.0 + e;
  return e / (denom * denom);
}

double LinkFunction::pdf_derivative(double x) const {
  return pdf(x) * (1.0 - 2.0 * cdf(x));
}

double LinkFunction::log_odds(double x) const { return log_cdf(x) - log_cdf(-x); }

double LinkFunction::fisher_weight(double x) const {
  // For the logistic link Phi' = Phi (1 - Phi), so the ratio collapses.
  return pdf(x);
}

ResponseModel::ResponseModel(double sigma0_in, LinkFunction link_in)
    : sigma0(sigma0_in), link(link_in) {
  if (!(sigma0 > 0.0) || !std::isfinite(sigma0)) {
    throw ConfigError("sigma0 must be positive and finite", "sigma0");
  }
}

namespace {

void check_dims(const Vector& w, const QueryPair& pair) {
  if (w.size() != pair.p.size() || w.size() != pair.q.size()) {
    throw DimensionMismatch("user point and query items differ in dimension");
  }
}

}  // namespace

double f_value(const ResponseModel& model, const Vector& w,
               const QueryPair& pair) {
  check_dims(w, pair);
  const double a = (w - pair.q).squaredNorm();
  const double b = (w - pair.p).squaredNorm();
  const double s = std::hypot(a, b);
  if (s == 0.0) {
    throw DegenerateQuery("f is undefined when w = p = q");
  }
  return (a - b) / (model.sigma0 * s);
}

double f_value_hyperplane(const ResponseModel& model, const Vector& w,
                          const Hyperplane& h) {
  if (w.size() != h.a.size() || w.size() != h.b.size()) {
    throw DimensionMismatch("user point and hyperplane differ in dimension");
  }
  const Vector delta = w - h.b;
  const double proj = h.a.dot(delta);
  const double u = delta.squaredNorm() + h.a.squaredNorm() / 16.0;
  const double denom2 = 2.0 * u * u + 0.5 * proj * proj;
  if (denom2 == 0.0) {
    throw DegenerateQuery("f is undefined when a = 0 and w = b");
  }
  return proj / (model.sigma0 * std::sqrt(denom2));
}

double response_probability(const ResponseModel& model, const Vector& w,
                            const QueryPair& pair) {
  return model.link.cdf(f_value(model, w, pair));
}

int simulate_response(const OracleConfig& oracle, const QueryPair& pair,
                      std::mt19937_64& rng) {
  if (oracle.mode == OracleConfig::Mode::kDeterministic) {
    check_dims(oracle.true_point, pair);
    const double dp = (oracle.true_point - pair.p).squaredNorm();
    const double dq = (oracle.true_point - pair.q).squaredNorm();
    return dp < dq ? 1 : 0;
  }
  const double prob = response_probability(oracle.model, oracle.true_point, pair);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  return unif(rng) < prob ? 1 : 0;
}

}  // namespace activepref
