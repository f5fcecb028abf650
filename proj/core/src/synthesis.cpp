#include "activepref/synthesis.hpp"

#include <cmath>
#include <numbers>
#include <vector>

namespace activepref {

namespace {

// Per-sample projections onto v1: the objective only needs v1^T s and |s|^2.
class MagnitudeObjective {
 public:
  MagnitudeObjective(const PosteriorState& state, const ResponseModel& model)
      : model_(model) {
    const SampleMatrix& samples = state.samples();
    const Vector& mu = state.mean();
    const Vector& v1 = state.principal_eigenvector();
    proj_.resize(samples.rows());
    norm2_.resize(samples.rows());
    for (Eigen::Index r = 0; r < samples.rows(); ++r) {
      const Vector s = samples.row(r).transpose() - mu;
      proj_[r] = v1.dot(s);
      norm2_[r] = s.squaredNorm();
    }
  }

  double operator()(double r) const {
    const LinkFunction& link = model_.link;
    const double r2 = r * r;
    double total = 0.0;
    for (std::size_t i = 0; i < proj_.size(); ++i) {
      const double u = norm2_[i] + r2;
      const double denom =
          model_.sigma0 * std::sqrt(2.0 * u * u + 8.0 * r2 * proj_[i] * proj_[i]);
      const double f = denom > 0.0 ? 4.0 * r * proj_[i] / denom : 0.0;
      const double lp = link.log_cdf(f);
      const double lq = link.log_cdf(-f);
      total -= std::exp(lp) * lp + std::exp(lq) * lq;
    }
    return total / static_cast<double>(proj_.size()) / std::numbers::ln2;
  }

 private:
  const ResponseModel& model_;
  std::vector<double> proj_;
  std::vector<double> norm2_;
};

}  // namespace

double expected_conditional_entropy(const PosteriorState& state,
                                    const ResponseModel& model, double r) {
  return MagnitudeObjective(state, model)(r);
}

double optimize_magnitude(const PosteriorState& state,
                          const ResponseModel& model,
                          const MagnitudeSearch& search) {
  if (state.num_samples() < 2) {
    throw Error("magnitude search needs at least two posterior samples");
  }
  const double trace = state.trace();
  if (!(trace > 0.0) || !(state.principal_eigenvalue() > 0.0)) {
    throw Error("degenerate posterior: covariance trace is zero");
  }
  const MagnitudeObjective objective(state, model);
  const double r0 = std::sqrt(trace);
  const double log_lo = std::log(r0 * search.lo_factor);
  const double log_hi = std::log(r0 * search.hi_factor);

  // Coarse log-spaced scan picks the basin, golden section refines inside it.
  const int n = std::max(search.coarse_points, 3);
  const double step = (log_hi - log_lo) / (n - 1);
  int best = 0;
  double best_val = objective(std::exp(log_lo));
  for (int i = 1; i < n; ++i) {
    const double val = objective(std::exp(log_lo + i * step));
    if (val < best_val) {
      best_val = val;
      best = i;
    }
  }
  double a = log_lo + std::max(best - 1, 0) * step;
  double b = log_lo + std::min(best + 1, n - 1) * step;

  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  // Width in log r approximates relative tolerance in r.
  const double tol = std::log1p(search.rel_tol);
  double c = b - inv_phi * (b - a);
  double d = a + inv_phi * (b - a);
  double fc = objective(std::exp(c));
  double fd = objective(std::exp(d));
  while (b - a > tol) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = objective(std::exp(c));
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = objective(std::exp(d));
    }
  }
  const double log_r = 0.5 * (a + b);
  const double refined = objective(std::exp(log_r));
  // The scan point wins only if the bracket refinement somehow lost ground.
  if (best_val < refined) return std::exp(log_lo + best * step);
  return std::exp(log_r);
}

SynthesizedQuery synthesize(const PosteriorState& state,
                            const ResponseModel& model,
                            const MagnitudeSearch& search) {
  SynthesizedQuery out;
  out.r_tilde = optimize_magnitude(state, model, search);
  out.direction = state.principal_eigenvector();
  const Vector offset = out.r_tilde * out.direction;
  out.pair = QueryPair(state.mean() + offset, state.mean() - offset);
  out.a_tilde = 4.0 * offset;
  return out;
}

}  // namespace activepref
