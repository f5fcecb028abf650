#include "activepref/posterior.hpp"

#include <cmath>
#include <limits>

#include <Eigen/Eigenvalues>

namespace activepref {

PriorSpec PriorSpec::gaussian(Vector mean, Vector stddev) {
  if (mean.size() == 0 || mean.size() != stddev.size()) {
    throw ConfigError("gaussian prior needs matching non-empty mean/stddev",
                      "prior");
  }
  if (!(stddev.array() > 0.0).all()) {
    throw ConfigError("gaussian prior stddev must be positive", "prior.stddev");
  }
  PriorSpec p;
  p.kind = Kind::kGaussian;
  p.mean = std::move(mean);
  p.stddev = std::move(stddev);
  return p;
}

PriorSpec PriorSpec::isotropic_gaussian(Eigen::Index dim, double stddev) {
  return gaussian(Vector::Zero(dim), Vector::Constant(dim, stddev));
}

PriorSpec PriorSpec::uniform_box(Box box) {
  PriorSpec p;
  p.kind = Kind::kUniformBox;
  p.box = std::move(box);
  return p;
}

Eigen::Index PriorSpec::dim() const {
  return kind == Kind::kGaussian ? mean.size() : box.dim();
}

double PriorSpec::log_density(const Vector& w) const {
  if (w.size() != dim()) {
    throw DimensionMismatch("prior and point differ in dimension");
  }
  if (kind == Kind::kGaussian) {
    return -0.5 * ((w - mean).array() / stddev.array()).square().sum();
  }
  return box.contains(w) ? 0.0 : -std::numeric_limits<double>::infinity();
}

Vector PriorSpec::center() const {
  return kind == Kind::kGaussian ? mean : box.center();
}

Vector PriorSpec::scale() const {
  if (kind == Kind::kGaussian) return stddev;
  // Standard deviation of a uniform on [lo, hi].
  return (box.hi - box.lo) / std::sqrt(12.0);
}

namespace {

// Flattened history for the inner sampling loop.
struct CompiledHistory {
  Eigen::Index dim = 0;
  std::vector<double> p;  // n * dim
  std::vector<double> q;
  std::vector<int> y;

  explicit CompiledHistory(const History& history, Eigen::Index d) : dim(d) {
    p.reserve(history.size() * d);
    q.reserve(history.size() * d);
    for (const auto& rec : history) {
      if (rec.pair.p.size() != d || rec.pair.q.size() != d) {
        throw DimensionMismatch("history record dimension differs from prior");
      }
      if (rec.y != 0 && rec.y != 1) {
        throw ConfigError("response must be 0 or 1", "y");
      }
      p.insert(p.end(), rec.pair.p.data(), rec.pair.p.data() + d);
      q.insert(q.end(), rec.pair.q.data(), rec.pair.q.data() + d);
      y.push_back(rec.y);
    }
  }

  double log_likelihood(const ResponseModel& model, const double* w) const {
    double total = 0.0;
    const std::size_t n = y.size();
    for (std::size_t j = 0; j < n; ++j) {
      const double* pj = p.data() + j * dim;
      const double* qj = q.data() + j * dim;
      double a = 0.0;
      double b = 0.0;
      for (Eigen::Index k = 0; k < dim; ++k) {
        const double dq = w[k] - qj[k];
        const double dp = w[k] - pj[k];
        a += dq * dq;
        b += dp * dp;
      }
      const double s = std::hypot(a, b);
      // w = p = q carries no information about the response.
      const double f = s > 0.0 ? (a - b) / (model.sigma0 * s) : 0.0;
      total += y[j] == 1 ? model.link.log_cdf(f) : model.link.log_cdf(-f);
    }
    return total;
  }
};

}  // namespace

double log_posterior(const PriorSpec& prior, const ResponseModel& model,
                     const History& history, const Vector& w) {
  const double lp = prior.log_density(w);
  if (!std::isfinite(lp)) return lp;
  const CompiledHistory compiled(history, prior.dim());
  return lp + compiled.log_likelihood(model, w.data());
}

EigenPair principal_eigenpair(const Matrix& sym, double tol,
                              int max_iterations) {
  const Eigen::Index d = sym.rows();
  EigenPair out;
  out.vector = Vector::Unit(d, 0);
  if (d == 0) return out;

  bool converged = false;
  Vector v = Vector::Unit(d, 0);
  for (int it = 0; it < max_iterations; ++it) {
    const Vector y = sym * v;
    const double lambda = v.dot(y);
    const double residual = (y - lambda * v).norm();
    out.iterations = it + 1;
    out.value = lambda;
    out.vector = v;
    if (residual <= tol * std::abs(lambda) || y.norm() == 0.0) {
      converged = true;
      break;
    }
    v = y / y.norm();
  }

  // A start vector orthogonal to the dominant eigenspace converges to a lesser
  // eigenpair; detect that (and non-convergence) against a dense solve.
  Eigen::SelfAdjointEigenSolver<Matrix> solver(sym);
  const double lambda_max = solver.eigenvalues()(d - 1);
  const double slack = 1e-9 * std::max(std::abs(lambda_max), 1e-300);
  if (!converged || out.value < lambda_max - slack) {
    Vector start = solver.eigenvectors().col(d - 1);
    v = start;
    out.value = lambda_max;
    out.vector = start;
    for (int it = 0; it < 100; ++it) {
      const Vector y = sym * v;
      const double lambda = v.dot(y);
      out.value = lambda;
      out.vector = v;
      if ((y - lambda * v).norm() <= tol * std::abs(lambda) || y.norm() == 0.0) {
        break;
      }
      v = y / y.norm();
    }
  }

  // Canonical sign: first nonzero component positive.
  const double cutoff = 1e-12 * out.vector.cwiseAbs().maxCoeff();
  for (Eigen::Index i = 0; i < d; ++i) {
    if (std::abs(out.vector[i]) > cutoff) {
      if (out.vector[i] < 0.0) out.vector = -out.vector;
      break;
    }
  }
  return out;
}

PosteriorState::PosteriorState(SampleMatrix samples)
    : samples_(std::move(samples)) {
  const Eigen::Index n = samples_.rows();
  const Eigen::Index d = samples_.cols();
  if (n < 1 || d < 1) {
    throw Error("posterior state needs at least one sample");
  }
  mean_ = samples_.colwise().mean().transpose();
  if (n >= 2) {
    const SampleMatrix centered = samples_.rowwise() - mean_.transpose();
    cov_ = (centered.transpose() * centered) / static_cast<double>(n - 1);
    // Symmetrize exactly.
    cov_ = 0.5 * (cov_ + cov_.transpose()).eval();
  } else {
    cov_ = Matrix::Zero(d, d);
  }
  trace_ = cov_.trace();
  const EigenPair ep = principal_eigenpair(cov_);
  lambda1_ = ep.value;
  v1_ = ep.vector;
}

PosteriorState sample_posterior(const PriorSpec& prior,
                                const ResponseModel& model,
                                const History& history,
                                const SamplerConfig& cfg) {
  if (cfg.chains < 1) throw ConfigError("chains must be >= 1", "sampler.chains");
  if (cfg.burn_in < 0) {
    throw ConfigError("burn_in must be >= 0", "sampler.burn_in");
  }
  if (cfg.samples < 2) {
    throw ConfigError("samples per chain must be >= 2", "sampler.samples");
  }
  if (!(cfg.target_accept > 0.0 && cfg.target_accept < 1.0)) {
    throw ConfigError("target_accept must lie in (0, 1)",
                      "sampler.target_accept");
  }

  const Eigen::Index d = prior.dim();
  const CompiledHistory compiled(history, d);
  auto log_target = [&](const Vector& w) {
    const double lp = prior.log_density(w);
    if (!std::isfinite(lp)) return lp;
    return lp + compiled.log_likelihood(model, w.data());
  };

  const Vector start = cfg.initial_point.value_or(prior.center());
  if (start.size() != d) {
    throw DimensionMismatch("sampler initial point has wrong dimension");
  }
  const double start_lp = log_target(start);
  if (!std::isfinite(start_lp)) {
    throw Error("log-posterior is not finite at the chain start");
  }
  Vector base_scale = cfg.initial_scale.value_or(prior.scale());
  if (base_scale.size() != d) {
    throw DimensionMismatch("sampler initial scale has wrong dimension");
  }
  const Vector floor_scale = 1e-12 * prior.scale();
  base_scale = base_scale.cwiseMax(floor_scale);
  const double rw_factor = 2.38 / std::sqrt(static_cast<double>(d));

  SampleMatrix pooled(static_cast<Eigen::Index>(cfg.chains) * cfg.samples, d);
  double accepted_total = 0.0;
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> unif(0.0, 1.0);

  for (int c = 0; c < cfg.chains; ++c) {
    std::mt19937_64 rng(cfg.seed + static_cast<std::uint64_t>(c));
    Vector current = start;
    double current_lp = start_lp;
    Vector axis = rw_factor * base_scale;
    double log_mult = 0.0;
    int adapt_step = 0;

    // Burn-in trace for the mid-run reshaping of per-axis scales.
    const int shape_from = cfg.burn_in / 4;
    const int shape_at = cfg.burn_in / 2;
    Vector sum = Vector::Zero(d);
    Vector sum_sq = Vector::Zero(d);
    int shape_count = 0;

    Vector proposal(d);
    const int total = cfg.burn_in + cfg.samples;
    int accepted_kept = 0;
    for (int t = 0; t < total; ++t) {
      const double mult = std::exp(log_mult);
      for (Eigen::Index k = 0; k < d; ++k) {
        proposal[k] = current[k] + mult * axis[k] * normal(rng);
      }
      const double prop_lp = log_target(proposal);
      const double log_ratio = prop_lp - current_lp;
      const double accept_prob =
          std::isfinite(prop_lp) ? std::min(1.0, std::exp(log_ratio)) : 0.0;
      const bool accept = unif(rng) < accept_prob;
      if (accept) {
        current = proposal;
        current_lp = prop_lp;
      }

      if (t < cfg.burn_in) {
        log_mult += (accept_prob - cfg.target_accept) /
                    std::pow(static_cast<double>(++adapt_step), 0.6);
        if (t >= shape_from && t < shape_at) {
          sum += current;
          sum_sq += current.cwiseProduct(current);
          ++shape_count;
        }
        if (t + 1 == shape_at && shape_count >= 20) {
          const Vector m = sum / shape_count;
          const Vector var =
              (sum_sq / shape_count - m.cwiseProduct(m)).cwiseMax(0.0);
          const Vector sd = var.cwiseSqrt();
          if ((sd.array() > floor_scale.array()).all()) {
            axis = rw_factor * sd;
            log_mult = 0.0;
            adapt_step = 0;
          }
        }
      } else {
        if (accept) ++accepted_kept;
        pooled.row(static_cast<Eigen::Index>(c) * cfg.samples +
                   (t - cfg.burn_in)) = current.transpose();
      }
    }
    accepted_total += static_cast<double>(accepted_kept) / cfg.samples;
  }

  PosteriorState state(std::move(pooled));
  state.set_acceptance_rate(accepted_total / cfg.chains);
  return state;
}

}  // namespace activepref
