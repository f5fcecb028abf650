#include "activepref/info_gain.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <Eigen/Eigenvalues>

namespace activepref {

namespace {

constexpr double kInvLn2 = 1.0 / std::numbers::ln2;

void check_pair(const SampleMatrix& samples, const QueryPair& pair) {
  if (samples.rows() < 1) throw Error("estimator needs at least one sample");
  if (samples.cols() != pair.p.size() || samples.cols() != pair.q.size()) {
    throw DimensionMismatch("samples and query pair differ in dimension");
  }
}

// Entropy (nats) of a Bernoulli(Phi(f)) response.
double response_entropy_nats(const LinkFunction& link, double f) {
  const double lp = link.log_cdf(f);
  const double lq = link.log_cdf(-f);
  return -(std::exp(lp) * lp + std::exp(lq) * lq);
}

double clamp_pi(double pi) { return std::clamp(pi, kPiClamp, 1.0 - kPiClamp); }

// Per-sample geometry of the score and its first derivatives.
struct SampleTerms {
  double a = 0.0;  // |w - q|^2
  double b = 0.0;  // |w - p|^2
  double s = 0.0;  // sqrt(a^2 + b^2)
  double f = 0.0;
  bool degenerate = false;
};

SampleTerms sample_terms(const ResponseModel& model, const double* w,
                         const QueryPair& pair, Vector& u, Vector& v) {
  const Eigen::Index d = pair.p.size();
  SampleTerms t;
  for (Eigen::Index k = 0; k < d; ++k) {
    u[k] = w[k] - pair.p[k];
    v[k] = w[k] - pair.q[k];
    t.a += v[k] * v[k];
    t.b += u[k] * u[k];
  }
  t.s = std::hypot(t.a, t.b);
  if (t.s == 0.0) {
    t.degenerate = true;
    return t;
  }
  t.f = (t.a - t.b) / (model.sigma0 * t.s);
  return t;
}

// m(i, j) += c * (x_i * y_j); the bracketing makes the (y, x) call produce the
// exact transpose.
void add_outer(Matrix& m, double c, const Vector& x, const Vector& y) {
  const Eigen::Index d = x.size();
  for (Eigen::Index j = 0; j < d; ++j) {
    for (Eigen::Index i = 0; i < d; ++i) {
      m(i, j) += c * (x[i] * y[j]);
    }
  }
}

}  // namespace

Vector MIGradient::stacked() const {
  Vector z(grad_p.size() + grad_q.size());
  z << grad_p, grad_q;
  return z;
}

Matrix MIHessian::full() const {
  const Eigen::Index d = pp.rows();
  Matrix h(2 * d, 2 * d);
  h.topLeftCorner(d, d) = pp;
  h.topRightCorner(d, d) = pq;
  h.bottomLeftCorner(d, d) = qp;
  h.bottomRightCorner(d, d) = qq;
  return h;
}

double binary_entropy(double p) {
  if (p <= 0.0 || p >= 1.0) return 0.0;
  return -(p * std::log2(p) + (1.0 - p) * std::log2(1.0 - p));
}

MIEstimate mutual_information(const SampleMatrix& samples,
                              const ResponseModel& model,
                              const QueryPair& pair) {
  check_pair(samples, pair);
  const Eigen::Index n = samples.rows();
  const Eigen::Index d = samples.cols();
  MIEstimate out;
  out.n_samples = n;
  if (pair.p == pair.q) {
    // Response independent of W: f = 0 everywhere (including w = p).
    out.value = 0.0;
    out.pi = 0.5;
    return out;
  }
  const double* pp = pair.p.data();
  const double* qq = pair.q.data();
  double sum_prob = 0.0;
  double sum_cond = 0.0;
  for (Eigen::Index r = 0; r < n; ++r) {
    const double* w = samples.row(r).data();
    double a = 0.0;
    double b = 0.0;
    for (Eigen::Index k = 0; k < d; ++k) {
      const double dq = w[k] - qq[k];
      const double dp = w[k] - pp[k];
      a += dq * dq;
      b += dp * dp;
    }
    const double s = std::hypot(a, b);
    const double f = s > 0.0 ? (a - b) / (model.sigma0 * s) : 0.0;
    sum_prob += model.link.cdf(f);
    sum_cond += response_entropy_nats(model.link, f);
  }
  out.pi = sum_prob / static_cast<double>(n);
  const double cond = sum_cond / static_cast<double>(n) * kInvLn2;
  out.value = binary_entropy(out.pi) - cond;
  return out;
}

MIEstimate mutual_information(const PosteriorState& state,
                              const ResponseModel& model,
                              const QueryPair& pair) {
  return mutual_information(state.samples(), model, pair);
}

MIGradient mi_gradient(const SampleMatrix& samples, const ResponseModel& model,
                       const QueryPair& pair) {
  check_pair(samples, pair);
  const Eigen::Index n = samples.rows();
  const Eigen::Index d = samples.cols();
  const LinkFunction& link = model.link;

  Vector u(d), v(d);
  double sum_prob = 0.0;
  Vector dpi_p = Vector::Zero(d);  // sum Phi'(f) grad_p f
  Vector dpi_q = Vector::Zero(d);
  Vector dg_p = Vector::Zero(d);   // sum log(Phi/Phi(-f)) Phi'(f) grad_p f
  Vector dg_q = Vector::Zero(d);
  for (Eigen::Index r = 0; r < n; ++r) {
    const SampleTerms t = sample_terms(model, samples.row(r).data(), pair, u, v);
    if (t.degenerate) {
      sum_prob += 0.5;
      continue;
    }
    sum_prob += link.cdf(t.f);
    const double s3 = t.s * t.s * t.s;
    const double cp = 2.0 * t.a * (t.a + t.b) / (model.sigma0 * s3);
    const double cq = -2.0 * t.b * (t.a + t.b) / (model.sigma0 * s3);
    const double dens = link.pdf(t.f);
    const double lo = link.log_odds(t.f);
    dpi_p.noalias() += (dens * cp) * u;
    dpi_q.noalias() += (dens * cq) * v;
    dg_p.noalias() += (lo * dens * cp) * u;
    dg_q.noalias() += (lo * dens * cq) * v;
  }
  const double inv_n = 1.0 / static_cast<double>(n);
  const double pi = clamp_pi(sum_prob * inv_n);
  const double dh = std::log((1.0 - pi) / pi);

  MIGradient g;
  g.grad_p = (dh * dpi_p + dg_p) * (inv_n * kInvLn2);
  g.grad_q = (dh * dpi_q + dg_q) * (inv_n * kInvLn2);
  return g;
}

MIGradient mi_gradient(const PosteriorState& state, const ResponseModel& model,
                       const QueryPair& pair) {
  return mi_gradient(state.samples(), model, pair);
}

MIHessian mi_hessian(const SampleMatrix& samples, const ResponseModel& model,
                     const QueryPair& pair) {
  check_pair(samples, pair);
  const Eigen::Index n = samples.rows();
  const Eigen::Index d = samples.cols();
  const LinkFunction& link = model.link;
  const double sigma0 = model.sigma0;
  const double inv_n = 1.0 / static_cast<double>(n);

  Vector u(d), v(d);

  // First pass: pi and its gradients.
  double sum_prob = 0.0;
  Vector dpi_p = Vector::Zero(d);
  Vector dpi_q = Vector::Zero(d);
  for (Eigen::Index r = 0; r < n; ++r) {
    const SampleTerms t = sample_terms(model, samples.row(r).data(), pair, u, v);
    if (t.degenerate) {
      sum_prob += 0.5;
      continue;
    }
    sum_prob += link.cdf(t.f);
    const double s3 = t.s * t.s * t.s;
    const double cp = 2.0 * t.a * (t.a + t.b) / (sigma0 * s3);
    const double cq = -2.0 * t.b * (t.a + t.b) / (sigma0 * s3);
    const double dens = link.pdf(t.f);
    dpi_p.noalias() += (dens * cp) * u;
    dpi_q.noalias() += (dens * cq) * v;
  }
  const double pi = clamp_pi(sum_prob * inv_n);
  dpi_p *= inv_n;
  dpi_q *= inv_n;
  const double log_prior_odds = std::log((1.0 - pi) / pi);

  MIHessian h;
  h.pp = Matrix::Zero(d, d);
  h.pq = Matrix::Zero(d, d);
  h.qp = Matrix::Zero(d, d);
  h.qq = Matrix::Zero(d, d);

  // Second pass: E[Psi grad f grad f^T + Omega hess f].
  Vector gp(d), gq(d);
  for (Eigen::Index r = 0; r < n; ++r) {
    const SampleTerms t = sample_terms(model, samples.row(r).data(), pair, u, v);
    if (t.degenerate) continue;
    const double A = t.a;
    const double B = t.b;
    const double S = t.s;
    const double S2 = S * S;
    const double S3 = S2 * S;
    const double S5 = S3 * S2;
    const double cp = 2.0 * A * (A + B) / (sigma0 * S3);
    const double cq = -2.0 * B * (A + B) / (sigma0 * S3);
    gp = cp * u;
    gq = cq * v;

    const double dens = link.pdf(t.f);
    const double lo = log_prior_odds + link.log_odds(t.f);
    const double psi = link.fisher_weight(t.f) + lo * link.pdf_derivative(t.f);
    const double omega = lo * dens;

    const double tp = 3.0 * B * (A + B) - S2;
    const double tq = 3.0 * A * (A + B) - S2;
    const double tpq = 3.0 * A * A * (A + B) - S2 * (2.0 * A + B);

    // hess_p f = 2A/(sigma0 S^3) [2 T_p / S^2 u u^T - (A+B) I]
    const double hp_outer = 4.0 * A * tp / (sigma0 * S5);
    const double hp_diag = -2.0 * A * (A + B) / (sigma0 * S3);
    // hess_q f = 2B/(sigma0 S^3) [(A+B) I - 2 T_q / S^2 v v^T]
    const double hq_outer = -4.0 * B * tq / (sigma0 * S5);
    const double hq_diag = 2.0 * B * (A + B) / (sigma0 * S3);
    // d/dq (grad_p f) = 4 T_pq / (sigma0 S^5) u v^T
    const double hpq_outer = 4.0 * tpq / (sigma0 * S5);

    add_outer(h.pp, psi, gp, gp);
    add_outer(h.pp, omega * hp_outer, u, u);
    h.pp.diagonal().array() += omega * hp_diag;

    add_outer(h.qq, psi, gq, gq);
    add_outer(h.qq, omega * hq_outer, v, v);
    h.qq.diagonal().array() += omega * hq_diag;

    add_outer(h.pq, psi, gp, gq);
    add_outer(h.pq, omega * hpq_outer, u, v);
    add_outer(h.qp, psi, gq, gp);
    add_outer(h.qp, omega * hpq_outer, v, u);
  }

  const double curvature = -1.0 / (pi * (1.0 - pi));
  const double scale = inv_n * kInvLn2;
  h.pp *= scale;
  h.qq *= scale;
  h.pq *= scale;
  h.qp *= scale;
  add_outer(h.pp, curvature * kInvLn2, dpi_p, dpi_p);
  add_outer(h.qq, curvature * kInvLn2, dpi_q, dpi_q);
  add_outer(h.pq, curvature * kInvLn2, dpi_p, dpi_q);
  add_outer(h.qp, curvature * kInvLn2, dpi_q, dpi_p);
  return h;
}

MIHessian mi_hessian(const PosteriorState& state, const ResponseModel& model,
                     const QueryPair& pair) {
  return mi_hessian(state.samples(), model, pair);
}

MahalanobisMetric MahalanobisMetric::from_hessian(const Matrix& hessian,
                                                  Vector z_star) {
  if (hessian.rows() != hessian.cols() || hessian.rows() != z_star.size() ||
      z_star.size() % 2 != 0) {
    throw DimensionMismatch("metric needs a 2d x 2d Hessian and a 2d optimum");
  }
  const Matrix neg = -0.5 * (hessian + hessian.transpose());
  Eigen::SelfAdjointEigenSolver<Matrix> solver(neg);
  Vector eig = solver.eigenvalues();
  MahalanobisMetric metric;
  for (Eigen::Index i = 0; i < eig.size(); ++i) {
    if (eig[i] < 0.0) {
      eig[i] = 0.0;
      ++metric.clamped_eigenvalues;
    }
  }
  const Matrix& vecs = solver.eigenvectors();
  metric.M = vecs * eig.asDiagonal() * vecs.transpose();
  metric.M = 0.5 * (metric.M + metric.M.transpose()).eval();
  metric.z_star = std::move(z_star);
  return metric;
}

MahalanobisMetric MahalanobisMetric::at(const PosteriorState& state,
                                        const ResponseModel& model,
                                        const QueryPair& optimum) {
  const MIHessian h = mi_hessian(state, model, optimum);
  return from_hessian(h.full(), optimum.stacked());
}

double mahalanobis_distance(const MahalanobisMetric& metric,
                            const QueryPair& pair) {
  const Eigen::Index d = metric.dim();
  if (pair.p.size() != d || pair.q.size() != d) {
    throw DimensionMismatch("pair and metric differ in dimension");
  }
  Vector dz(2 * d);
  dz << pair.p, pair.q;
  dz -= metric.z_star;
  const double forward = dz.dot(metric.M * dz);
  dz << pair.q, pair.p;
  dz -= metric.z_star;
  const double backward = dz.dot(metric.M * dz);
  return 0.5 * std::min(forward, backward);
}

}  // namespace activepref
