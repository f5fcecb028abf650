#include "activepref/approximation.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <iostream>
#include <numeric>
#include <set>
#include <unordered_set>

namespace activepref {

namespace {

constexpr std::size_t kMDistSoftDimLimit = 32;

// ceil(fraction * n), at least 1 and at most n; guards against 0.3 * 100
// evaluating to 30.000000000000004.
std::size_t fraction_count(double fraction, std::size_t n) {
  if (n == 0) return 0;
  const double raw = fraction * static_cast<double>(n);
  const auto c = static_cast<std::size_t>(std::ceil(raw - 1e-9 * std::max(raw, 1.0)));
  return std::clamp<std::size_t>(c, 1, n);
}

IndexPair normalized(IndexPair ij) {
  if (ij.first > ij.second) std::swap(ij.first, ij.second);
  return ij;
}

struct IndexPairHash {
  std::size_t operator()(const IndexPair& ij) const {
    return std::hash<std::size_t>()(ij.first) * 1000003u ^ std::hash<std::size_t>()(ij.second);
  }
};

using AskedSet = std::unordered_set<IndexPair, IndexPairHash>;

AskedSet asked_pairs(const History& history) {
  AskedSet asked;
  for (const auto& rec : history) {
    if (rec.pool_indices) asked.insert(normalized(*rec.pool_indices));
  }
  return asked;
}

// Linear index over {(i, j): i < j < n} in row-major order.
IndexPair pair_from_linear(std::size_t idx, std::size_t n) {
  std::size_t i = 0;
  std::size_t row = n - 1;
  while (idx >= row) {
    idx -= row;
    ++i;
    --row;
  }
  return {i, i + 1 + idx};
}

struct Refined {
  std::size_t best = 0;
  MIEstimate mi{};
};

// MI argmax over `pairs` in the given order; strict improvement only, so ties
// go to the earlier entry.
Refined refine_by_mi(const PosteriorState& state, const ResponseModel& model,
                     const ItemPool& pool, std::span<const IndexPair> pairs) {
  Refined out;
  out.mi.value = -std::numeric_limits<double>::infinity();
  for (std::size_t c = 0; c < pairs.size(); ++c) {
    const MIEstimate mi = mutual_information(state, model, pool.pair(pairs[c]));
    if (mi.value > out.mi.value) {
      out.mi = mi;
      out.best = c;
    }
  }
  return out;
}

// Keep the `keep` lowest scores (ties by position), returned in original
// candidate order.
std::vector<IndexPair> keep_smallest(std::span<const IndexPair> candidates,
                                     const std::vector<double>& score,
                                     std::size_t keep) {
  std::vector<std::size_t> order(candidates.size());
  std::iota(order.begin(), order.end(), 0);
  auto less = [&](std::size_t a, std::size_t b) {
    if (score[a] != score[b]) return score[a] < score[b];
    return a < b;
  };
  if (keep < order.size()) {
    std::nth_element(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(keep), order.end(), less);
    order.resize(keep);
  }
  std::sort(order.begin(), order.end());
  std::vector<IndexPair> kept;
  kept.reserve(order.size());
  for (std::size_t i : order) kept.push_back(candidates[i]);
  return kept;
}

SelectionResult from_refined(const ItemPool& pool,
                             const std::vector<IndexPair>& evaluated,
                             const Refined& refined, std::size_t n_filtered) {
  SelectionResult res;
  res.pair_indices = evaluated[refined.best];
  res.pair = pool.pair(*res.pair_indices);
  res.diagnostics.n_filtered = n_filtered;
  res.diagnostics.n_mi_evals = evaluated.size();
  res.diagnostics.mi_of_selected = refined.mi;
  return res;
}

void require_nonempty(std::span<const IndexPair> candidates) {
  if (candidates.empty()) throw Error("no candidate pairs to select from");
}

}  // namespace

ItemPool::ItemPool(SampleMatrix items,
                   std::optional<std::vector<IndexPair>> candidates)
    : items_(std::move(items)), candidates_(std::move(candidates)) {
  if (items_.rows() < 2) throw ConfigError("item pool needs at least 2 items", "pool");
  if (items_.cols() < 1) throw ConfigError("item pool items need dimension >= 1", "pool");
  if (!items_.allFinite()) throw ConfigError("item pool contains non-finite values", "pool");
  if (candidates_) {
    std::set<IndexPair> seen;
    for (auto& ij : *candidates_) {
      ij = normalized(ij);
      if (ij.first == ij.second || ij.second >= size()) {
        throw ConfigError("candidate pair references an invalid item", "pool.candidates");
      }
      if (!seen.insert(ij).second) {
        throw ConfigError("duplicate candidate pair", "pool.candidates");
      }
    }
    std::sort(candidates_->begin(), candidates_->end());
  }
}

std::string_view method_name(Method m) {
  switch (m) {
    case Method::kInfoSynth: return "info_synth";
    case Method::kPairMDist: return "pair_m_dist";
    case Method::kPairOptDist: return "pair_opt_dist";
    case Method::kKnnApprox: return "knn_approx";
    case Method::kNnApprox: return "nn_approx";
    case Method::kActiveDiscrete: return "active_discrete";
    case Method::kRandomDiscrete: return "random_discrete";
    case Method::kRandomSynthesis: return "random_synthesis";
  }
  return "unknown";
}

Method parse_method(std::string_view name) {
  for (Method m : {Method::kInfoSynth, Method::kPairMDist, Method::kPairOptDist,
                   Method::kKnnApprox, Method::kNnApprox, Method::kActiveDiscrete,
                   Method::kRandomDiscrete, Method::kRandomSynthesis}) {
    if (method_name(m) == name) return m;
  }
  throw ConfigError("unknown method '" + std::string(name) + "'", "method");
}

bool is_pool_method(Method m) {
  return m != Method::kInfoSynth && m != Method::kRandomSynthesis;
}

void StrategyConfig::validate() const {
  auto fraction_ok = [](double x) { return x > 0.0 && x <= 1.0; };
  if (!fraction_ok(alpha)) throw ConfigError("alpha must lie in (0, 1]", "alpha");
  if (!fraction_ok(beta)) throw ConfigError("beta must lie in (0, 1]", "beta");
  if (!fraction_ok(gamma)) throw ConfigError("gamma must lie in (0, 1]", "gamma");
  if (k < 1) throw ConfigError("k must be >= 1", "k");
  if (pair_cap < 1) throw ConfigError("pair_cap must be >= 1", "pair_cap");
  if (!(zeta > 0.0)) throw ConfigError("zeta must be positive", "zeta");
}

std::vector<IndexPair> candidate_pairs(const ItemPool& pool,
                                       const StrategyConfig& cfg,
                                       const History& history,
                                       std::mt19937_64& rng) {
  const AskedSet asked = cfg.no_repeat ? asked_pairs(history) : AskedSet{};
  std::vector<IndexPair> out;

  if (pool.candidates()) {
    for (const auto& ij : *pool.candidates()) {
      if (!asked.contains(ij)) out.push_back(ij);
    }
    if (out.size() > cfg.pair_cap) {
      std::vector<IndexPair> sampled;
      sampled.reserve(cfg.pair_cap);
      std::sample(out.begin(), out.end(), std::back_inserter(sampled), cfg.pair_cap, rng);
      out = std::move(sampled);
    }
  } else {
    const std::size_t n = pool.size();
    const std::size_t total = n * (n - 1) / 2;
    if (total <= cfg.pair_cap) {
      out.reserve(total);
      for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
          if (!asked.contains({i, j})) out.emplace_back(i, j);
        }
      }
    } else {
      // Floyd's sampling over linear pair indices; asked pairs are dropped
      // after sampling.
      std::set<std::size_t> chosen;
      for (std::size_t j = total - cfg.pair_cap; j < total; ++j) {
        std::uniform_int_distribution<std::size_t> dist(0, j);
        const std::size_t t = dist(rng);
        if (!chosen.insert(t).second) chosen.insert(j);
      }
      out.reserve(chosen.size());
      for (std::size_t idx : chosen) {
        const IndexPair ij = pair_from_linear(idx, n);
        if (!asked.contains(ij)) out.push_back(ij);
      }
    }
  }
  if (out.empty()) throw Error("item pool exhausted: no unasked candidate pairs");
  std::sort(out.begin(), out.end());
  return out;
}

SelectionResult active_discrete(const PosteriorState& state,
                                const ResponseModel& model,
                                const ItemPool& pool,
                                std::span<const IndexPair> candidates) {
  require_nonempty(candidates);
  const std::vector<IndexPair> all(candidates.begin(), candidates.end());
  const Refined refined = refine_by_mi(state, model, pool, all);
  return from_refined(pool, all, refined, all.size());
}

SelectionResult pair_m_dist(const PosteriorState& state,
                            const ResponseModel& model, const ItemPool& pool,
                            const StrategyConfig& cfg,
                            std::span<const IndexPair> candidates) {
  require_nonempty(candidates);
  const Eigen::Index d = pool.dim();
  if (static_cast<std::size_t>(d) > kMDistSoftDimLimit) {
    static bool warned = false;
    if (!warned) {
      std::clog << "warning: pair_m_dist in d=" << d
                << " builds a " << 2 * d << "x" << 2 * d
                << " Hessian; pair_opt_dist is cheaper in high dimension\n";
      warned = true;
    }
  }
  const SynthesizedQuery synth = synthesize(state, model, cfg.magnitude);
  const MahalanobisMetric metric = MahalanobisMetric::at(state, model, synth.pair);

  // Quadratic form split into per-item pieces so each pair costs O(d):
  // dz^T M dz = x^T Mpp x + 2 x^T Mpq y + y^T Mqq y with x = p - p~, y = q - q~.
  const Matrix mpp = metric.M.topLeftCorner(d, d);
  const Matrix mpq = metric.M.topRightCorner(d, d);
  const Matrix mqq = metric.M.bottomRightCorner(d, d);
  const std::size_t n = pool.size();
  const SampleMatrix& items = pool.items();
  const SampleMatrix as_p = items.rowwise() - synth.pair.p.transpose();
  const SampleMatrix as_q = items.rowwise() - synth.pair.q.transpose();
  Vector quad_p(n), quad_q(n);
  SampleMatrix cross(n, d);  // row j: (Mpq (item_j - q~))^T
  for (std::size_t i = 0; i < n; ++i) {
    const auto ii = static_cast<Eigen::Index>(i);
    const Vector x = as_p.row(ii).transpose();
    const Vector y = as_q.row(ii).transpose();
    quad_p[ii] = x.dot(mpp * x);
    quad_q[ii] = y.dot(mqq * y);
    cross.row(ii) = (mpq * y).transpose();
  }
  std::vector<double> dist(candidates.size());
  for (std::size_t c = 0; c < candidates.size(); ++c) {
    const auto i = static_cast<Eigen::Index>(candidates[c].first);
    const auto j = static_cast<Eigen::Index>(candidates[c].second);
    const double forward = quad_p[i] + 2.0 * as_p.row(i).dot(cross.row(j)) + quad_q[j];
    const double backward = quad_p[j] + 2.0 * as_p.row(j).dot(cross.row(i)) + quad_q[i];
    dist[c] = 0.5 * std::min(forward, backward);
  }

  const std::vector<IndexPair> kept =
      keep_smallest(candidates, dist, fraction_count(cfg.alpha, candidates.size()));
  const Refined refined = refine_by_mi(state, model, pool, kept);
  return from_refined(pool, kept, refined, kept.size());
}

double opt_dist_lambda(const PosteriorState& state, double zeta) {
  const double trace = state.trace();
  if (!(trace > 0.0)) throw Error("opt-dist lambda needs Tr(Sigma) > 0");
  return zeta * static_cast<double>(state.dim()) / trace;
}

double opt_dist_eta(const PosteriorState& state, const QueryPair& pair,
                    double r_tilde, double lambda) {
  const Vector var = state.covariance().diagonal();
  if (!(var.array() > 0.0).all()) {
    throw Error("opt-dist needs positive marginal variances");
  }
  const Vector mid = 0.5 * (pair.p + pair.q);
  const double midpoint_term = ((mid - state.mean()).array().square() / var.array()).sum();
  const Vector target = 2.0 * r_tilde * state.principal_eigenvector();
  const Vector diff = pair.p - pair.q;
  const double forward = (diff - target).squaredNorm();
  const double backward = (-diff - target).squaredNorm();
  return midpoint_term + lambda * std::min(forward, backward);
}

SelectionResult pair_opt_dist(const PosteriorState& state,
                              const ResponseModel& model, const ItemPool& pool,
                              const StrategyConfig& cfg,
                              std::span<const IndexPair> candidates) {
  require_nonempty(candidates);
  const Vector var = state.covariance().diagonal();
  if (!(var.array() > 0.0).all()) {
    throw Error("opt-dist needs positive marginal variances");
  }
  const double r_tilde = optimize_magnitude(state, model, cfg.magnitude);
  const double lambda = opt_dist_lambda(state, cfg.zeta);
  const Vector target = 2.0 * r_tilde * state.principal_eigenvector();
  const Vector inv_var = var.cwiseInverse();
  const Vector& mu = state.mean();

  std::vector<double> eta(candidates.size());
  for (std::size_t c = 0; c < candidates.size(); ++c) {
    const auto i = static_cast<Eigen::Index>(candidates[c].first);
    const auto j = static_cast<Eigen::Index>(candidates[c].second);
    const auto pi = pool.items().row(i);
    const auto qj = pool.items().row(j);
    double mid_term = 0.0;
    double fwd = 0.0;
    double bwd = 0.0;
    for (Eigen::Index k = 0; k < pool.dim(); ++k) {
      const double m = 0.5 * (pi[k] + qj[k]) - mu[k];
      mid_term += m * m * inv_var[k];
      const double diff = pi[k] - qj[k];
      fwd += (diff - target[k]) * (diff - target[k]);
      bwd += (-diff - target[k]) * (-diff - target[k]);
    }
    eta[c] = mid_term + lambda * std::min(fwd, bwd);
  }
  const std::vector<IndexPair> kept =
      keep_smallest(candidates, eta, fraction_count(cfg.gamma, candidates.size()));
  const Refined refined = refine_by_mi(state, model, pool, kept);
  return from_refined(pool, kept, refined, kept.size());
}

namespace {

// k nearest items to `target`, ties by index.
std::vector<std::size_t> nearest_items(const ItemPool& pool, const Vector& target,
                                       std::size_t k) {
  const std::size_t n = pool.size();
  std::vector<double> dist(n);
  for (std::size_t i = 0; i < n; ++i) {
    dist[i] = (pool.items().row(static_cast<Eigen::Index>(i)).transpose() - target).squaredNorm();
  }
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  auto less = [&](std::size_t a, std::size_t b) {
    if (dist[a] != dist[b]) return dist[a] < dist[b];
    return a < b;
  };
  std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(k), order.end(), less);
  order.resize(k);
  return order;
}

}  // namespace

SelectionResult knn_approx(const PosteriorState& state,
                           const ResponseModel& model, const ItemPool& pool,
                           const StrategyConfig& cfg, const History& history) {
  const std::size_t n = pool.size();
  if (static_cast<std::size_t>(cfg.k) > n) {
    throw ConfigError("k exceeds the number of pool items", "k");
  }
  const SynthesizedQuery synth = synthesize(state, model, cfg.magnitude);
  const AskedSet asked = cfg.no_repeat ? asked_pairs(history) : AskedSet{};

  struct Combo {
    IndexPair ij;
    double rank;
  };
  std::vector<Combo> combos;
  std::size_t k = static_cast<std::size_t>(cfg.k);
  // Grow k when every combo is degenerate (e.g. NN of p~ equals NN of q~) or
  // already asked.
  for (;; ++k) {
    const auto near_p = nearest_items(pool, synth.pair.p, k);
    const auto near_q = nearest_items(pool, synth.pair.q, k);
    combos.clear();
    std::set<IndexPair> seen;
    for (std::size_t a : near_p) {
      const double dp = (pool.item(a) - synth.pair.p).norm();
      for (std::size_t b : near_q) {
        if (a == b) continue;
        if (asked.contains(normalized({a, b}))) continue;
        const double dq = (pool.item(b) - synth.pair.q).norm();
        combos.push_back({{a, b}, dp + dq});
      }
    }
    std::stable_sort(combos.begin(), combos.end(), [](const Combo& x, const Combo& y) {
      if (x.rank != y.rank) return x.rank < y.rank;
      return x.ij < y.ij;
    });
    // Both orientations of one unordered pair carry the same MI; keep the
    // better-ranked one.
    std::vector<Combo> unique;
    for (const auto& c : combos) {
      if (seen.insert(normalized(c.ij)).second) unique.push_back(c);
    }
    combos = std::move(unique);
    if (!combos.empty() || k >= n) break;
  }
  if (combos.empty()) throw Error("item pool exhausted: no unasked candidate pairs");

  const std::size_t budget = fraction_count(cfg.beta, k * k);
  const std::size_t n_eval = std::min(budget, combos.size());
  std::vector<IndexPair> evaluated;
  evaluated.reserve(n_eval);
  for (std::size_t c = 0; c < n_eval; ++c) evaluated.push_back(combos[c].ij);
  const Refined refined = refine_by_mi(state, model, pool, evaluated);
  return from_refined(pool, evaluated, refined, combos.size());
}

SelectionResult random_discrete(const ItemPool& pool,
                                std::span<const IndexPair> candidates,
                                std::mt19937_64& rng) {
  require_nonempty(candidates);
  std::uniform_int_distribution<std::size_t> pick(0, candidates.size() - 1);
  SelectionResult res;
  res.pair_indices = candidates[pick(rng)];
  res.pair = pool.pair(*res.pair_indices);
  res.diagnostics.n_filtered = candidates.size();
  return res;
}

SelectionResult random_synthesis(const Box& bounds, std::mt19937_64& rng) {
  const Eigen::Index d = bounds.dim();
  if (d == 0) throw ConfigError("random synthesis needs non-empty bounds", "continuous_bounds");
  Vector p(d), q(d);
  for (Eigen::Index i = 0; i < d; ++i) {
    if (!(bounds.lo[i] < bounds.hi[i])) {
      throw ConfigError("degenerate continuous bounds", "continuous_bounds");
    }
  }
  for (Eigen::Index i = 0; i < d; ++i) {
    std::uniform_real_distribution<double> u(bounds.lo[i], bounds.hi[i]);
    p[i] = u(rng);
  }
  for (Eigen::Index i = 0; i < d; ++i) {
    std::uniform_real_distribution<double> u(bounds.lo[i], bounds.hi[i]);
    q[i] = u(rng);
  }
  SelectionResult res;
  res.pair = QueryPair(std::move(p), std::move(q));
  return res;
}

SelectionResult select_query(const StrategyConfig& cfg,
                             const PosteriorState& state,
                             const ResponseModel& model,
                             const ItemPool* pool, const History& history,
                             std::mt19937_64& rng) {
  cfg.validate();
  const bool needs_pool = is_pool_method(cfg.method);
  if (needs_pool && pool == nullptr) {
    throw ConfigError("method '" + std::string(method_name(cfg.method)) + "' needs an item pool", "pool");
  }
  if (!needs_pool && !cfg.continuous_bounds) {
    throw ConfigError("method '" + std::string(method_name(cfg.method)) +
                          "' needs continuous_bounds", "continuous_bounds");
  }
  if (pool != nullptr && pool->dim() != state.dim()) {
    throw DimensionMismatch("pool and posterior differ in dimension");
  }

  const auto start = std::chrono::steady_clock::now();
  SelectionResult res;
  bool has_mi = true;
  switch (cfg.method) {
    case Method::kInfoSynth: {
      const SynthesizedQuery s = synthesize(state, model, cfg.magnitude);
      res.pair = s.pair;
      if (cfg.clamp_to_bounds) {
        res.pair = QueryPair(cfg.continuous_bounds->clamp(res.pair.p),
                             cfg.continuous_bounds->clamp(res.pair.q));
      }
      has_mi = false;
      break;
    }
    case Method::kRandomSynthesis:
      res = random_synthesis(*cfg.continuous_bounds, rng);
      has_mi = false;
      break;
    case Method::kActiveDiscrete: {
      const auto cands = candidate_pairs(*pool, cfg, history, rng);
      res = active_discrete(state, model, *pool, cands);
      break;
    }
    case Method::kPairMDist: {
      const auto cands = candidate_pairs(*pool, cfg, history, rng);
      res = pair_m_dist(state, model, *pool, cfg, cands);
      break;
    }
    case Method::kPairOptDist: {
      const auto cands = candidate_pairs(*pool, cfg, history, rng);
      res = pair_opt_dist(state, model, *pool, cfg, cands);
      break;
    }
    case Method::kKnnApprox:
      res = knn_approx(state, model, *pool, cfg, history);
      break;
    case Method::kNnApprox: {
      StrategyConfig nn = cfg;
      nn.k = 1;
      nn.beta = 1.0;
      res = knn_approx(state, model, *pool, nn, history);
      break;
    }
    case Method::kRandomDiscrete: {
      const auto cands = candidate_pairs(*pool, cfg, history, rng);
      res = random_discrete(*pool, cands, rng);
      has_mi = false;
      break;
    }
  }
  const auto stop = std::chrono::steady_clock::now();
  res.diagnostics.selection_seconds = std::chrono::duration<double>(stop - start).count();
  if (!has_mi) {
    res.diagnostics.mi_of_selected = mutual_information(state, model, res.pair);
  }
  return res;
}

}  // namespace activepref
