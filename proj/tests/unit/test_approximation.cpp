#include <cmath>
#include <map>
#include <random>
#include <set>

#include <gtest/gtest.h>

#include "activepref/approximation.hpp"
#include "oracles.hpp"

using namespace activepref;

namespace {

Vector random_vector(std::mt19937_64& rng, Eigen::Index d, double scale) {
  std::normal_distribution<double> z(0.0, scale);
  Vector v(d);
  for (Eigen::Index i = 0; i < d; ++i) v[i] = z(rng);
  return v;
}

Matrix random_covariance(std::mt19937_64& rng, Eigen::Index d) {
  std::normal_distribution<double> z(0.0, 1.0);
  Matrix g(d, d);
  for (Eigen::Index i = 0; i < d * d; ++i) g.data()[i] = z(rng);
  return 0.3 * g * g.transpose() + 0.2 * Matrix::Identity(d, d);
}

PosteriorState random_state(std::mt19937_64& rng, Eigen::Index d, int n) {
  return PosteriorState(oracle::gaussian_samples(random_vector(rng, d, 0.5), random_covariance(rng, d), n, rng()));
}

ItemPool uniform_pool(std::mt19937_64& rng, std::size_t n, Eigen::Index d, double half) {
  std::uniform_real_distribution<double> u(-half, half);
  SampleMatrix items(static_cast<Eigen::Index>(n), d);
  for (Eigen::Index i = 0; i < items.size(); ++i) items.data()[i] = u(rng);
  return ItemPool(items);
}

// Brute-force argmax MI over unordered pairs, ties by smaller pair.
IndexPair brute_force_best(const PosteriorState& st, double sigma0, const ItemPool& pool,
                           const std::vector<IndexPair>& pairs) {
  IndexPair best = pairs.front();
  double best_mi = -1.0;
  for (const auto& ij : pairs) {
    const double mi = oracle::mi_bruteforce(st.samples(), pool.item(ij.first), pool.item(ij.second), sigma0);
    if (mi > best_mi) {
      best_mi = mi;
      best = ij;
    }
  }
  return best;
}

std::vector<IndexPair> all_pairs(std::size_t n) {
  std::vector<IndexPair> out;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) out.emplace_back(i, j);
  return out;
}

double selected_mi(const PosteriorState& st, double sigma0, const SelectionResult& r) {
  return oracle::mi_bruteforce(st.samples(), r.pair.p, r.pair.q, sigma0);
}

IndexPair unordered(IndexPair ij) {
  if (ij.first > ij.second) std::swap(ij.first, ij.second);
  return ij;
}

ResponseRecord asked(const ItemPool& pool, IndexPair ij) {
  ResponseRecord rec;
  rec.pair = pool.pair(ij);
  rec.y = 1;
  rec.pool_indices = ij;
  return rec;
}

}  // namespace

TEST(ItemPool, RejectsInvalidInput) {
  EXPECT_THROW(ItemPool(SampleMatrix::Zero(1, 2)), ConfigError);
  SampleMatrix bad = SampleMatrix::Zero(3, 2);
  bad(1, 1) = std::nan("");
  EXPECT_THROW(ItemPool{bad}, ConfigError);
  EXPECT_THROW(ItemPool(SampleMatrix::Zero(3, 2), std::vector<IndexPair>{{0, 3}}), ConfigError);
  EXPECT_THROW(ItemPool(SampleMatrix::Zero(3, 2), std::vector<IndexPair>{{0, 1}, {1, 0}}), ConfigError);
}

TEST(StrategyConfig, ParsesNamesAndValidates) {
  for (Method m : {Method::kInfoSynth, Method::kPairMDist, Method::kPairOptDist, Method::kKnnApprox,
                   Method::kNnApprox, Method::kActiveDiscrete, Method::kRandomDiscrete,
                   Method::kRandomSynthesis}) {
    EXPECT_EQ(parse_method(method_name(m)), m);
  }
  EXPECT_THROW(parse_method("gauss_search"), ConfigError);
  StrategyConfig cfg;
  cfg.alpha = 0.0;
  EXPECT_THROW(cfg.validate(), ConfigError);
  cfg.alpha = 1.0;
  cfg.k = 0;
  EXPECT_THROW(cfg.validate(), ConfigError);
  cfg.k = 1;
  cfg.beta = 1.5;
  EXPECT_THROW(cfg.validate(), ConfigError);
}

TEST(ActiveDiscrete, ThreeItemPoolMatchesBruteForce) {
  std::mt19937_64 rng(1);
  for (int t = 0; t < 10; ++t) {
    const PosteriorState st = random_state(rng, 2, 1000);
    const ItemPool pool = uniform_pool(rng, 3, 2, 2.0);
    StrategyConfig cfg;
    cfg.method = Method::kActiveDiscrete;
    const SelectionResult r = select_query(cfg, st, ResponseModel(0.1), &pool, {}, rng);
    ASSERT_TRUE(r.pair_indices);
    EXPECT_EQ(unordered(*r.pair_indices), brute_force_best(st, 0.1, pool, all_pairs(3)));
    EXPECT_EQ(r.diagnostics.n_mi_evals, 3u);
  }
}

TEST(ActiveDiscrete, TwoItemsGiveTheOnlyPair) {
  std::mt19937_64 rng(2);
  const PosteriorState st = random_state(rng, 3, 200);
  const ItemPool pool = uniform_pool(rng, 2, 3, 1.0);
  const std::vector<IndexPair> c = {{0, 1}};
  const SelectionResult r = active_discrete(st, ResponseModel(0.1), pool, c);
  EXPECT_EQ(*r.pair_indices, IndexPair(0, 1));
  EXPECT_EQ(r.pair.p, pool.item(0));
  EXPECT_EQ(r.pair.q, pool.item(1));
}

TEST(ActiveDiscrete, DuplicateItemsNeverSelected) {
  std::mt19937_64 rng(3);
  for (int t = 0; t < 10; ++t) {
    const PosteriorState st = random_state(rng, 2, 1000);
    SampleMatrix items = uniform_pool(rng, 6, 2, 2.0).items();
    items.row(5) = items.row(4);
    const ItemPool pool(items);
    const SelectionResult r = active_discrete(st, ResponseModel(0.1), pool, all_pairs(6));
    EXPECT_NE(unordered(*r.pair_indices), IndexPair(4, 5));
  }
}

TEST(ActiveDiscrete, PairCapLimitsEvaluations) {
  std::mt19937_64 rng(4);
  const PosteriorState st = random_state(rng, 2, 300);
  const ItemPool pool = uniform_pool(rng, 100, 2, 2.0);
  StrategyConfig cfg;
  cfg.method = Method::kActiveDiscrete;
  cfg.pair_cap = 10;
  const SelectionResult r = select_query(cfg, st, ResponseModel(0.1), &pool, {}, rng);
  EXPECT_EQ(r.diagnostics.n_mi_evals, 10u);
  EXPECT_EQ(r.diagnostics.n_filtered, 10u);
}

TEST(CandidatePairs, CapSubsamplesDistinctSortedPairs) {
  std::mt19937_64 rng(5);
  const ItemPool pool = uniform_pool(rng, 50, 2, 1.0);
  StrategyConfig cfg;
  cfg.pair_cap = 100;
  const auto pairs = candidate_pairs(pool, cfg, {}, rng);
  ASSERT_EQ(pairs.size(), 100u);
  EXPECT_TRUE(std::is_sorted(pairs.begin(), pairs.end()));
  EXPECT_EQ(std::set<IndexPair>(pairs.begin(), pairs.end()).size(), 100u);
  for (const auto& ij : pairs) EXPECT_LT(ij.first, ij.second);
}

TEST(CandidatePairs, NoRepeatExcludesAskedAndExhausts) {
  std::mt19937_64 rng(6);
  const ItemPool pool = uniform_pool(rng, 3, 2, 1.0);
  StrategyConfig cfg;
  History h = {asked(pool, {1, 0}), asked(pool, {0, 2})};
  const auto left = candidate_pairs(pool, cfg, h, rng);
  ASSERT_EQ(left.size(), 1u);
  EXPECT_EQ(left[0], IndexPair(1, 2));
  h.push_back(asked(pool, {2, 1}));
  EXPECT_THROW(candidate_pairs(pool, cfg, h, rng), Error);
  cfg.no_repeat = false;
  EXPECT_EQ(candidate_pairs(pool, cfg, h, rng).size(), 3u);
}

TEST(CandidatePairs, UsesPoolCandidateList) {
  std::mt19937_64 rng(7);
  const ItemPool base = uniform_pool(rng, 6, 2, 1.0);
  const ItemPool pool(base.items(), std::vector<IndexPair>{{4, 1}, {0, 5}, {2, 3}});
  const auto pairs = candidate_pairs(pool, StrategyConfig{}, {}, rng);
  EXPECT_EQ(pairs, (std::vector<IndexPair>{{0, 5}, {1, 4}, {2, 3}}));
}

TEST(PairMDist, AlphaOneEqualsActiveDiscrete) {
  std::mt19937_64 rng(8);
  for (int t = 0; t < 5; ++t) {
    const PosteriorState st = random_state(rng, 3, 800);
    const ItemPool pool = uniform_pool(rng, 20, 3, 2.0);
    StrategyConfig cfg;
    cfg.alpha = 1.0;
    const auto pairs = all_pairs(20);
    const SelectionResult a = pair_m_dist(st, ResponseModel(0.1), pool, cfg, pairs);
    const SelectionResult b = active_discrete(st, ResponseModel(0.1), pool, pairs);
    EXPECT_EQ(*a.pair_indices, *b.pair_indices);
    EXPECT_EQ(a.diagnostics.n_mi_evals, pairs.size());
  }
}

TEST(PairMDist, RecoversSynthesizedPairAmongDecoys) {
  std::mt19937_64 rng(9);
  const PosteriorState st = random_state(rng, 2, 2000);
  const ResponseModel m(0.1);
  const SynthesizedQuery opt = synthesize(st, m);
  SampleMatrix items(8, 2);
  items.row(0) = opt.pair.q.transpose();
  items.row(1) = opt.pair.p.transpose();
  std::uniform_real_distribution<double> far(8.0, 12.0);
  for (Eigen::Index i = 2; i < 8; ++i) items.row(i) << far(rng), -far(rng);
  const ItemPool pool(items);
  const auto pairs = all_pairs(8);
  ASSERT_EQ(brute_force_best(st, 0.1, pool, pairs), IndexPair(0, 1));
  StrategyConfig cfg;
  cfg.alpha = 0.1;
  const SelectionResult r = pair_m_dist(st, m, pool, cfg, pairs);
  EXPECT_EQ(*r.pair_indices, IndexPair(0, 1));
}

TEST(PairMDist, EvaluationCountIsCeilAlphaP) {
  std::mt19937_64 rng(10);
  const PosteriorState st = random_state(rng, 2, 300);
  const ItemPool pool = uniform_pool(rng, 30, 2, 2.0);
  const auto pairs = all_pairs(30);  // 435
  for (double alpha : {0.01, 0.05, 0.33, 1.0}) {
    StrategyConfig cfg;
    cfg.alpha = alpha;
    const SelectionResult r = pair_m_dist(st, ResponseModel(0.1), pool, cfg, pairs);
    EXPECT_EQ(r.diagnostics.n_mi_evals, static_cast<std::size_t>(std::ceil(alpha * 435 - 1e-9)))
        << "alpha=" << alpha;
  }
}

TEST(PairOptDist, EtaVanishesAtIdealPair) {
  std::mt19937_64 rng(11);
  const PosteriorState st = random_state(rng, 3, 500);
  const double r = 0.7;
  const QueryPair ideal(st.mean() + r * st.principal_eigenvector(), st.mean() - r * st.principal_eigenvector());
  EXPECT_NEAR(opt_dist_eta(st, ideal, r, 0.3), 0.0, 1e-20);
  EXPECT_NEAR(opt_dist_eta(st, ideal.swapped(), r, 0.3), 0.0, 1e-20);
  EXPECT_GT(opt_dist_eta(st, QueryPair(ideal.p, ideal.p), r, 0.3), 0.0);
}

TEST(PairOptDist, EtaMatchesDefinition) {
  std::mt19937_64 rng(12);
  const PosteriorState st = random_state(rng, 3, 500);
  const QueryPair pair(random_vector(rng, 3, 1.0), random_vector(rng, 3, 1.0));
  const double r = 0.4, lambda = 0.25;
  const Vector b = 0.5 * (pair.p + pair.q);
  double mid = 0.0;
  for (int i = 0; i < 3; ++i) mid += std::pow(b[i] - st.mean()[i], 2) / st.covariance()(i, i);
  const Vector t = 2 * r * st.principal_eigenvector();
  const double expected = mid + lambda * std::min((pair.p - pair.q - t).squaredNorm(),
                                                  (pair.q - pair.p - t).squaredNorm());
  EXPECT_NEAR(opt_dist_eta(st, pair, r, lambda), expected, 1e-12);
}

TEST(PairOptDist, LambdaCalibration) {
  // Four axes with variances summing to 2.
  Matrix cov = Matrix::Identity(4, 4) * 0.5;
  const SampleMatrix s = oracle::whitened_gaussian_samples(Vector::Zero(4), cov, 1000, 13);
  const PosteriorState st(s);
  EXPECT_NEAR(st.trace(), 2.0, 1e-10);
  EXPECT_NEAR(opt_dist_lambda(st, 0.1), 0.2, 1e-10);
  const PosteriorState shrunk{SampleMatrix(s / std::sqrt(2.0))};
  EXPECT_NEAR(opt_dist_lambda(shrunk, 0.1) / opt_dist_lambda(st, 0.1), 2.0, 1e-12);
}

TEST(PairOptDist, EvaluationCountIsCeilGammaP) {
  std::mt19937_64 rng(14);
  const PosteriorState st = random_state(rng, 2, 300);
  const ItemPool pool = uniform_pool(rng, 30, 2, 2.0);
  const auto pairs = all_pairs(30);
  for (double gamma : {0.02, 0.2, 1.0}) {
    StrategyConfig cfg;
    cfg.gamma = gamma;
    const SelectionResult r = pair_opt_dist(st, ResponseModel(0.1), pool, cfg, pairs);
    EXPECT_EQ(r.diagnostics.n_mi_evals, static_cast<std::size_t>(std::ceil(gamma * 435 - 1e-9)));
  }
}

TEST(KnnApprox, KOneIsNearestNeighbourPair) {
  std::mt19937_64 rng(15);
  for (int t = 0; t < 5; ++t) {
    const PosteriorState st = random_state(rng, 2, 500);
    const ItemPool pool = uniform_pool(rng, 40, 2, 2.0);
    const SynthesizedQuery opt = synthesize(st, ResponseModel(0.1));
    auto nearest = [&](const Vector& x) {
      std::size_t best = 0;
      for (std::size_t i = 1; i < pool.size(); ++i)
        if ((pool.item(i) - x).norm() < (pool.item(best) - x).norm()) best = i;
      return best;
    };
    const std::size_t a = nearest(opt.pair.p), b = nearest(opt.pair.q);
    if (a == b) continue;
    StrategyConfig cfg;
    cfg.method = Method::kNnApprox;
    const SelectionResult r = select_query(cfg, st, ResponseModel(0.1), &pool, {}, rng);
    EXPECT_EQ(*r.pair_indices, IndexPair(a, b));
    EXPECT_EQ(r.diagnostics.n_mi_evals, 1u);
  }
}

TEST(KnnApprox, KThreeMatchesBruteForceOverCombos) {
  std::mt19937_64 rng(16);
  for (int t = 0; t < 5; ++t) {
    const PosteriorState st = random_state(rng, 2, 1000);
    const ItemPool pool = uniform_pool(rng, 10, 2, 2.0);
    const SynthesizedQuery opt = synthesize(st, ResponseModel(0.1));
    auto k_nearest = [&](const Vector& x) {
      std::vector<std::size_t> idx(pool.size());
      std::iota(idx.begin(), idx.end(), 0);
      std::sort(idx.begin(), idx.end(), [&](auto i, auto j) {
        return (pool.item(i) - x).norm() < (pool.item(j) - x).norm();
      });
      idx.resize(3);
      return idx;
    };
    std::vector<IndexPair> combos;
    for (auto a : k_nearest(opt.pair.p))
      for (auto b : k_nearest(opt.pair.q))
        if (a != b) combos.push_back(unordered({a, b}));
    std::sort(combos.begin(), combos.end());
    combos.erase(std::unique(combos.begin(), combos.end()), combos.end());
    StrategyConfig cfg;
    cfg.k = 3;
    cfg.beta = 1.0;
    const SelectionResult r = knn_approx(st, ResponseModel(0.1), pool, cfg, {});
    EXPECT_EQ(unordered(*r.pair_indices), brute_force_best(st, 0.1, pool, combos));
  }
}

TEST(KnnApprox, ExactOptimumRanksFirst) {
  std::mt19937_64 rng(17);
  const PosteriorState st = random_state(rng, 3, 500);
  const SynthesizedQuery opt = synthesize(st, ResponseModel(0.1));
  SampleMatrix items = uniform_pool(rng, 20, 3, 3.0).items();
  items.row(7) = opt.pair.p.transpose();
  items.row(3) = opt.pair.q.transpose();
  StrategyConfig cfg;
  cfg.k = 4;
  cfg.beta = 1.0 / 16.0;
  const SelectionResult r = knn_approx(st, ResponseModel(0.1), ItemPool(items), cfg, {});
  EXPECT_EQ(r.diagnostics.n_mi_evals, 1u);
  EXPECT_EQ(*r.pair_indices, IndexPair(7, 3));
}

TEST(KnnApprox, EvaluationCountIsCeilBetaKSquared) {
  std::mt19937_64 rng(18);
  const PosteriorState st = random_state(rng, 2, 300);
  const ItemPool pool = uniform_pool(rng, 60, 2, 2.0);
  StrategyConfig cfg;
  cfg.k = 10;
  cfg.beta = 0.3;
  EXPECT_EQ(knn_approx(st, ResponseModel(0.1), pool, cfg, {}).diagnostics.n_mi_evals, 30u);
  cfg.k = 61;
  EXPECT_THROW(knn_approx(st, ResponseModel(0.1), pool, cfg, {}), ConfigError);
}

TEST(KnnApprox, SkipsAskedPairs) {
  std::mt19937_64 rng(19);
  const PosteriorState st = random_state(rng, 2, 300);
  const ItemPool pool = uniform_pool(rng, 20, 2, 2.0);
  StrategyConfig cfg;
  cfg.k = 1;
  cfg.beta = 1.0;
  History h;
  std::set<IndexPair> seen;
  for (int t = 0; t < 5; ++t) {
    const SelectionResult r = knn_approx(st, ResponseModel(0.1), pool, cfg, h);
    EXPECT_TRUE(seen.insert(unordered(*r.pair_indices)).second);
    h.push_back(asked(pool, *r.pair_indices));
  }
}

TEST(RandomBaselines, ReproducibleUnderSeed) {
  std::mt19937_64 data(20);
  const PosteriorState st = random_state(data, 2, 200);
  const ItemPool pool = uniform_pool(data, 15, 2, 1.0);
  for (Method m : {Method::kRandomDiscrete, Method::kRandomSynthesis}) {
    StrategyConfig cfg;
    cfg.method = m;
    cfg.continuous_bounds = Box::cube(2, -1.0, 1.0);
    std::mt19937_64 r1(99), r2(99);
    const auto a = select_query(cfg, st, ResponseModel(0.1), &pool, {}, r1);
    const auto b = select_query(cfg, st, ResponseModel(0.1), &pool, {}, r2);
    EXPECT_EQ(a.pair.p, b.pair.p);
    EXPECT_EQ(a.pair.q, b.pair.q);
  }
}

TEST(RandomBaselines, SynthesisStaysInBounds) {
  std::mt19937_64 rng(21);
  Vector lo(3), hi(3);
  lo << -1, 0, 5;
  hi << 1, 0.5, 9;
  const Box box(lo, hi);
  for (int t = 0; t < 1000; ++t) {
    const SelectionResult r = random_synthesis(box, rng);
    EXPECT_TRUE(box.contains(r.pair.p));
    EXPECT_TRUE(box.contains(r.pair.q));
    EXPECT_FALSE(r.pair_indices);
  }
}

TEST(RandomBaselines, DiscreteIsUniformOverPairs) {
  std::mt19937_64 rng(22);
  const ItemPool pool = uniform_pool(rng, 5, 2, 1.0);
  const auto pairs = all_pairs(5);
  std::map<IndexPair, int> counts;
  const int n = 10000;
  for (int t = 0; t < n; ++t) ++counts[*random_discrete(pool, pairs, rng).pair_indices];
  ASSERT_EQ(counts.size(), 10u);
  double chi2 = 0.0;
  for (const auto& [ij, c] : counts) chi2 += std::pow(c - n / 10.0, 2) / (n / 10.0);
  // 0.99 quantile of chi-square with 9 degrees of freedom.
  EXPECT_LT(chi2, 21.666);
}

TEST(SelectQuery, InfoSynthDelegates) {
  std::mt19937_64 rng(23);
  const PosteriorState st = random_state(rng, 3, 500);
  StrategyConfig cfg;
  cfg.continuous_bounds = Box::cube(3, -10, 10);
  const SelectionResult r = select_query(cfg, st, ResponseModel(0.1), nullptr, {}, rng);
  const SynthesizedQuery s = synthesize(st, ResponseModel(0.1));
  EXPECT_EQ(r.pair.p, s.pair.p);
  EXPECT_EQ(r.pair.q, s.pair.q);
  EXPECT_GT(r.diagnostics.mi_of_selected.value, 0.0);
}

TEST(SelectQuery, MissingPoolOrBoundsIsConfigError) {
  std::mt19937_64 rng(24);
  const PosteriorState st = random_state(rng, 2, 100);
  StrategyConfig cfg;
  cfg.method = Method::kActiveDiscrete;
  EXPECT_THROW(select_query(cfg, st, ResponseModel(0.1), nullptr, {}, rng), ConfigError);
  cfg.method = Method::kRandomSynthesis;
  EXPECT_THROW(select_query(cfg, st, ResponseModel(0.1), nullptr, {}, rng), ConfigError);
  const ItemPool pool = uniform_pool(rng, 4, 3, 1.0);
  cfg.method = Method::kActiveDiscrete;
  EXPECT_THROW(select_query(cfg, st, ResponseModel(0.1), &pool, {}, rng), DimensionMismatch);
}

TEST(SelectQuery, MDistBeatsRandomDiscrete) {
  std::mt19937_64 rng(25);
  const ResponseModel m(0.1);
  int wins = 0;
  const int trials = 100;
  for (int t = 0; t < trials; ++t) {
    const PosteriorState st = random_state(rng, 4, 400);
    const ItemPool pool = uniform_pool(rng, 100, 4, 2.0);
    StrategyConfig md;
    md.method = Method::kPairMDist;
    StrategyConfig rd;
    rd.method = Method::kRandomDiscrete;
    const auto a = select_query(md, st, m, &pool, {}, rng);
    const auto b = select_query(rd, st, m, &pool, {}, rng);
    if (selected_mi(st, 0.1, a) >= selected_mi(st, 0.1, b)) ++wins;
  }
  EXPECT_GE(wins, 95);
}

TEST(SelectQuery, MiNonDecreasingInFilterFraction) {
  std::mt19937_64 rng(26);
  const ResponseModel m(0.1);
  for (int t = 0; t < 5; ++t) {
    const PosteriorState st = random_state(rng, 3, 400);
    const ItemPool pool = uniform_pool(rng, 40, 3, 2.0);
    const auto pairs = all_pairs(40);
    double prev_m = -1.0, prev_o = -1.0;
    for (double f : {0.01, 0.05, 0.2, 0.5, 1.0}) {
      StrategyConfig cfg;
      cfg.alpha = f;
      cfg.gamma = f;
      const double mi_m = pair_m_dist(st, m, pool, cfg, pairs).diagnostics.mi_of_selected.value;
      const double mi_o = pair_opt_dist(st, m, pool, cfg, pairs).diagnostics.mi_of_selected.value;
      EXPECT_GE(mi_m, prev_m);
      EXPECT_GE(mi_o, prev_o);
      prev_m = mi_m;
      prev_o = mi_o;
    }
  }
}
