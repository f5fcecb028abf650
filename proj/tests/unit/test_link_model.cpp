#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "activepref/link_model.hpp"
#include "oracles.hpp"

using namespace activepref;

namespace {

Vector vec(std::initializer_list<double> xs) {
  Vector v(static_cast<Eigen::Index>(xs.size()));
  Eigen::Index i = 0;
  for (double x : xs) v[i++] = x;
  return v;
}

Vector random_vector(std::mt19937_64& rng, Eigen::Index d, double scale = 2.0) {
  std::normal_distribution<double> n(0.0, scale);
  Vector v(d);
  for (Eigen::Index i = 0; i < d; ++i) v[i] = n(rng);
  return v;
}

}  // namespace

TEST(LinkFunction, SymmetryAndRange) {
  const LinkFunction phi;
  for (double x = -40.0; x <= 40.0; x += 0.37) {
    EXPECT_NEAR(phi.cdf(-x), 1.0 - phi.cdf(x), 1e-12);
    EXPECT_DOUBLE_EQ(phi.pdf(-x), phi.pdf(x));
    EXPECT_GE(phi.pdf(x), 0.0);
  }
}

TEST(LinkFunction, LogisticIdentities) {
  const LinkFunction phi;
  for (double x : {-5.0, -1.0, 0.0, 0.3, 2.0, 7.0}) {
    const double c = oracle::logistic(x);
    EXPECT_NEAR(phi.cdf(x), c, 1e-15);
    EXPECT_NEAR(phi.pdf(x), c * (1.0 - c), 1e-15);
    EXPECT_NEAR(phi.pdf_derivative(x), c * (1.0 - c) * (1.0 - 2.0 * c), 1e-15);
    EXPECT_NEAR(phi.log_cdf(x), std::log(c), 1e-13);
    EXPECT_NEAR(phi.log_odds(x), std::log(c / (1.0 - c)), 1e-12);
  }
}

TEST(LinkFunction, DerivativesMatchFiniteDifferences) {
  const LinkFunction phi;
  const double h = 1e-5;
  for (double x : {-3.0, -0.7, 0.1, 0.9, 2.5}) {
    const double d1 = (phi.cdf(x + h) - phi.cdf(x - h)) / (2 * h);
    const double d2 = (phi.pdf(x + h) - phi.pdf(x - h)) / (2 * h);
    EXPECT_LT(std::abs(d1 - phi.pdf(x)) / std::abs(phi.pdf(x)), 1e-6);
    EXPECT_LT(std::abs(d2 - phi.pdf_derivative(x)) / std::abs(phi.pdf_derivative(x)), 1e-6);
  }
}

TEST(LinkFunction, StableInTails) {
  const LinkFunction phi;
  EXPECT_TRUE(std::isfinite(phi.log_cdf(-800.0)));
  EXPECT_NEAR(phi.log_cdf(-800.0), -800.0, 1e-9);
  EXPECT_EQ(phi.log_cdf(800.0), 0.0);
  EXPECT_TRUE(std::isfinite(phi.fisher_weight(-800.0)));
  EXPECT_NEAR(phi.log_odds(900.0), 900.0, 1e-9);
}

TEST(ResponseModel, RejectsNonPositiveSigma) {
  EXPECT_THROW(ResponseModel(0.0), ConfigError);
  EXPECT_THROW(ResponseModel(-1.0), ConfigError);
}

TEST(FValue, HandComputedExample) {
  const ResponseModel m(1.0);
  const double f = f_value(m, vec({0, 0}), QueryPair(vec({1, 0}), vec({3, 0})));
  EXPECT_NEAR(f, 8.0 / std::sqrt(82.0), 1e-12);
  EXPECT_NEAR(f, 0.88345, 1e-5);
  EXPECT_NEAR(response_probability(m, vec({0, 0}), QueryPair(vec({1, 0}), vec({3, 0}))), 0.70754,
              1e-5);
}

TEST(FValue, EquidistantIsZeroAndSwapIsOdd) {
  const ResponseModel m(0.3);
  EXPECT_EQ(f_value(m, vec({0, 1}), QueryPair(vec({-1, 0}), vec({1, 0}))), 0.0);
  std::mt19937_64 rng(4);
  for (int i = 0; i < 200; ++i) {
    const Vector w = random_vector(rng, 3), p = random_vector(rng, 3), q = random_vector(rng, 3);
    EXPECT_DOUBLE_EQ(f_value(m, w, QueryPair(p, q)), -f_value(m, w, QueryPair(q, p)));
    EXPECT_NEAR(response_probability(m, w, QueryPair(p, q)) +
                    response_probability(m, w, QueryPair(q, p)),
                1.0, 1e-12);
  }
}

TEST(FValue, OddAboutMidpoint) {
  const ResponseModel m(0.5);
  std::mt19937_64 rng(5);
  for (int i = 0; i < 100; ++i) {
    const Vector p = random_vector(rng, 4), q = random_vector(rng, 4), delta = random_vector(rng, 4);
    const Vector b = 0.5 * (p + q);
    const QueryPair pair(p, q);
    EXPECT_NEAR(f_value(m, b + delta, pair), -f_value(m, b - delta, pair), 1e-12);
  }
}

TEST(FValue, DegenerateAndMismatchedInputs) {
  const ResponseModel m(1.0);
  const Vector w = vec({1, 2});
  EXPECT_THROW(f_value(m, w, QueryPair(w, w)), DegenerateQuery);
  EXPECT_THROW(QueryPair(vec({1, 2}), vec({1, 2, 3})), DimensionMismatch);
  EXPECT_THROW(f_value(m, vec({1, 2, 3}), QueryPair(w, vec({0, 0}))), DimensionMismatch);
  // p = q away from w is well defined: f = 0.
  EXPECT_EQ(f_value(m, vec({0, 0}), QueryPair(w, w)), 0.0);
}

TEST(FValue, MatchesHyperplaneForm) {
  std::mt19937_64 rng(6);
  for (int d : {1, 2, 5, 50}) {
    const ResponseModel m(0.2);
    for (int i = 0; i < 200; ++i) {
      const Vector w = random_vector(rng, d), p = random_vector(rng, d), q = random_vector(rng, d);
      const QueryPair pair(p, q);
      const double direct = f_value(m, w, pair);
      const double plane = f_value_hyperplane(m, w, Hyperplane::from_pair(pair));
      EXPECT_LE(std::abs(direct - plane), 1e-10 * std::max(1.0, std::abs(direct)));
    }
  }
}

TEST(Hyperplane, MidpointLiesOnPlane) {
  std::mt19937_64 rng(7);
  for (int i = 0; i < 50; ++i) {
    const Vector p = random_vector(rng, 3), q = random_vector(rng, 3);
    const Hyperplane h = Hyperplane::from_pair(QueryPair(p, q));
    EXPECT_TRUE(h.a.isApprox(2.0 * (p - q)));
    EXPECT_NEAR(h.tau, p.squaredNorm() - q.squaredNorm(), 1e-12);
    EXPECT_NEAR(h.a.dot(h.b) - h.tau, 0.0, 1e-10 * std::max(1.0, std::abs(h.tau)));
  }
  const ResponseModel m(1.0);
  const Hyperplane h = Hyperplane::from_pair(QueryPair(vec({1, 0}), vec({-1, 0})));
  EXPECT_EQ(f_value_hyperplane(m, h.b, h), 0.0);
  EXPECT_EQ(f_value_hyperplane(m, vec({0, 5}), h), 0.0);
}

TEST(ResponseProbability, ApproachesHalfAsNoiseGrows) {
  const Vector w = vec({0, 0});
  const QueryPair pair(vec({1, 0}), vec({3, 0}));
  double prev = 1.0;
  for (double s : {0.1, 1.0, 10.0}) {
    const double p = response_probability(ResponseModel(s), w, pair);
    EXPECT_GT(p, 0.5);
    EXPECT_LT(p, prev);
    prev = p;
  }
  EXPECT_NEAR(response_probability(ResponseModel(1.0), w, QueryPair(vec({1, 0}), vec({-1, 0}))),
              0.5, 1e-15);
}

TEST(SimulateResponse, DeterministicMode) {
  OracleConfig o;
  o.true_point = vec({0, 0});
  o.mode = OracleConfig::Mode::kDeterministic;
  std::mt19937_64 rng(1);
  EXPECT_EQ(simulate_response(o, QueryPair(vec({1, 0}), vec({2, 0})), rng), 1);
  EXPECT_EQ(simulate_response(o, QueryPair(vec({2, 0}), vec({1, 0})), rng), 0);
}

TEST(SimulateResponse, BinomialRateMatchesModel) {
  OracleConfig o;
  o.true_point = vec({0.2, -0.1});
  o.model = ResponseModel(1.0);
  const QueryPair pair(vec({1, 0}), vec({-0.5, 1}));
  const double p = response_probability(o.model, o.true_point, pair);
  std::mt19937_64 rng(11);
  const int n = 100000;
  int ones = 0;
  for (int i = 0; i < n; ++i) ones += simulate_response(o, pair, rng);
  const double sd = std::sqrt(p * (1 - p) / n);
  EXPECT_LT(std::abs(static_cast<double>(ones) / n - p), 3 * sd);
}

TEST(SimulateResponse, SeedReproducible) {
  OracleConfig o;
  o.true_point = vec({0.1});
  o.model = ResponseModel(0.5);
  const QueryPair pair(vec({1}), vec({-1}));
  std::mt19937_64 a(3), b(3);
  for (int i = 0; i < 100; ++i) EXPECT_EQ(simulate_response(o, pair, a), simulate_response(o, pair, b));
}
