#include "activepref/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <numeric>
#include <sstream>
#include <thread>

namespace activepref {

void SyntheticSpec::validate() const {
  if (d < 1) throw ConfigError("dimension must be >= 1", "dim");
  if (n_items < 2) throw ConfigError("need at least 2 items", "n_items");
  if (!(item_lo < item_hi)) throw ConfigError("empty item box", "item_box");
  if (!(user_lo < user_hi)) throw ConfigError("empty user box", "user_box");
  if (trials < 1) throw ConfigError("trials must be >= 1", "trials");
  if (queries < 0) throw ConfigError("queries must be >= 0", "queries");
  if (!(sigma0 > 0.0)) throw ConfigError("sigma0 must be positive", "sigma0");
}

SyntheticDataset generate_synthetic(const SyntheticSpec& spec,
                                    std::mt19937_64& rng) {
  spec.validate();
  std::uniform_real_distribution<double> item(spec.item_lo, spec.item_hi);
  std::uniform_real_distribution<double> user(spec.user_lo, spec.user_hi);
  SampleMatrix items(static_cast<Eigen::Index>(spec.n_items), spec.d);
  for (Eigen::Index r = 0; r < items.rows(); ++r) {
    for (Eigen::Index c = 0; c < spec.d; ++c) items(r, c) = item(rng);
  }
  Vector w(spec.d);
  for (Eigen::Index c = 0; c < spec.d; ++c) w[c] = user(rng);
  return {ItemPool(std::move(items)), std::move(w)};
}

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::string location(const std::string& source, std::size_t line, std::size_t col) {
  return source + ":" + std::to_string(line) + ": column " + std::to_string(col);
}

}  // namespace

ItemPool parse_embeddings(std::istream& in, const std::string& source) {
  std::vector<std::vector<double>> rows;
  std::optional<std::size_t> declared;
  std::string raw;
  std::size_t line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const std::string line = trim(raw);
    if (line.empty()) continue;
    if (line[0] == '#') {
      const std::string body = trim(line.substr(1));
      if (body.rfind("d=", 0) == 0) {
        std::size_t dim = 0;
        const std::string v = trim(body.substr(2));
        const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), dim);
        if (ec != std::errc() || ptr != v.data() + v.size() || dim == 0) {
          throw ParseError(location(source, line_no, 1) + ": bad dimension comment");
        }
        declared = dim;
      }
      continue;
    }
    std::vector<double> row;
    std::size_t col = 0;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
      ++col;
      const std::string t = trim(cell);
      const char* first = t.data();
      if (!t.empty() && *first == '+') ++first;
      double value = 0.0;
      const auto [ptr, ec] = std::from_chars(first, t.data() + t.size(), value);
      if (t.empty() || ec != std::errc() || ptr != t.data() + t.size()) {
        throw ParseError(location(source, line_no, col) + ": cannot parse '" + t + "'");
      }
      if (!std::isfinite(value)) {
        throw ParseError(location(source, line_no, col) + ": non-finite value '" + t + "'");
      }
      row.push_back(value);
    }
    if (!line.empty() && line.back() == ',') {
      throw ParseError(location(source, line_no, col + 1) + ": empty cell");
    }
    const std::size_t expected = declared ? *declared : (rows.empty() ? row.size() : rows.front().size());
    if (row.size() != expected) {
      throw ParseError(location(source, line_no, std::min(row.size(), expected) + 1) +
                       ": expected " + std::to_string(expected) + " columns, found " +
                       std::to_string(row.size()));
    }
    rows.push_back(std::move(row));
  }
  if (rows.size() < 2) throw ParseError(source + ": need at least 2 items");
  SampleMatrix items(static_cast<Eigen::Index>(rows.size()),
                     static_cast<Eigen::Index>(rows.front().size()));
  for (std::size_t r = 0; r < rows.size(); ++r) {
    for (std::size_t c = 0; c < rows[r].size(); ++c) {
      items(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = rows[r][c];
    }
  }
  return ItemPool(std::move(items));
}

ItemPool load_embeddings(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open embeddings file '" + path + "'");
  return parse_embeddings(in, path);
}

void save_embeddings(const std::string& path, const SampleMatrix& items) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write embeddings file '" + path + "'");
  out << "# d=" << items.cols() << '\n' << std::setprecision(17);
  for (Eigen::Index r = 0; r < items.rows(); ++r) {
    for (Eigen::Index c = 0; c < items.cols(); ++c) {
      if (c) out << ',';
      out << items(r, c);
    }
    out << '\n';
  }
}

double mse(const Vector& w_hat, const Vector& w_star) {
  if (w_hat.size() != w_star.size()) throw DimensionMismatch("mse: dimension mismatch");
  if (w_hat.size() == 0) throw DimensionMismatch("mse: empty vectors");
  return (w_hat - w_star).squaredNorm() / static_cast<double>(w_hat.size());
}

namespace {

// Rank position of each item when sorted by distance to w.
std::vector<std::size_t> distance_ranks(const Vector& w, const SampleMatrix& items) {
  const auto n = static_cast<std::size_t>(items.rows());
  std::vector<double> dist(n);
  for (std::size_t i = 0; i < n; ++i) {
    dist[i] = (items.row(static_cast<Eigen::Index>(i)).transpose() - w).squaredNorm();
  }
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (dist[a] != dist[b]) return dist[a] < dist[b];
    return a < b;
  });
  std::vector<std::size_t> rank(n);
  for (std::size_t r = 0; r < n; ++r) rank[order[r]] = r;
  return rank;
}

}  // namespace

double kendall_tau_distance(const Vector& w_hat, const Vector& w_star,
                            const SampleMatrix& items) {
  if (w_hat.size() != items.cols() || w_star.size() != items.cols()) {
    throw DimensionMismatch("kendall_tau_distance: dimension mismatch");
  }
  const auto n = static_cast<std::size_t>(items.rows());
  if (n < 2) throw Error("kendall_tau_distance needs at least 2 items");
  const auto ra = distance_ranks(w_hat, items);
  const auto rb = distance_ranks(w_star, items);
  std::size_t discordant = 0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const bool a = ra[i] < ra[j];
      const bool b = rb[i] < rb[j];
      if (a != b) ++discordant;
    }
  }
  return static_cast<double>(discordant) / (static_cast<double>(n) * (n - 1) / 2.0);
}

void write_records(std::ostream& out, const std::vector<RunRecord>& records,
                   bool omit_timing, bool header) {
  if (header) out << kRunRecordHeader << '\n';
  const auto old_precision = out.precision(17);
  for (const auto& r : records) {
    out << r.trial << ',' << r.query_index << ',' << r.method << ',' << r.mse
        << ',' << r.kendall_tau << ',' << (omit_timing ? 0.0 : r.selection_seconds)
        << ',' << r.mi_bits << ',' << r.posterior_trace << '\n';
  }
  out.precision(old_precision);
}

namespace {

constexpr std::uint64_t kDataStream = 11;
constexpr std::uint64_t kOracleStream = 12;
constexpr std::uint64_t kLearnerStream = 13;

std::uint64_t trial_seed(const ExperimentConfig& cfg, int trial) {
  return mix_seed(cfg.spec.seed, static_cast<std::uint64_t>(trial));
}

Box bounding_box(const SampleMatrix& items) {
  Vector lo = items.colwise().minCoeff().transpose();
  Vector hi = items.colwise().maxCoeff().transpose();
  for (Eigen::Index i = 0; i < lo.size(); ++i) {
    if (!(lo[i] < hi[i])) {
      lo[i] -= 0.5;
      hi[i] += 0.5;
    }
  }
  return Box(std::move(lo), std::move(hi));
}

PriorSpec default_prior(const ExperimentConfig& cfg) {
  if (cfg.prior) return *cfg.prior;
  if (cfg.embeddings) {
    const SampleMatrix& items = cfg.embeddings->items();
    const Vector mean = items.colwise().mean().transpose();
    const SampleMatrix centered = items.rowwise() - mean.transpose();
    Vector sd = (centered.colwise().squaredNorm() / static_cast<double>(items.rows() - 1))
                    .transpose()
                    .cwiseSqrt();
    sd = sd.cwiseMax(1e-6);
    return PriorSpec::gaussian(mean, sd);
  }
  return PriorSpec::isotropic_gaussian(cfg.spec.d, 1.0);
}

}  // namespace

SyntheticDataset trial_dataset(const ExperimentConfig& cfg, int trial) {
  std::mt19937_64 rng(mix_seed(trial_seed(cfg, trial), kDataStream));
  if (!cfg.embeddings) return generate_synthetic(cfg.spec, rng);
  const Box box = bounding_box(cfg.embeddings->items());
  Vector w(box.dim());
  for (Eigen::Index i = 0; i < w.size(); ++i) {
    std::uniform_real_distribution<double> u(box.lo[i], box.hi[i]);
    w[i] = u(rng);
  }
  return {*cfg.embeddings, std::move(w)};
}

std::vector<RunRecord> run_trial(const ExperimentConfig& cfg, int trial,
                                 const SyntheticDataset& data) {
  const std::uint64_t seed = trial_seed(cfg, trial);
  LearnerConfig lc;
  lc.prior = default_prior(cfg);
  lc.model = ResponseModel(cfg.spec.sigma0);
  lc.strategy = cfg.strategy;
  if (!lc.strategy.continuous_bounds) {
    lc.strategy.continuous_bounds =
        cfg.embeddings ? bounding_box(data.pool.items())
                       : Box::cube(cfg.spec.d, cfg.spec.item_lo, cfg.spec.item_hi);
  }
  lc.sampler = cfg.sampler;
  lc.seed = mix_seed(seed, kLearnerStream);

  OracleConfig oracle;
  oracle.true_point = data.true_point;
  oracle.mode = cfg.oracle_mode;
  oracle.model = ResponseModel(cfg.oracle_sigma0.value_or(cfg.spec.sigma0));
  std::mt19937_64 oracle_rng(mix_seed(seed, kOracleStream));

  ActiveLearner learner(lc, data.pool);
  const std::string method(method_name(cfg.strategy.method));
  std::vector<RunRecord> out;
  out.reserve(static_cast<std::size_t>(cfg.spec.queries) + 1);
  auto push = [&](int q, double seconds, double mi) {
    const PosteriorState& st = learner.posterior();
    out.push_back({trial, q, method, mse(st.mean(), data.true_point),
                   kendall_tau_distance(st.mean(), data.true_point, data.pool.items()),
                   seconds, mi, st.trace()});
  };
  push(0, 0.0, 0.0);
  for (int q = 1; q <= cfg.spec.queries; ++q) {
    const SelectionResult sel = learner.propose();
    const int y = simulate_response(oracle, sel.pair, oracle_rng);
    learner.record(sel, y);
    push(q, sel.diagnostics.selection_seconds, sel.diagnostics.mi_of_selected.value);
  }
  return out;
}

std::vector<TrialResult> run_active_loop(const ExperimentConfig& cfg) {
  cfg.spec.validate();
  cfg.strategy.validate();
  if (cfg.embeddings && cfg.embeddings->dim() != cfg.spec.d) {
    throw ConfigError("embedding dimension differs from the configured dimension", "dim");
  }
  const int n = cfg.spec.trials;
  std::vector<TrialResult> results(static_cast<std::size_t>(n));
  std::atomic<int> next{0};
  auto worker = [&] {
    for (int t = next++; t < n; t = next++) {
      TrialResult& r = results[static_cast<std::size_t>(t)];
      r.trial = t;
      try {
        r.records = run_trial(cfg, t, trial_dataset(cfg, t));
      } catch (const std::exception& e) {
        r.records.clear();
        r.error = "trial " + std::to_string(t) + ": " + e.what();
      }
    }
  };
  int threads = cfg.threads > 0 ? cfg.threads
                                : static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  threads = std::min(threads, n);
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (int i = 0; i < threads; ++i) pool.emplace_back(worker);
  }
  return results;
}

}  // namespace activepref
