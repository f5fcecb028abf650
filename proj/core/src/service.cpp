#include "activepref/service.hpp"

#include <algorithm>
#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <set>

namespace activepref {

namespace {

constexpr std::uint64_t kGenericLearnerStream = 31;
constexpr int kRetryAfterSeconds = 1;

std::string join(const std::string& path, const std::string& key) {
  return path.empty() ? key : path + "." + key;
}

bool is_non_negative_integer(const json& v) {
  return v.is_number_unsigned() || (v.is_number_integer() && v.get<std::int64_t>() >= 0);
}

// Typed accessors that report the dotted path of the offending field.
class Fields {
 public:
  Fields(const json& obj, std::string path) : obj_(obj), path_(std::move(path)) {
    if (!obj_.is_object()) throw ConfigError("expected an object", path_);
  }

  void allow_only(std::initializer_list<const char*> keys) const {
    const std::set<std::string> allowed(keys.begin(), keys.end());
    for (const auto& [k, v] : obj_.items()) {
      if (!allowed.contains(k)) throw ConfigError("unknown field", field(k));
    }
  }

  bool has(const char* key) const { return obj_.contains(key) && !obj_.at(key).is_null(); }
  std::string field(const std::string& key) const { return join(path_, key); }
  const json& at(const char* key) const { return obj_.at(key); }

  double number(const char* key, double fallback) const {
    if (!has(key)) return fallback;
    const json& v = obj_.at(key);
    if (!v.is_number()) throw ConfigError("expected a number", field(key));
    const double x = v.get<double>();
    if (!std::isfinite(x)) throw ConfigError("expected a finite number", field(key));
    return x;
  }

  std::int64_t integer(const char* key, std::int64_t fallback) const {
    if (!has(key)) return fallback;
    const json& v = obj_.at(key);
    if (!v.is_number_integer()) throw ConfigError("expected an integer", field(key));
    return v.get<std::int64_t>();
  }

  std::uint64_t unsigned_integer(const char* key, std::uint64_t fallback) const {
    if (!has(key)) return fallback;
    const json& v = obj_.at(key);
    if (!is_non_negative_integer(v)) {
      throw ConfigError("expected a non-negative integer", field(key));
    }
    return v.get<std::uint64_t>();
  }

  std::string string(const char* key, const std::string& fallback) const {
    if (!has(key)) return fallback;
    const json& v = obj_.at(key);
    if (v.is_string()) return v.get<std::string>();
    if (v.is_number_integer()) return std::to_string(v.get<std::int64_t>());
    throw ConfigError("expected a string", field(key));
  }

 private:
  const json& obj_;
  std::string path_;
};

Vector parse_vector(const json& v, const std::string& path) {
  if (!v.is_array() || v.empty()) throw ConfigError("expected a non-empty array of numbers", path);
  Vector out(static_cast<Eigen::Index>(v.size()));
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (!v[i].is_number()) {
      throw ConfigError("expected a number", path + "[" + std::to_string(i) + "]");
    }
    out[static_cast<Eigen::Index>(i)] = v[i].get<double>();
    if (!std::isfinite(out[static_cast<Eigen::Index>(i)])) {
      throw ConfigError("expected a finite number", path + "[" + std::to_string(i) + "]");
    }
  }
  return out;
}

json to_json(const Vector& v) {
  json a = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v[i]);
  return a;
}

json to_json(const GainVector& g) {
  return {{"k_x", g.k_x}, {"k_y", g.k_y}, {"k_theta", g.k_theta}};
}

SamplerConfig parse_sampler(const Fields& cfg) {
  SamplerConfig sc;
  if (!cfg.has("sampler")) return sc;
  const Fields s(cfg.at("sampler"), cfg.field("sampler"));
  s.allow_only({"chains", "burn_in", "samples", "target_accept"});
  sc.chains = static_cast<int>(s.integer("chains", sc.chains));
  sc.burn_in = static_cast<int>(s.integer("burn_in", sc.burn_in));
  sc.samples = static_cast<int>(s.integer("samples", sc.samples));
  sc.target_accept = s.number("target_accept", sc.target_accept);
  if (sc.chains < 1) throw ConfigError("must be >= 1", s.field("chains"));
  if (sc.burn_in < 0) throw ConfigError("must be >= 0", s.field("burn_in"));
  if (sc.samples < 2) throw ConfigError("must be >= 2", s.field("samples"));
  if (!(sc.target_accept > 0.0 && sc.target_accept < 1.0)) {
    throw ConfigError("must lie in (0, 1)", s.field("target_accept"));
  }
  return sc;
}

Method parse_strategy(const Fields& cfg, const std::string& fallback) {
  const std::string name = cfg.string("strategy", fallback);
  try {
    return parse_method(name);
  } catch (const ConfigError&) {
    throw ConfigError("unknown strategy '" + name + "'", cfg.field("strategy"));
  }
}

// Re-labels ConfigErrors thrown by library validation with the config path.
template <class F>
auto with_path(const std::string& path, F&& f) {
  try {
    return f();
  } catch (const ConfigError& e) {
    throw ConfigError(e.what(), join(path, e.field()));
  }
}

void parse_gain_config(SessionSpec& spec, const Fields& cfg, std::uint64_t seed) {
  cfg.allow_only({"trajectory", "start", "strategy", "sigma0", "kappa", "gain_bounds",
                  "prior_sd", "pool_size", "max_queries", "seed", "t_period", "t_final",
                  "dt", "sampler"});
  GainTuningConfig g;
  const std::string trajectory = cfg.string("trajectory", "1");
  const std::string start = cfg.string("start", "perfect");
  const double t_period = cfg.number("t_period", 10.0);
  const double t_final = cfg.number("t_final", 12.0);
  try {
    g.scenarios = make_scenarios(trajectory, start, t_period, t_final);
  } catch (const ConfigError& e) {
    throw ConfigError(e.what(), cfg.field(e.field()));
  }
  g.strategy = parse_strategy(cfg, "info_synth");
  g.sigma0 = cfg.number("sigma0", g.sigma0);
  g.kappa = cfg.number("kappa", g.kappa);
  if (cfg.has("gain_bounds")) {
    const Vector b = parse_vector(cfg.at("gain_bounds"), cfg.field("gain_bounds"));
    if (b.size() != 2) throw ConfigError("expected [lo, hi]", cfg.field("gain_bounds"));
    g.gain_lo = b[0];
    g.gain_hi = b[1];
  }
  g.prior_sd = cfg.number("prior_sd", g.prior_sd);
  const std::int64_t pool_size = cfg.integer("pool_size", static_cast<std::int64_t>(g.pool_size));
  if (pool_size < 2) throw ConfigError("must be >= 2", cfg.field("pool_size"));
  g.pool_size = static_cast<std::size_t>(pool_size);
  g.dt = cfg.number("dt", g.dt);
  g.sampler = parse_sampler(cfg);
  g.seed = seed;
  g.queries = 0;
  with_path("config", [&] { g.validate(); return 0; });
  spec.gain = std::move(g);
}

void parse_generic_config(SessionSpec& spec, const Fields& cfg, std::uint64_t seed) {
  cfg.allow_only({"dim", "items", "strategy", "sigma0", "bounds", "prior_mean", "prior_sd",
                  "alpha", "beta", "gamma", "k", "zeta", "no_repeat", "max_queries", "seed",
                  "sampler"});
  std::optional<ItemPool> pool;
  if (cfg.has("items")) {
    const json& items = cfg.at("items");
    if (!items.is_array() || items.size() < 2) {
      throw ConfigError("expected at least 2 items", cfg.field("items"));
    }
    std::vector<Vector> rows;
    for (std::size_t i = 0; i < items.size(); ++i) {
      rows.push_back(parse_vector(items[i], cfg.field("items") + "[" + std::to_string(i) + "]"));
      if (rows.back().size() != rows.front().size()) {
        throw ConfigError("ragged item rows", cfg.field("items") + "[" + std::to_string(i) + "]");
      }
    }
    SampleMatrix m(static_cast<Eigen::Index>(rows.size()), rows.front().size());
    for (std::size_t i = 0; i < rows.size(); ++i) m.row(static_cast<Eigen::Index>(i)) = rows[i].transpose();
    pool.emplace(std::move(m));
  }
  const std::int64_t dim = cfg.integer("dim", pool ? pool->dim() : 0);
  if (dim < 1) throw ConfigError("dimension must be >= 1", cfg.field("dim"));
  if (pool && dim != pool->dim()) throw ConfigError("dimension differs from items", cfg.field("dim"));
  const auto d = static_cast<Eigen::Index>(dim);

  LearnerConfig lc;
  const double sigma0 = cfg.number("sigma0", 0.1);
  if (!(sigma0 > 0.0)) throw ConfigError("must be positive", cfg.field("sigma0"));
  lc.model = ResponseModel(sigma0);
  Vector prior_mean = Vector::Zero(d);
  if (cfg.has("prior_mean")) {
    prior_mean = parse_vector(cfg.at("prior_mean"), cfg.field("prior_mean"));
    if (prior_mean.size() != d) throw ConfigError("wrong dimension", cfg.field("prior_mean"));
  }
  const double prior_sd = cfg.number("prior_sd", 1.0);
  if (!(prior_sd > 0.0)) throw ConfigError("must be positive", cfg.field("prior_sd"));
  lc.prior = PriorSpec::gaussian(prior_mean, Vector::Constant(d, prior_sd));

  StrategyConfig& st = lc.strategy;
  st.method = parse_strategy(cfg, pool ? "active_discrete" : "info_synth");
  if (is_pool_method(st.method) && !pool) {
    throw ConfigError("strategy needs items", cfg.field("items"));
  }
  st.alpha = cfg.number("alpha", st.alpha);
  st.beta = cfg.number("beta", st.beta);
  st.gamma = cfg.number("gamma", st.gamma);
  st.k = static_cast<int>(cfg.integer("k", st.k));
  st.zeta = cfg.number("zeta", st.zeta);
  if (cfg.has("no_repeat")) {
    if (!cfg.at("no_repeat").is_boolean()) throw ConfigError("expected a boolean", cfg.field("no_repeat"));
    st.no_repeat = cfg.at("no_repeat").get<bool>();
  }
  if (cfg.has("bounds")) {
    const Fields b(cfg.at("bounds"), cfg.field("bounds"));
    b.allow_only({"lo", "hi"});
    if (!b.has("lo") || !b.has("hi")) throw ConfigError("needs lo and hi", cfg.field("bounds"));
    Vector lo = parse_vector(b.at("lo"), b.field("lo"));
    Vector hi = parse_vector(b.at("hi"), b.field("hi"));
    if (lo.size() != d || hi.size() != d) throw ConfigError("wrong dimension", cfg.field("bounds"));
    st.continuous_bounds = with_path(cfg.field("bounds"), [&] { return Box(lo, hi); });
  } else {
    st.continuous_bounds = Box::cube(d, -4.0, 4.0);
  }
  with_path("config", [&] { st.validate(); return 0; });
  if (pool && (st.method == Method::kKnnApprox) && static_cast<std::size_t>(st.k) > pool->size()) {
    throw ConfigError("k exceeds the number of items", cfg.field("k"));
  }
  lc.sampler = parse_sampler(cfg);
  lc.seed = mix_seed(seed, kGenericLearnerStream);
  spec.generic = std::move(lc);
  spec.pool = std::move(pool);
}

}  // namespace

json error_body(const std::string& code, const std::string& message,
                const std::string& field) {
  json body = {{"code", code}, {"message", message}};
  if (!field.empty()) body["field"] = field;
  return body;
}

SessionSpec parse_session_request(const json& request, std::uint64_t default_seed) {
  const Fields top(request, "");
  top.allow_only({"mode", "config"});
  SessionSpec spec;
  const std::string mode = top.string("mode", "");
  if (mode == "gain_tuning") {
    spec.mode = SessionMode::kGainTuning;
  } else if (mode == "generic_pairs") {
    spec.mode = SessionMode::kGenericPairs;
  } else {
    throw ConfigError("mode must be gain_tuning or generic_pairs", "mode");
  }
  const json empty = json::object();
  const json& cfg_json = top.has("config") ? top.at("config") : empty;
  const Fields cfg(cfg_json, "config");
  const std::uint64_t seed = cfg.unsigned_integer("seed", default_seed);
  const std::int64_t max_queries = cfg.integer("max_queries", 0);
  if (max_queries < 0) throw ConfigError("must be >= 0", cfg.field("max_queries"));
  spec.max_queries = static_cast<int>(max_queries);
  if (spec.mode == SessionMode::kGainTuning) {
    parse_gain_config(spec, cfg, seed);
  } else {
    parse_generic_config(spec, cfg, seed);
  }
  spec.raw = {{"mode", mode}, {"config", cfg_json}};
  spec.raw["config"]["seed"] = seed;
  return spec;
}

ActiveLearner make_session_learner(const SessionSpec& spec) {
  if (spec.mode == SessionMode::kGainTuning) return make_gain_learner(*spec.gain);
  return ActiveLearner(*spec.generic, spec.pool);
}

struct PendingQuery {
  std::uint64_t query_id = 0;
  SelectionResult selection;
  json payload;
};

class Session {
 public:
  Session(std::string id_in, std::uint64_t ordinal_in, SessionSpec spec_in)
      : id(std::move(id_in)),
        ordinal(ordinal_in),
        spec(std::move(spec_in)),
        learner(make_session_learner(spec)) {}

  std::string id;
  std::uint64_t ordinal;
  SessionSpec spec;
  ActiveLearner learner;
  std::optional<PendingQuery> pending;
  std::vector<std::uint64_t> answered_ids;
  bool deleted = false;

  std::mutex mutex;  // serializes requests on this session
  std::atomic<bool> computing{false};

  bool done() const {
    return spec.max_queries > 0 && learner.step() >= static_cast<std::size_t>(spec.max_queries);
  }

  std::string status() const {
    if (computing) return "computing";
    if (done()) return "done";
    return "awaiting_response";
  }

  std::uint64_t next_query_id() const { return learner.step() + 1; }

  json summary() const {
    const PosteriorState& st = learner.posterior();
    json s = {{"session_id", id},
              {"status", status()},
              {"query_count", learner.step()},
              {"posterior_trace", st.trace()}};
    if (spec.mode == SessionMode::kGainTuning) {
      const GainVector g = GainVector::from_log(st.mean());
      s["mean"] = to_json(g);
      s["mean_log"] = to_json(st.mean());
      const double err = mean_tracking_error(g, spec.gain->scenarios, spec.gain->dt);
      s["mean_tracking_error"] = std::isfinite(err) ? json(err) : json(nullptr);
    } else {
      s["mean"] = to_json(st.mean());
    }
    return s;
  }

  json descriptor() const {
    json d = {{"session_id", id},
              {"mode", spec.raw["mode"]},
              {"status", status()},
              {"query_count", learner.step()},
              {"max_queries", spec.max_queries},
              {"config", spec.raw["config"]},
              {"summary", summary()}};
    d["current_query_id"] = pending ? json(pending->query_id) : json(nullptr);
    return d;
  }

  json snapshot() const {
    json responses = json::array();
    const History& h = learner.history();
    for (std::size_t i = 0; i < h.size(); ++i) {
      json r = {{"query_id", answered_ids[i]}, {"y", h[i].y}, {"p", to_json(h[i].pair.p)},
                {"q", to_json(h[i].pair.q)}};
      if (h[i].pool_indices) {
        r["pool_indices"] = {h[i].pool_indices->first, h[i].pool_indices->second};
      }
      responses.push_back(std::move(r));
    }
    return {{"version", 1}, {"session_id", id}, {"ordinal", ordinal},
            {"request", spec.raw}, {"responses", std::move(responses)}};
  }

  json build_payload(std::uint64_t query_id, const SelectionResult& sel) const {
    json p = {{"query_id", query_id}, {"mi_bits", sel.diagnostics.mi_of_selected.value}};
    if (spec.mode == SessionMode::kGenericPairs) {
      p["item_a"] = to_json(sel.pair.p);
      p["item_b"] = to_json(sel.pair.q);
      if (sel.pair_indices) p["item_indices"] = {sel.pair_indices->first, sel.pair_indices->second};
      return p;
    }
    const GainTuningConfig& g = *spec.gain;
    const GainVector a = GainVector::from_log(sel.pair.p);
    const GainVector b = GainVector::from_log(sel.pair.q);
    p["gains_a"] = to_json(a);
    p["gains_b"] = to_json(b);
    p["dt"] = g.dt;
    json traj_a = json::array(), traj_b = json::array(), refs = json::array();
    json labels = json::array(), div_a = json::array(), div_b = json::array();
    auto encode = [](const Trajectory& t) {
      json rows = json::array();
      for (const auto& s : t.samples) rows.push_back({s.t, s.state.x, s.state.y, s.state.theta});
      return rows;
    };
    for (const auto& sc : g.scenarios) {
      const SimulationOutcome sa = simulate_until_divergence(a, sc, g.dt);
      const SimulationOutcome sb = simulate_until_divergence(b, sc, g.dt);
      traj_a.push_back(encode(sa.trajectory));
      traj_b.push_back(encode(sb.trajectory));
      div_a.push_back(sa.diverged);
      div_b.push_back(sb.diverged);
      json ref = json::array();
      for (const auto& pt : discretize_path(sc.path, 200)) ref.push_back({pt.x(), pt.y()});
      refs.push_back(std::move(ref));
      labels.push_back(sc.label);
    }
    p["trajectory_a"] = std::move(traj_a);
    p["trajectory_b"] = std::move(traj_b);
    p["diverged_a"] = std::move(div_a);
    p["diverged_b"] = std::move(div_b);
    p["reference_path"] = std::move(refs);
    p["scenario_labels"] = std::move(labels);
    return p;
  }
};

SessionService::SessionService(Options options) : options_(std::move(options)) {
  if (options_.data_dir) {
    std::filesystem::create_directories(*options_.data_dir);
    load_snapshots();
  }
}

SessionService::~SessionService() = default;

std::size_t SessionService::session_count() const {
  std::shared_lock lock(map_mutex_);
  return sessions_.size();
}

namespace {

std::string session_id_for(std::uint64_t seed, std::uint64_t ordinal) {
  char buf[20];
  std::snprintf(buf, sizeof buf, "s%016" PRIx64, mix_seed(seed, ordinal));
  return buf;
}

ServiceReply not_found(const std::string& id) {
  return {404, error_body("not_found", "no session '" + id + "'")};
}

ServiceReply busy() {
  return {503, error_body("computing", "session is updating its posterior; retry shortly"),
          kRetryAfterSeconds};
}

void write_snapshot(const std::filesystem::path& dir, const Session& s) {
  const auto path = dir / (s.id + ".json");
  const auto tmp = dir / (s.id + ".json.tmp");
  {
    std::ofstream out(tmp);
    if (!out) throw Error("cannot write snapshot " + tmp.string());
    out << s.snapshot().dump(1) << '\n';
  }
  std::filesystem::rename(tmp, path);
}

}  // namespace

void SessionService::load_snapshots() {
  std::vector<std::filesystem::path> files;
  for (const auto& entry : std::filesystem::directory_iterator(*options_.data_dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".json") files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());
  for (const auto& f : files) {
    try {
      std::ifstream in(f);
      const json snap = json::parse(in);
      const std::uint64_t ordinal = snap.at("ordinal").get<std::uint64_t>();
      SessionSpec spec = parse_session_request(snap.at("request"), mix_seed(options_.seed, ordinal));
      auto session = std::make_shared<Session>(snap.at("session_id").get<std::string>(), ordinal,
                                               std::move(spec));
      for (const auto& r : snap.at("responses")) {
        std::optional<IndexPair> idx;
        if (r.contains("pool_indices")) {
          idx = IndexPair{r["pool_indices"][0].get<std::size_t>(), r["pool_indices"][1].get<std::size_t>()};
        }
        session->learner.record(QueryPair(parse_vector(r.at("p"), "p"), parse_vector(r.at("q"), "q")),
                                r.at("y").get<int>(), idx);
        session->answered_ids.push_back(r.at("query_id").get<std::uint64_t>());
      }
      next_ordinal_ = std::max(next_ordinal_, ordinal + 1);
      sessions_[session->id] = std::move(session);
    } catch (const std::exception& e) {
      std::clog << "warning: skipping snapshot " << f << ": " << e.what() << '\n';
    }
  }
}

std::shared_ptr<Session> SessionService::find(const std::string& id) const {
  std::shared_lock lock(map_mutex_);
  const auto it = sessions_.find(id);
  return it == sessions_.end() ? nullptr : it->second;
}

ServiceReply SessionService::create_session(const json& request) {
  std::uint64_t ordinal = 0;
  {
    std::unique_lock lock(map_mutex_);
    ordinal = next_ordinal_++;
  }
  std::shared_ptr<Session> session;
  try {
    SessionSpec spec = parse_session_request(request, mix_seed(options_.seed, ordinal));
    session = std::make_shared<Session>(session_id_for(options_.seed, ordinal), ordinal,
                                        std::move(spec));
  } catch (const ConfigError& e) {
    return {400, error_body("invalid_config", e.what(), e.field())};
  } catch (const Error& e) {
    return {400, error_body("invalid_config", e.what())};
  }
  std::lock_guard session_lock(session->mutex);
  {
    std::unique_lock lock(map_mutex_);
    sessions_[session->id] = session;
  }
  if (options_.data_dir) write_snapshot(*options_.data_dir, *session);
  return {201, session->descriptor()};
}

ServiceReply SessionService::get_session(const std::string& id) {
  auto s = find(id);
  if (!s) return not_found(id);
  if (s->computing) return busy();
  std::lock_guard lock(s->mutex);
  if (s->deleted) return not_found(id);
  return {200, s->descriptor()};
}

ServiceReply SessionService::estimate(const std::string& id) {
  auto s = find(id);
  if (!s) return not_found(id);
  if (s->computing) return busy();
  std::lock_guard lock(s->mutex);
  if (s->deleted) return not_found(id);
  return {200, s->summary()};
}

ServiceReply SessionService::next_query(const std::string& id) {
  auto s = find(id);
  if (!s) return not_found(id);
  if (s->computing) return busy();
  std::lock_guard lock(s->mutex);
  if (s->deleted) return not_found(id);
  if (s->pending) return {200, s->pending->payload};
  if (s->done()) {
    return {409, error_body("session_done", "session has reached max_queries")};
  }
  try {
    PendingQuery q;
    q.query_id = s->next_query_id();
    q.selection = s->learner.propose();
    q.payload = s->build_payload(q.query_id, q.selection);
    s->pending = std::move(q);
  } catch (const Error& e) {
    return {409, error_body("selection_failed", e.what())};
  }
  return {200, s->pending->payload};
}

ServiceReply SessionService::submit_response(const std::string& id, const json& request) {
  auto s = find(id);
  if (!s) return not_found(id);
  if (s->computing) return busy();
  std::lock_guard lock(s->mutex);
  if (s->deleted) return not_found(id);
  if (!request.is_object()) return {400, error_body("invalid_request", "expected a JSON object")};
  if (!request.contains("query_id") || !is_non_negative_integer(request["query_id"])) {
    return {400, error_body("invalid_request", "query_id must be a non-negative integer", "query_id")};
  }
  if (!request.contains("choice") || !request["choice"].is_string() ||
      (request["choice"] != "A" && request["choice"] != "B")) {
    return {400, error_body("invalid_request", "choice must be \"A\" or \"B\"", "choice")};
  }
  const auto query_id = request["query_id"].get<std::uint64_t>();
  if (!s->pending || s->pending->query_id != query_id) {
    return {409, error_body("stale_query", "query_id " + std::to_string(query_id) +
                                               " is not the outstanding query", "query_id")};
  }
  const int y = request["choice"] == "A" ? 1 : 0;
  s->computing = true;
  try {
    s->learner.record(s->pending->selection, y);
  } catch (const Error& e) {
    s->computing = false;
    return {500, error_body("update_failed", e.what())};
  }
  s->answered_ids.push_back(query_id);
  s->pending.reset();
  s->computing = false;
  if (options_.data_dir) write_snapshot(*options_.data_dir, *s);
  return {200, s->summary()};
}

ServiceReply SessionService::delete_session(const std::string& id) {
  std::shared_ptr<Session> s;
  {
    std::unique_lock lock(map_mutex_);
    const auto it = sessions_.find(id);
    if (it == sessions_.end()) return not_found(id);
    s = it->second;
    sessions_.erase(it);
  }
  std::lock_guard lock(s->mutex);
  s->deleted = true;
  if (options_.data_dir) {
    std::error_code ec;
    std::filesystem::remove(*options_.data_dir / (id + ".json"), ec);
  }
  return {200, json{{"session_id", id}, {"deleted", true}}};
}

}  // namespace activepref
