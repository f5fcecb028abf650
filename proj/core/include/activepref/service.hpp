#pragma once

#include <atomic>
#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <string>

#include <json.hpp>

#include "activepref/approximation.hpp"
#include "activepref/gain_tuning.hpp"
#include "activepref/learner.hpp"

namespace activepref {

using json = nlohmann::json;

// Transport-independent reply: HTTP status plus JSON body.
struct ServiceReply {
  ServiceReply() = default;
  ServiceReply(int status_in, json body_in, std::optional<int> retry = {})
      : status(status_in), body(std::move(body_in)), retry_after(retry) {}

  int status = 200;
  json body;
  std::optional<int> retry_after;  // seconds, set with status 503
};

enum class SessionMode { kGainTuning, kGenericPairs };

// Parsed and validated session configuration. The raw JSON is kept so a
// snapshot can rebuild the session exactly.
struct SessionSpec {
  SessionMode mode = SessionMode::kGainTuning;
  json raw;
  std::optional<GainTuningConfig> gain;  // gain_tuning
  std::optional<LearnerConfig> generic;  // generic_pairs
  std::optional<ItemPool> pool;          // generic_pairs with items
  int max_queries = 0;                   // 0 = unbounded
};

// Parses POST /sessions bodies; throws ConfigError with a dotted field path.
SessionSpec parse_session_request(const json& request, std::uint64_t default_seed);

// Learner a session with this spec runs; also used for library-only replays.
ActiveLearner make_session_learner(const SessionSpec& spec);

class Session;

// Owns all sessions. Distinct sessions proceed concurrently; requests on one
// session are serialized, and a request arriving while that session
// resamples its posterior gets a 503 with Retry-After.
class SessionService {
 public:
  struct Options {
    std::uint64_t seed = 0;
    std::optional<std::filesystem::path> data_dir;  // snapshots, if set
  };

  explicit SessionService(Options options);
  ~SessionService();

  ServiceReply create_session(const json& request);
  ServiceReply get_session(const std::string& id);
  ServiceReply next_query(const std::string& id);
  ServiceReply submit_response(const std::string& id, const json& request);
  ServiceReply estimate(const std::string& id);
  ServiceReply delete_session(const std::string& id);

  std::size_t session_count() const;

 private:
  std::shared_ptr<Session> find(const std::string& id) const;
  void load_snapshots();

  Options options_;
  mutable std::shared_mutex map_mutex_;
  std::map<std::string, std::shared_ptr<Session>> sessions_;
  std::uint64_t next_ordinal_ = 0;
};

json error_body(const std::string& code, const std::string& message,
                const std::string& field = {});

}  // namespace activepref
