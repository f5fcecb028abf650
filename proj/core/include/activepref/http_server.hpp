#pragma once

#include <memory>
#include <string>

#include "activepref/service.hpp"

namespace activepref {

// JSON/HTTP front end for SessionService:
//   POST   /sessions
//   GET    /sessions/{id}
//   GET    /sessions/{id}/query
//   POST   /sessions/{id}/response
//   GET    /sessions/{id}/estimate
//   DELETE /sessions/{id}
class HttpServer {
 public:
  explicit HttpServer(SessionService& service);
  ~HttpServer();

  // Binds and serves until stop(); returns false if binding failed. Port 0
  // picks a free port, readable from port() once listening.
  bool listen(const std::string& host, int port);
  // Binds without serving, for callers that run serve() on their own thread.
  bool bind(const std::string& host, int port);
  void serve();
  void stop();
  int port() const;
  bool running() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

// Port from ACTIVEPREF_PORT, falling back to `fallback`.
int port_from_env(int fallback);

}  // namespace activepref
