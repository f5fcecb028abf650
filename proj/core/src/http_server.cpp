#include "activepref/http_server.hpp"

#include <cstdlib>
#include <string>

#include <httplib.h>

namespace activepref {

struct HttpServer::Impl {
  SessionService& service;
  httplib::Server server;
  int port = -1;

  explicit Impl(SessionService& s) : service(s) {}
};

namespace {

void send(httplib::Response& res, const ServiceReply& reply) {
  res.status = reply.status;
  if (reply.retry_after) res.set_header("Retry-After", std::to_string(*reply.retry_after));
  res.set_content(reply.body.dump(), "application/json");
}

// Parses a request body; replies 400 and returns nullopt on malformed JSON.
std::optional<json> parse_body(const httplib::Request& req, httplib::Response& res) {
  if (req.body.empty()) return json::object();
  json body = json::parse(req.body, nullptr, false);
  if (body.is_discarded()) {
    send(res, {400, error_body("invalid_json", "request body is not valid JSON")});
    return std::nullopt;
  }
  return body;
}

}  // namespace

HttpServer::HttpServer(SessionService& service) : impl_(std::make_unique<Impl>(service)) {
  auto& srv = impl_->server;
  SessionService& svc = service;

  srv.set_default_headers({{"Access-Control-Allow-Origin", "*"},
                           {"Access-Control-Allow-Headers", "Content-Type"},
                           {"Access-Control-Allow-Methods", "GET, POST, DELETE, OPTIONS"}});
  srv.Options(R"(.*)", [](const httplib::Request&, httplib::Response& res) { res.status = 204; });

  srv.Post("/sessions", [&svc](const httplib::Request& req, httplib::Response& res) {
    if (auto body = parse_body(req, res)) send(res, svc.create_session(*body));
  });
  srv.Get(R"(/sessions/([A-Za-z0-9_-]+))", [&svc](const httplib::Request& req, httplib::Response& res) {
    send(res, svc.get_session(req.matches[1]));
  });
  srv.Get(R"(/sessions/([A-Za-z0-9_-]+)/query)",
          [&svc](const httplib::Request& req, httplib::Response& res) {
            send(res, svc.next_query(req.matches[1]));
          });
  srv.Post(R"(/sessions/([A-Za-z0-9_-]+)/response)",
           [&svc](const httplib::Request& req, httplib::Response& res) {
             if (auto body = parse_body(req, res)) send(res, svc.submit_response(req.matches[1], *body));
           });
  srv.Get(R"(/sessions/([A-Za-z0-9_-]+)/estimate)",
          [&svc](const httplib::Request& req, httplib::Response& res) {
            send(res, svc.estimate(req.matches[1]));
          });
  srv.Delete(R"(/sessions/([A-Za-z0-9_-]+))",
             [&svc](const httplib::Request& req, httplib::Response& res) {
               send(res, svc.delete_session(req.matches[1]));
             });
  srv.set_error_handler([](const httplib::Request&, httplib::Response& res) {
    if (res.body.empty()) {
      const std::string code = res.status == 404 ? "not_found" : "http_error";
      res.set_content(error_body(code, "HTTP " + std::to_string(res.status)).dump(),
                      "application/json");
    }
  });
  srv.set_exception_handler([](const httplib::Request&, httplib::Response& res, std::exception_ptr ep) {
    std::string what = "unknown error";
    try {
      std::rethrow_exception(ep);
    } catch (const std::exception& e) {
      what = e.what();
    } catch (...) {
    }
    res.status = 500;
    res.set_content(error_body("internal_error", what).dump(), "application/json");
  });
}

HttpServer::~HttpServer() { stop(); }

bool HttpServer::bind(const std::string& host, int port) {
  if (port == 0) {
    impl_->port = impl_->server.bind_to_any_port(host);
    return impl_->port > 0;
  }
  if (!impl_->server.bind_to_port(host, port)) return false;
  impl_->port = port;
  return true;
}

void HttpServer::serve() { impl_->server.listen_after_bind(); }

bool HttpServer::listen(const std::string& host, int port) {
  if (!bind(host, port)) return false;
  serve();
  return true;
}

void HttpServer::stop() {
  if (impl_) impl_->server.stop();
}

int HttpServer::port() const { return impl_->port; }

bool HttpServer::running() const { return impl_->server.is_running(); }

int port_from_env(int fallback) {
  const char* v = std::getenv("ACTIVEPREF_PORT");
  if (v == nullptr || *v == '\0') return fallback;
  char* end = nullptr;
  const long p = std::strtol(v, &end, 10);
  if (*end != '\0' || p < 0 || p > 65535) {
    throw ConfigError("ACTIVEPREF_PORT must be a port number", "ACTIVEPREF_PORT");
  }
  return static_cast<int>(p);
}

}  // namespace activepref
