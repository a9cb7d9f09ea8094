#pragma once

#include <atomic>
#include <memory>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

#include "pointspeak/json_io.hpp"
#include "pointspeak/service/session.hpp"

namespace pointspeak::service {

struct HttpResponse {
  int status = 200;
  Json body;
};

// Routes one request to the session. Exposed for tests that skip the socket.
//   GET  /state      POST /mode      POST /capture
//   POST /labels     POST /calibrate GET  /metrics
HttpResponse handle_request(Session& session, const std::string& method, const std::string& target,
                            const std::string& body);

// HTTP/1.1 API plus the /events WebSocket on one port. One thread per
// connection; each /events client gets a bounded queue of encoded events.
class HttpServer {
 public:
  struct Options {
    std::string host = "127.0.0.1";
    int port = 8080;  // 0 picks a free port
    std::size_t event_queue = 1024;
  };

  HttpServer(Session& session, Options opts);
  ~HttpServer();
  HttpServer(const HttpServer&) = delete;
  HttpServer& operator=(const HttpServer&) = delete;

  // Throws std::runtime_error when the address cannot be bound.
  void start();
  void stop();
  int port() const { return port_; }

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
  Session& session_;
  Options opts_;
  int port_ = 0;
};

}  // namespace pointspeak::service
