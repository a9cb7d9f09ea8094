#pragma once

#include <atomic>
#include <memory>
#include <thread>

#include "pointspeak/bridge/endpoints.hpp"
#include "pointspeak/service/config.hpp"
#include "pointspeak/service/http_server.hpp"
#include "pointspeak/service/session.hpp"

namespace pointspeak::service {

// The long-running service: session, HTTP/WebSocket API, bridge client and
// (optionally) an embedded robot simulator.
class ServiceRuntime {
 public:
  // Uses HttpVoiceAnalyzer(cfg.backend) when `voice` is null. Throws
  // ConfigError for an invalid config.
  explicit ServiceRuntime(AppConfig cfg, std::unique_ptr<VoiceAnalyzer> voice = nullptr);
  ~ServiceRuntime();
  ServiceRuntime(const ServiceRuntime&) = delete;
  ServiceRuntime& operator=(const ServiceRuntime&) = delete;

  // Loads the stores, rotates the session log and binds the ports.
  void start();
  void stop();

  int http_port() const;
  int bridge_port() const { return bridge_port_; }
  Session& session() { return *session_; }
  bridge::BridgeServer* simulator() { return sim_.get(); }
  bridge::BridgeClient* bridge() { return client_.get(); }

 private:
  void robot_loop();

  AppConfig cfg_;
  std::unique_ptr<VoiceAnalyzer> voice_;
  std::unique_ptr<Session> session_;
  std::unique_ptr<HttpServer> http_;
  std::unique_ptr<bridge::BridgeServer> sim_;
  std::unique_ptr<bridge::BridgeClient> client_;
  std::shared_ptr<bridge::BridgeClient::TfQueue> tf_queue_;
  int bridge_port_ = 0;
  std::atomic<bool> running_{false};
  std::thread robot_thread_;
};

// Moves an existing log aside to "<name>.prev".
void rotate_log(const std::filesystem::path& path);

}  // namespace pointspeak::service
