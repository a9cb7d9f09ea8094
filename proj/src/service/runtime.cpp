#include "pointspeak/service/runtime.hpp"

#include <chrono>

namespace pointspeak::service {

void rotate_log(const std::filesystem::path& path) {
  std::error_code ec;
  if (!std::filesystem::exists(path, ec)) return;
  std::filesystem::path prev = path;
  prev += ".prev";
  std::filesystem::rename(path, prev, ec);
  if (ec) throw std::runtime_error("cannot rotate session log " + path.string() + ": " + ec.message());
}

ServiceRuntime::ServiceRuntime(AppConfig cfg, std::unique_ptr<VoiceAnalyzer> voice)
    : cfg_(std::move(cfg)), voice_(std::move(voice)) {
  cfg_.validate();
  if (!voice_) voice_ = std::make_unique<HttpVoiceAnalyzer>(cfg_.backend);
}

ServiceRuntime::~ServiceRuntime() { stop(); }

int ServiceRuntime::http_port() const { return http_ ? http_->port() : 0; }

void ServiceRuntime::start() {
  for (const auto& p : {cfg_.labels_path, cfg_.beacons_path, cfg_.session_log}) {
    if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
  }
  rotate_log(cfg_.session_log);

  SessionOptions opts;
  opts.fusion = cfg_.fusion;
  opts.vad = cfg_.vad;
  opts.anchor = cfg_.anchor;
  opts.labels_path = cfg_.labels_path;
  opts.beacons_path = cfg_.beacons_path;
  opts.log_path = cfg_.session_log;
  session_ = std::make_unique<Session>(opts, std::move(voice_), std::make_shared<SteadyClock>());

  bridge_port_ = cfg_.bridge_port;
  if (cfg_.bridge_enabled && cfg_.embedded_simulator) {
    bridge::BridgeServer::Options so;
    so.host = cfg_.bridge_host;
    so.port = cfg_.bridge_port;
    sim_ = std::make_unique<bridge::BridgeServer>(so);
    sim_->start();
    bridge_port_ = sim_->port();
  }
  if (cfg_.bridge_enabled) {
    bridge::BridgeClient::Options co;
    co.host = cfg_.bridge_host;
    co.port = bridge_port_;
    client_ = std::make_unique<bridge::BridgeClient>(co);
    tf_queue_ = client_->subscribe_tf(64);
    client_->start();
    bridge::BridgeClient* client = client_.get();
    session_->set_goal_sink([client](const bridge::NavGoal& g) { client->publish_goal(g); });
  }

  http_ = std::make_unique<HttpServer>(*session_, HttpServer::Options{cfg_.http_host, cfg_.http_port});
  try {
    http_->start();
  } catch (...) {
    stop();
    throw;
  }
  running_ = true;
  if (client_) robot_thread_ = std::thread([this] { robot_loop(); });
}

void ServiceRuntime::stop() {
  running_ = false;
  if (robot_thread_.joinable()) robot_thread_.join();
  if (http_) http_->stop();
  if (client_) client_->stop();
  if (sim_) sim_->stop();
}

void ServiceRuntime::robot_loop() {
  while (running_) {
    auto tf = tf_queue_->pop(std::chrono::milliseconds(100));
    if (!tf) continue;
    // Only the newest pose matters.
    while (auto newer = tf_queue_->try_pop()) tf = newer;
    session_->on_robot(*tf, client_->last_status(), client_->connected());
  }
}

}  // namespace pointspeak::service
