#include "pointspeak/stub_backend.hpp"

#include <chrono>
#include <stdexcept>

#include "httplib.h"
#include "pointspeak/intent.hpp"
#include "pointspeak/json_io.hpp"

namespace pointspeak {

StubBackend::StubBackend() : server_(std::make_unique<httplib::Server>()) {
  use_matching_llm();

  server_->Post("/stt", [this](const httplib::Request&, httplib::Response& res) {
    ++stt_calls_;
    if (const int ms = delay_ms_.load(); ms > 0) {
      std::this_thread::sleep_for(std::chrono::milliseconds(ms));
    }
    std::lock_guard lock(mutex_);
    res.status = stt_status_;
    res.set_content(Json{{"text", transcript_}}.dump(), "application/json");
  });

  server_->Post("/llm", [this](const httplib::Request& req, httplib::Response& res) {
    ++llm_calls_;
    if (const int ms = delay_ms_.load(); ms > 0) {
      std::this_thread::sleep_for(std::chrono::milliseconds(ms));
    }
    const Json body = Json::parse(req.body, nullptr, false);
    std::string text;
    std::vector<std::string> labels;
    if (body.is_object()) {
      if (body.contains("text") && body["text"].is_string()) text = body["text"];
      if (body.contains("labels") && body["labels"].is_array()) {
        for (const auto& l : body["labels"]) {
          if (l.is_string()) labels.push_back(l.get<std::string>());
        }
      }
    }
    LlmResponder responder;
    {
      std::lock_guard lock(mutex_);
      responder = llm_;
    }
    const Reply reply = responder(text, labels);
    res.status = reply.status;
    res.set_content(reply.body, "application/json");
  });
}

StubBackend::~StubBackend() { stop(); }

void StubBackend::start(int port, const std::string& host) {
  host_ = host;
  if (port == 0) {
    port_ = server_->bind_to_any_port(host);
  } else {
    port_ = server_->bind_to_port(host, port) ? port : -1;
  }
  if (port_ <= 0) {
    throw std::runtime_error("stub backend could not bind to " + host);
  }
  thread_ = std::thread([this] { server_->listen_after_bind(); });
  server_->wait_until_ready();
}

void StubBackend::stop() {
  if (thread_.joinable()) {
    server_->stop();
    thread_.join();
  }
}

std::string StubBackend::stt_url() const {
  return "http://" + host_ + ":" + std::to_string(port_) + "/stt";
}

std::string StubBackend::llm_url() const {
  return "http://" + host_ + ":" + std::to_string(port_) + "/llm";
}

void StubBackend::set_transcript(std::string text) {
  std::lock_guard lock(mutex_);
  transcript_ = std::move(text);
}

void StubBackend::set_stt_status(int status) {
  std::lock_guard lock(mutex_);
  stt_status_ = status;
}

void StubBackend::set_llm_responder(LlmResponder responder) {
  std::lock_guard lock(mutex_);
  llm_ = std::move(responder);
}

void StubBackend::set_llm_reply(int status, std::string body) {
  set_llm_responder([status, body = std::move(body)](const std::string&,
                                                    const std::vector<std::string>&) {
    return Reply{status, body};
  });
}

void StubBackend::use_matching_llm() {
  set_llm_responder([](const std::string& text, const std::vector<std::string>& labels) {
    const IntentResult r = extract_labels_fallback(text, labels);
    return Reply{200, Json{{"labels", r.labels}}.dump()};
  });
}

void StubBackend::reset_counters() {
  stt_calls_ = 0;
  llm_calls_ = 0;
}

}  // namespace pointspeak
