#pragma once

#include <atomic>
#include <functional>
#include <memory>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

namespace httplib {
class Server;
}

namespace pointspeak {

// Canned speech/language backend for tests and offline demos. Serves
// POST /stt and POST /llm on 127.0.0.1 and counts every request.
class StubBackend {
 public:
  struct Reply {
    int status = 200;
    std::string body;
  };
  // Receives the transcript and the known label names.
  using LlmResponder = std::function<Reply(const std::string& text,
                                           const std::vector<std::string>& labels)>;

  StubBackend();
  ~StubBackend();
  StubBackend(const StubBackend&) = delete;
  StubBackend& operator=(const StubBackend&) = delete;

  // Binds to `port` (0 picks a free one) and serves on a background thread.
  void start(int port = 0, const std::string& host = "127.0.0.1");
  void stop();

  int port() const { return port_; }
  std::string stt_url() const;
  std::string llm_url() const;

  void set_transcript(std::string text);
  void set_stt_status(int status);
  void set_llm_responder(LlmResponder responder);
  // Always answer with this status and body.
  void set_llm_reply(int status, std::string body);
  // The default responder: runs the local fallback matcher and answers
  // {"labels": [...]}.
  void use_matching_llm();
  void set_delay_ms(int ms) { delay_ms_ = ms; }

  int stt_calls() const { return stt_calls_.load(); }
  int llm_calls() const { return llm_calls_.load(); }
  void reset_counters();

 private:
  std::unique_ptr<httplib::Server> server_;
  std::thread thread_;
  std::string host_ = "127.0.0.1";
  int port_ = 0;

  mutable std::mutex mutex_;
  std::string transcript_;
  int stt_status_ = 200;
  LlmResponder llm_;

  std::atomic<int> delay_ms_{0};
  std::atomic<int> stt_calls_{0};
  std::atomic<int> llm_calls_{0};
};

}  // namespace pointspeak
