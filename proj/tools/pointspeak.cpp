#include <atomic>
#include <chrono>
#include <csignal>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <random>
#include <thread>

#include <fmt/format.h>

#include "CLI11.hpp"
#include "pointspeak/bridge/endpoints.hpp"
#include "pointspeak/clustering.hpp"
#include "pointspeak/service/config.hpp"
#include "pointspeak/service/replay.hpp"
#include "pointspeak/service/runtime.hpp"
#include "pointspeak/stub_backend.hpp"
#include "pointspeak/vad.hpp"
#include "pointspeak/wav.hpp"

namespace {

std::atomic<bool> g_stop{false};

void on_signal(int) { g_stop = true; }

void wait_for_signal() {
  std::signal(SIGINT, on_signal);
  std::signal(SIGTERM, on_signal);
  while (!g_stop) std::this_thread::sleep_for(std::chrono::milliseconds(100));
}

pointspeak::service::AppConfig load(const std::string& path) {
  using namespace pointspeak::service;
  AppConfig cfg = path.empty() ? AppConfig{} : load_config(path);
  apply_env_overrides(cfg, process_env());
  cfg.validate();
  return cfg;
}

int run_serve(const std::string& config_path) {
  using namespace pointspeak::service;
  ServiceRuntime rt(load(config_path));
  rt.start();
  std::cout << fmt::format("listening on http://{}:{}  (events: ws://{}:{}/events, bridge port {})\n",
                           "127.0.0.1", rt.http_port(), "127.0.0.1", rt.http_port(), rt.bridge_port())
            << std::flush;
  wait_for_signal();
  rt.stop();
  return 0;
}

int run_replay(const std::string& session, const std::string& gt, const std::string& config_path,
               bool timings, const std::string& out) {
  using namespace pointspeak::service;
  std::optional<std::filesystem::path> gt_path;
  if (!gt.empty()) gt_path = gt;
  const MetricsReport report = replay(session, load(config_path), gt_path);
  const std::string json = dump_report(report, timings);
  if (out.empty()) {
    std::cout << json << '\n';
  } else {
    std::ofstream f(out, std::ios::binary);
    f << json << '\n';
  }
  return 0;
}

// Dwell-shaped synthetic pointer stream: the pointer rests near a spot,
// then jumps elsewhere.
int run_bench(std::size_t points, double d_th, std::uint64_t seed, int repeats) {
  using namespace pointspeak;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> spot(-10.0, 10.0);
  std::normal_distribution<double> jitter(0.0, 0.02);
  std::uniform_int_distribution<int> dwell(5, 40);
  std::vector<PointerSample> samples;
  samples.reserve(points);
  Vec3 center{spot(rng), spot(rng), 0.0};
  int left = dwell(rng);
  for (std::size_t i = 0; i < points; ++i) {
    if (left-- == 0) {
      center = {spot(rng), spot(rng), 0.0};
      left = dwell(rng);
    }
    samples.push_back({0.1 * static_cast<double>(i),
                       Vec3{center.x + jitter(rng), center.y + jitter(rng), 0.0}});
  }
  double best = 1e9;
  std::size_t clusters = 0;
  for (int r = 0; r < repeats; ++r) {
    const auto t0 = std::chrono::steady_clock::now();
    clusters = sequential_cluster(samples, ClusterParams{d_th}).size();
    best = std::min(best, std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
  }
  std::cout << fmt::format(R"({{"points":{},"clusters":{},"d_th":{},"best_seconds":{:.6f},"repeats":{}}})",
                           points, clusters, d_th, best, repeats)
            << '\n';
  return 0;
}

int run_stub(int port, const std::string& transcript) {
  pointspeak::StubBackend stub;
  if (!transcript.empty()) stub.set_transcript(transcript);
  stub.start(port);
  std::cout << "stt: " << stub.stt_url() << "\nllm: " << stub.llm_url() << '\n' << std::flush;
  wait_for_signal();
  stub.stop();
  return 0;
}

int run_sim(const std::string& host, int port) {
  pointspeak::bridge::BridgeServer::Options o;
  o.host = host;
  o.port = port;
  pointspeak::bridge::BridgeServer server(o);
  server.start();
  std::cout << "robot bridge on " << host << ':' << server.port() << '\n' << std::flush;
  wait_for_signal();
  server.stop();
  return 0;
}

int run_vad(const std::string& wav, double threshold) {
  using namespace pointspeak;
  const PcmAudio audio = read_wav_file(wav);
  VadConfig cfg;
  cfg.sample_rate = audio.sample_rate;
  if (threshold > 0.0) cfg.threshold = threshold;
  const auto frames = make_frames(audio.samples, cfg);
  for (const VadEvent& e : detect_events(frames, cfg)) {
    std::cout << fmt::format("{:.3f} {}\n", e.t, to_string(e.kind));
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"pointspeak: voice + pointer beacon placement service"};
  app.require_subcommand(1);

  std::string config_path;
  auto* serve = app.add_subcommand("serve", "run the HTTP/WebSocket service");
  serve->add_option("--config", config_path, "JSON config file")->check(CLI::ExistingFile);

  std::string session, gt, replay_config, out;
  bool timings = false;
  auto* rep = app.add_subcommand("replay", "recompute metrics from a session log");
  rep->add_option("--session", session, "session log (JSON Lines)")->required()->check(CLI::ExistingFile);
  rep->add_option("--ground-truth", gt, "ground-truth beacon poses")->check(CLI::ExistingFile);
  rep->add_option("--config", replay_config, "JSON config file")->check(CLI::ExistingFile);
  rep->add_flag("--timings", timings, "include wall-clock stage timings");
  rep->add_option("--out", out, "write the report here instead of stdout");

  std::size_t points = 10000;
  double d_th = 0.15;
  std::uint64_t seed = 7;
  int repeats = 5;
  auto* bench = app.add_subcommand("bench-cluster", "time clustering on a synthetic pointer stream");
  bench->add_option("--points", points, "number of samples")->check(CLI::PositiveNumber);
  bench->add_option("--d-th", d_th, "distance threshold (m)")->check(CLI::PositiveNumber);
  bench->add_option("--seed", seed, "RNG seed");
  bench->add_option("--repeats", repeats, "timed runs; the best is reported")->check(CLI::PositiveNumber);

  int stub_port = 0;
  std::string transcript;
  auto* stub = app.add_subcommand("stub-backend", "serve canned STT/LLM endpoints");
  stub->add_option("--port", stub_port, "port (0 picks one)");
  stub->add_option("--transcript", transcript, "text returned by /stt");

  std::string sim_host = "127.0.0.1";
  int sim_port = pointspeak::bridge::kDefaultBridgePort;
  auto* sim = app.add_subcommand("sim-robot", "run the robot bridge simulator");
  sim->add_option("--host", sim_host, "bind address");
  sim->add_option("--port", sim_port, "port");

  std::string wav;
  double threshold = 0.0;
  auto* vad = app.add_subcommand("vad", "print VAD events for a PCM16 mono WAV file");
  vad->add_option("--wav", wav, "input file")->required()->check(CLI::ExistingFile);
  vad->add_option("--threshold", threshold, "RMS threshold (default from config defaults)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*serve) return run_serve(config_path);
    if (*rep) return run_replay(session, gt, replay_config, timings, out);
    if (*bench) return run_bench(points, d_th, seed, repeats);
    if (*stub) return run_stub(stub_port, transcript);
    if (*sim) return run_sim(sim_host, sim_port);
    if (*vad) return run_vad(wav, threshold);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
