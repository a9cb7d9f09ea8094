// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any failure.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "pointspeak/bridge/frame.hpp"
#include "pointspeak/bridge/simulator.hpp"
#include "pointspeak/clustering.hpp"
#include "pointspeak/fusion.hpp"
#include "pointspeak/intent.hpp"
#include "pointspeak/service/replay.hpp"
#include "pointspeak/service/session.hpp"
#include "pointspeak/stub_backend.hpp"
#include "pointspeak/text.hpp"
#include "pointspeak/vad.hpp"
#include "pointspeak/world_store.hpp"
#include "support/test_support.hpp"

using namespace pointspeak;
namespace pt = pointspeak::testing;
using Ms = std::chrono::duration<double, std::milli>;

namespace {

struct CheckFailed : std::runtime_error {
  using std::runtime_error::runtime_error;
};

template <typename... Args>
void require(bool ok, fmt::format_string<Args...> f, Args&&... args) {
  if (!ok) throw CheckFailed(fmt::format(f, std::forward<Args>(args)...));
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  return v[v.size() / 2];
}

// ---- clustering ----------------------------------------------------------------

std::vector<PointerSample> random_walk(std::mt19937_64& rng, int n, double step) {
  std::uniform_real_distribution<double> s(-step, step);
  std::vector<PointerSample> pts;
  Vec3 p{};
  for (int i = 0; i < n; ++i) {
    p = {p.x + s(rng), p.y + s(rng), 0};
    pts.push_back({0.1 * i, p});
  }
  return pts;
}

std::string clustering_oracle() {
  std::mt19937_64 rng(1001);
  std::uniform_real_distribution<double> d(0.05, 0.5), step(0.05, 0.6);
  std::uniform_int_distribution<int> len(0, 1000);
  std::size_t clusters_seen = 0;
  for (int seq = 0; seq < 1000; ++seq) {
    const double d_th = d(rng);
    const auto pts = random_walk(rng, len(rng), step(rng));
    const auto got = sequential_cluster(pts, ClusterParams{d_th});
    const auto ref = pt::ref_sequential_cluster(pts, d_th);
    require(got.size() == ref.size(), "sequence {}: {} clusters, oracle {}", seq, got.size(), ref.size());
    for (std::size_t i = 0; i < got.size(); ++i) {
      require(got[i].size == ref[i].n && got[i].centroid.x == ref[i].cx && got[i].centroid.y == ref[i].cy &&
                  got[i].centroid.z == ref[i].cz && got[i].t_first == ref[i].t_first &&
                  got[i].t_last == ref[i].t_last,
              "sequence {} cluster {} differs from oracle", seq, i);
    }
    clusters_seen += got.size();
  }

  auto big = random_walk(rng, 10000, 0.2);
  std::vector<double> ms;
  for (int run = 0; run < 7; ++run) {
    const auto t0 = std::chrono::steady_clock::now();
    const auto cs = sequential_cluster(big, ClusterParams{0.15});
    ms.push_back(Ms(std::chrono::steady_clock::now() - t0).count());
    require(!cs.empty(), "no clusters for 10k points");
  }
  const double med = median(ms);
  require(med < 20.0, "10k points took {:.3f} ms", med);
  return fmt::format("1000 sequences, {} clusters; 10k points in {:.3f} ms", clusters_seen, med);
}

// ---- pose law ------------------------------------------------------------------

std::string pose_law() {
  std::mt19937_64 rng(2002);
  std::uniform_real_distribution<double> u(-8, 8);
  std::uniform_int_distribution<int> sz(1, 6), cnt(1, 9);
  for (int run = 0; run < 1000; ++run) {
    const int m = cnt(rng);
    const int n = std::uniform_int_distribution<int>(1, m)(rng);
    std::vector<Cluster> cs;
    double t = 0;
    for (int i = 0; i < m; ++i) {
      t += 0.3;
      cs.push_back({{u(rng), u(rng), 0}, static_cast<std::size_t>(sz(rng)), t, t + 0.1});
    }
    std::shuffle(cs.begin(), cs.end(), rng);
    WorldStore store;
    std::vector<std::string> names;
    std::vector<Vec3> locs;
    for (int i = 0; i < n; ++i) {
      names.push_back(fmt::format("Object {}", i));
      locs.push_back({u(rng), u(rng), 0});
      store.upsert_label(names.back(), locs.back());
    }
    const auto poses = calculate_poses(names, cs, store);
    const auto ref = pt::brute_force_poses(cs, locs);
    require(poses.size() == static_cast<std::size_t>(n), "fixture {}: {} poses for {} labels", run,
            poses.size(), n);
    require(ref.size() == poses.size(), "fixture {}: oracle found {} poses", run, ref.size());
    for (int i = 0; i < n; ++i) {
      const Vec3& c = poses[i].position;
      const double yaw = quat_to_yaw(poses[i].rotation);
      const double want = std::atan2(locs[i].y - c.y, locs[i].x - c.x);
      require(std::abs(wrap_angle(yaw - want)) <= 1e-9, "fixture {} pose {}: yaw {} vs {}", run, i, yaw, want);
      require(c.x == ref[i].x && c.y == ref[i].y, "fixture {} pose {}: pairing differs from oracle", run, i);
    }
  }
  return "1000 fixtures";
}

// ---- fusion dispatch ---------------------------------------------------------------

struct FusionRig {
  StubBackend stub;
  std::unique_ptr<HttpVoiceAnalyzer> voice;
  WorldStore store{seeded_guid_generator(5)};
  std::unique_ptr<FusionEngine> engine;

  FusionRig() {
    stub.start();
    BackendConfig cfg;
    cfg.stt_url = stub.stt_url();
    cfg.llm_url = stub.llm_url();
    cfg.timeout = 2.0;
    voice = std::make_unique<HttpVoiceAnalyzer>(cfg);
    for (const auto& l : pt::study_labels()) store.upsert_label(l.name, {l.x, l.y, 0});
    engine = std::make_unique<FusionEngine>(store, *voice);
  }

  static CaptureWindow window(const std::string& text, const std::vector<Vec3>& spots) {
    CaptureWindow w;
    w.pointer = pt::dwell_samples(spots, 5, 1.0);
    const double end = w.pointer.empty() ? 2.0 : w.pointer.back().t + 0.05;
    w.utterance = Utterance::from_text(0.9, end, text);
    return w;
  }
};

int llm_calls_for(FusionRig& rig, const std::function<FusionOutcome()>& f) {
  rig.stub.reset_counters();
  f();
  return rig.stub.llm_calls();
}

std::string fusion_dispatch() {
  FusionRig rig;
  auto& e = *rig.engine;
  const MRBeacon b = rig.store.add_beacon(make_pose({2, 2, 0}, 0.5));
  const auto here = FusionRig::window("here facing the chair", {{2, 2, 0}});

  e.set_mode(Mode::Go);
  int n = llm_calls_for(rig, [&] { return e.analyze(FusionRig::window("go", {{2, 2, 0}})); });
  require(n == 0, "Go called the model {} times", n);
  n = llm_calls_for(rig, [&] { return e.analyze(here); });
  require(n == 0, "Go with label words called the model {} times", n);

  e.set_mode(Mode::EditSelecting);
  n = llm_calls_for(rig, [&] { return e.take_beacon(FusionRig::window("take", {{2, 2, 0}})); });
  require(n == 0, "EditSelecting called the model {} times", n);
  require(e.mode() == Mode::EditPlacing, "take did not enter EditPlacing");
  FusionOutcome moved;
  n = llm_calls_for(rig, [&] { return moved = e.analyze(FusionRig::window("here facing the television", {{1, 0, 0}})); });
  require(n == 1, "EditPlacing called the model {} times", n);
  require(std::holds_alternative<BeaconMoved>(moved), "EditPlacing gave {}", outcome_type(moved));

  e.set_mode(Mode::Delete);
  n = llm_calls_for(rig, [&] { return e.analyze(FusionRig::window("delete", {{1, 0, 0}})); });
  require(n == 0, "Delete called the model {} times", n);
  require(rig.store.find_beacon(b.id) == std::nullopt, "Delete left the beacon");

  e.set_mode(Mode::Add);
  for (int i = 0; i < 5; ++i) {
    n = llm_calls_for(rig, [&] { return e.analyze(here); });
    require(n == 1, "Add capture {} called the model {} times", i, n);
  }

  // Every reject code from a constructed fixture.
  rig.store.restore({rig.store.labels(), {}, kStoreSchemaVersion, rig.store.revision()});
  auto reason = [&](const FusionOutcome& o) {
    require(std::holds_alternative<Rejected>(o), "expected Rejected, got {}", outcome_type(o));
    return std::get<Rejected>(o).reason;
  };
  std::vector<std::string> produced;
  auto expect = [&](RejectReason want, const FusionOutcome& o) {
    const RejectReason got = reason(o);
    require(got == want, "wanted {}, got {}", to_string(want), to_string(got));
    produced.push_back(to_string(got));
  };
  e.set_mode(Mode::Add);
  expect(RejectReason::NoPointerData, e.analyze(FusionRig::window("here facing the chair", {})));
  expect(RejectReason::NoLabels, e.analyze(FusionRig::window("put something here", {{0, 0, 0}})));
  expect(RejectReason::ClusterShortfall,
         e.analyze(FusionRig::window("facing the chair, the television and the flower pot", {{0, 0, 0}, {1, 1, 0}})));
  rig.stub.set_llm_reply(200, R"({"labels":["Unicorn"]})");
  expect(RejectReason::LabelNotFound, e.analyze(FusionRig::window("facing the unicorn", {{0, 0, 0}})));
  e.set_mode(Mode::Go);
  expect(RejectReason::NoBeaconHit, e.analyze(FusionRig::window("go", {{5, 5, 0}})));
  expect(RejectReason::KeywordMismatch, e.analyze(FusionRig::window("delete", {{5, 5, 0}})));
  require(rig.store.beacons().empty(), "rejections changed the store");
  return fmt::format("model calls 0/0/0 and 1/1; rejects: {}", fmt::join(produced, ", "));
}

// ---- degraded transcripts ------------------------------------------------------------

std::string degraded_transcript() {
  std::vector<std::string> known;
  for (const auto& l : pt::study_labels()) known.push_back(l.name);
  const auto tish = extract_labels_fallback("An object here facing a Tish box", known);
  require(tish.labels == std::vector<std::string>{"Tissue box"}, "Tish box gave [{}]", fmt::join(tish.labels, ", "));
  for (const auto& name : known) {
    for (const std::string& spelled : {name, canonical_name(name)}) {
      const auto r = extract_labels_fallback("Make an object here facing " + spelled, known);
      require(r.labels == std::vector<std::string>{name}, "prompt for '{}' gave [{}]", spelled,
              fmt::join(r.labels, ", "));
    }
  }
  return "Tish box -> Tissue box; 6 study objects";
}

// ---- multi-beacon replay -----------------------------------------------------------------

std::string multi_beacon_replay() {
  pt::TempDir dir;
  const std::vector<Vec3> spots{{1, 0, 0}, {0, 1.5, 0}, {-1, 0, 0}};
  pt::write_file(dir / "s.jsonl", pt::three_beacon_session(spots));
  const auto a = service::replay_log(service::read_session_log(dir / "s.jsonl"), service::AppConfig{},
                                     std::make_unique<HttpVoiceAnalyzer>(BackendConfig{}));
  const auto b = service::replay_log(service::read_session_log(dir / "s.jsonl"), service::AppConfig{},
                                     std::make_unique<HttpVoiceAnalyzer>(BackendConfig{}));
  require(a.report.beacon_count == 3, "{} beacons", a.report.beacon_count);
  require(a.final_store.beacons.size() == 3, "{} beacons in the store", a.final_store.beacons.size());
  require(a.report.action_count == 1, "action_count {}", a.report.action_count);
  const std::vector<Vec3> targets{{3, 3, 0}, {-3, 3, 0}, {-3, -3, 0}};
  for (std::size_t i = 0; i < 3; ++i) {
    const MRBeacon& bc = a.final_store.beacons[i];
    require(std::hypot(bc.location.x - spots[i].x, bc.location.y - spots[i].y) < 0.02, "beacon {} misplaced", i);
    const double want = std::atan2(targets[i].y - bc.location.y, targets[i].x - bc.location.x);
    require(std::abs(wrap_angle(quat_to_yaw(bc.rotation) - want)) <= 1e-9, "beacon {} faces the wrong label", i);
  }
  const std::string ra = service::dump_report(a.report, false);
  const std::string rb = service::dump_report(b.report, false);
  require(ra == rb, "reports differ between runs");
  require(a.final_store == b.final_store, "final stores differ between runs");
  const auto c = service::replay(dir / "s.jsonl", service::AppConfig{});
  require(service::dump_report(c, false) == ra, "file replay differs");
  return fmt::format("3 beacons from 1 action; report {} bytes identical", ra.size());
}

// ---- VAD -------------------------------------------------------------------------------

std::vector<AudioFrame> frames_from_rms(const std::vector<double>& rms, const VadConfig& cfg) {
  std::vector<AudioFrame> out;
  for (std::size_t i = 0; i < rms.size(); ++i) {
    out.push_back({pt::frame_with_rms(rms[i], cfg.frame_samples()), static_cast<double>(i) * cfg.frame_len});
  }
  return out;
}

std::string vad_events() {
  VadConfig cfg;
  std::mt19937_64 rng(3003);
  std::uniform_real_distribution<double> loud(0.15, 0.9), quiet(0.0, 0.08);
  std::uniform_int_distribution<int> burst(10, 150), gap(45, 200);

  // Known bursts: onset lands on the frame that completes the debounce,
  // silence on the frame that completes the hangover.
  std::size_t bursts = 0;
  for (int run = 0; run < 50; ++run) {
    std::vector<double> rms;
    std::vector<double> onsets, silences;
    for (int i = gap(rng); i > 0; --i) rms.push_back(quiet(rng));
    for (int k = 0; k < 4; ++k) {
      const std::size_t start = rms.size();
      for (int i = burst(rng); i > 0; --i) rms.push_back(loud(rng));
      const std::size_t end = rms.size();
      for (int i = gap(rng); i > 0; --i) rms.push_back(quiet(rng));
      onsets.push_back(static_cast<double>(start + cfg.onset_frames - 1) * cfg.frame_len);
      silences.push_back(static_cast<double>(end + cfg.silence_frames() - 1) * cfg.frame_len);
      ++bursts;
    }
    const auto ev = detect_events(frames_from_rms(rms, cfg), cfg);
    require(ev.size() == 2 * onsets.size(), "run {}: {} events for {} bursts", run, ev.size(), onsets.size());
    for (std::size_t k = 0; k < onsets.size(); ++k) {
      require(ev[2 * k].kind == VadEventKind::Onset && std::abs(ev[2 * k].t - onsets[k]) <= cfg.frame_len + 1e-9,
              "run {} burst {}: onset at {} expected {}", run, k, ev[2 * k].t, onsets[k]);
      require(ev[2 * k + 1].kind == VadEventKind::Silence &&
                  std::abs(ev[2 * k + 1].t - silences[k]) <= cfg.frame_len + 1e-9,
              "run {} burst {}: silence at {} expected {}", run, k, ev[2 * k + 1].t, silences[k]);
    }
  }

  std::bernoulli_distribution flip(0.15);
  std::uniform_real_distribution<double> any_loud(0.11, 0.9), any_quiet(0.0, 0.1);
  std::size_t fuzz_events = 0;
  for (int run = 0; run < 200; ++run) {
    std::vector<double> rms;
    bool on = false;
    for (int i = 0; i < 600; ++i) {
      if (flip(rng)) on = !on;
      rms.push_back(on ? any_loud(rng) : any_quiet(rng));
    }
    const auto ev = detect_events(frames_from_rms(rms, cfg), cfg);
    const auto ref = pt::ref_vad(rms, cfg.frame_len, cfg.threshold, cfg.onset_frames, cfg.silence_duration);
    require(ev.size() == ref.size(), "fuzz {}: {} events, oracle {}", run, ev.size(), ref.size());
    for (std::size_t i = 0; i < ev.size(); ++i) {
      require(ev[i].kind == (i % 2 == 0 ? VadEventKind::Onset : VadEventKind::Silence), "fuzz {}: no alternation",
              run);
      require((ev[i].kind == VadEventKind::Onset) == ref[i].onset && std::abs(ev[i].t - ref[i].t) <= cfg.frame_len,
              "fuzz {} event {} differs from oracle", run, i);
    }
    fuzz_events += ev.size();
  }
  return fmt::format("{} known bursts; 200 fuzzed streams, {} events", bursts, fuzz_events);
}

// ---- bridge codec and simulator ---------------------------------------------------------

bridge::BridgeFrame random_frame(std::mt19937_64& rng) {
  std::uniform_int_distribution<int> tl(1, 255), fields(0, 12), byte(0, 255), ch(0x20, 0x7e);
  std::uniform_real_distribution<double> num(-1e6, 1e6);
  bridge::BridgeFrame f;
  for (int i = tl(rng); i > 0; --i) f.topic.push_back(static_cast<char>(byte(rng)));
  Json j = Json::object();
  for (int i = fields(rng); i > 0; --i) {
    std::string key, val;
    for (int k = fields(rng) + 1; k > 0; --k) key.push_back(static_cast<char>(ch(rng)));
    for (int k = fields(rng) * 3; k > 0; --k) val.push_back(static_cast<char>(ch(rng)));
    j[key] = i % 2 ? Json(num(rng)) : Json(val);
  }
  f.payload = j.dump();
  return f;
}

std::string bridge_codec() {
  std::mt19937_64 rng(4004);
  for (int i = 0; i < 10000; ++i) {
    const auto f = random_frame(rng);
    require(bridge::decode_frame(bridge::encode_frame(f)) == f, "round trip {} failed", i);
  }

  std::uniform_int_distribution<int> len(0, 96), byte(0, 255);
  std::size_t rejected = 0;
  for (int i = 0; i < 20000; ++i) {
    std::vector<std::uint8_t> junk(static_cast<std::size_t>(len(rng)));
    for (auto& b : junk) b = static_cast<std::uint8_t>(byte(rng));
    try {
      bridge::decode_frame(junk);
    } catch (const bridge::IncompleteFrameError&) {
      ++rejected;
    } catch (const bridge::ProtocolError&) {
      ++rejected;
    }
    bridge::FrameDecoder d;
    try {
      d.feed(junk);
      while (d.next()) {
      }
    } catch (const bridge::ProtocolError&) {
    }
  }

  std::uniform_real_distribution<double> dist(0.1, 6.0), heading(-kPi, kPi);
  for (int i = 0; i < 100; ++i) {
    const double d = dist(rng), yaw = heading(rng);
    bridge::RobotSimulator sim(bridge::SimConfig{},
                               bridge::RobotState{make_pose({0, 0, 0}, yaw), 0, 0, bridge::NavStatus::Idle});
    const Pose goal = make_pose({d * std::cos(yaw), d * std::sin(yaw), 0}, yaw);
    sim.submit({goal, fmt::format("line#{}", i)});
    const double tick = sim.config().tick;
    double t = 0;
    while (sim.state().status != bridge::NavStatus::Arrived && t < 60) {
      sim.tick();
      t += tick;
    }
    const double expected = d / sim.config().max_linear;
    require(std::abs(t - expected) <= tick + 1e-9, "line {}: arrived at {:.3f} s, closed form {:.3f} s", i, t,
            expected);
    const Pose& p = sim.state().pose;
    require(std::hypot(p.position.x - goal.position.x, p.position.y - goal.position.y) <= 0.02,
            "line {}: position off", i);
    require(std::abs(wrap_angle(quat_to_yaw(p.rotation) - yaw)) <= kPi / 180, "line {}: yaw off", i);
  }
  return fmt::format("10000 round trips; 20000 fuzz inputs ({} rejected cleanly); 100 straight lines", rejected);
}

// ---- persistence ---------------------------------------------------------------------

StoreSnapshot random_store(std::uint64_t seed, int labels, int beacons) {
  WorldStore s(seeded_guid_generator(seed));
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-50, 50), ang(-kPi, kPi);
  for (int i = 0; i < labels; ++i) s.upsert_label(fmt::format("object {} ü", i), {u(rng), u(rng), u(rng) / 10});
  for (int i = 0; i < beacons; ++i) s.add_beacon(make_pose({u(rng), u(rng), 0}, ang(rng)));
  return s.snapshot();
}

std::string persistence() {
  pt::TempDir dir;
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const StoreSnapshot snap = random_store(seed, 60 + static_cast<int>(seed) * 7, 60);
    WorldStore a;
    a.restore(snap);
    a.save(dir / "l.jsonl", dir / "b.jsonl");
    WorldStore b;
    b.load(dir / "l.jsonl", dir / "b.jsonl");
    require(b.snapshot() == snap, "seed {}: round trip differs", seed);
  }

  WorldStore target;
  target.restore(random_store(99, 4, 4));
  const StoreSnapshot before = target.snapshot();
  std::size_t cuts = 0;
  for (const char* file : {"l.jsonl", "b.jsonl"}) {
    const std::string full = pt::read_file(dir / file);
    std::mt19937_64 rng(5005);
    std::uniform_int_distribution<std::size_t> at(1, full.size() - 2);
    std::vector<std::size_t> points{full.size() / 2, full.rfind('\n', full.size() - 2) + 1};
    for (int i = 0; i < 20; ++i) points.push_back(at(rng));
    for (std::size_t cut : points) {
      pt::TempDir copy;
      std::filesystem::copy_file(dir / "l.jsonl", copy / "l.jsonl");
      std::filesystem::copy_file(dir / "b.jsonl", copy / "b.jsonl");
      pt::write_file(copy / file, full.substr(0, cut));
      bool threw = false;
      try {
        target.load(copy / "l.jsonl", copy / "b.jsonl");
      } catch (const SchemaError&) {
        threw = true;
      }
      require(threw, "{} cut at {} loaded without error", file, cut);
      require(target.snapshot() == before, "{} cut at {} modified the store", file, cut);
      ++cuts;
    }
  }
  return fmt::format("10 stores of 127-190 entities; {} truncations refused", cuts);
}

// ---- end-to-end latency -----------------------------------------------------------------

std::string pipeline_latency() {
  StubBackend stub;
  stub.start();
  stub.set_delay_ms(0);
  BackendConfig bc;
  bc.llm_url = stub.llm_url();
  bc.stt_url = stub.stt_url();
  pt::TempDir dir;
  service::SessionOptions opts;
  opts.labels_path = dir / "labels.jsonl";
  opts.beacons_path = dir / "beacons.jsonl";
  opts.log_path = dir / "session.jsonl";
  service::Session session(opts, std::make_unique<HttpVoiceAnalyzer>(bc), std::make_shared<SteadyClock>());
  for (const auto& l : pt::study_labels()) session.upsert_label(l.name, {l.x, l.y, 0});
  session.set_mode(Mode::Add);

  std::chrono::steady_clock::time_point outcome_at;
  session.subscribe([&](const service::SessionEvent& e) {
    if (e.kind == service::EventKind::Outcome) outcome_at = std::chrono::steady_clock::now();
  });

  std::vector<double> ms;
  for (int i = 0; i < 30; ++i) {
    const double x = -2.0 + 0.1 * i;
    Json pointer = Json::array();
    for (const auto& s : pt::dwell_samples({{x, 0.5, 0}}, 50, 0.0)) pointer.push_back(Json::array({s.t, s.p.x, s.p.y}));
    const Json body{{"text", "make an object here facing the chair"}, {"pointer", pointer}};
    stub.reset_counters();
    const auto received = std::chrono::steady_clock::now();
    const auto r = session.capture(service::CaptureRequest::from_json(body));
    require(std::holds_alternative<BeaconsCreated>(r.outcome), "capture {} gave {}", i, outcome_type(r.outcome));
    require(stub.llm_calls() == 1, "capture {} made {} model calls", i, stub.llm_calls());
    ms.push_back(Ms(outcome_at - received).count());
  }
  const double worst = *std::max_element(ms.begin(), ms.end());
  require(worst < 100.0, "slowest capture took {:.2f} ms", worst);
  return fmt::format("30 captures of 50 samples: median {:.2f} ms, max {:.2f} ms", median(ms), worst);
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<std::string()>>> criteria{
      {"clustering oracle equivalence", clustering_oracle},
      {"pose calculation law", pose_law},
      {"fusion dispatch", fusion_dispatch},
      {"degraded transcript recovery", degraded_transcript},
      {"multi-beacon single utterance replay", multi_beacon_replay},
      {"vad event correctness", vad_events},
      {"bridge codec and simulator", bridge_codec},
      {"persistence", persistence},
      {"end-to-end latency budget", pipeline_latency},
  };
  int failed = 0;
  for (const auto& [name, check] : criteria) {
    const auto t0 = std::chrono::steady_clock::now();
    std::string line;
    bool ok = false;
    try {
      line = check();
      ok = true;
    } catch (const std::exception& e) {
      line = e.what();
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::printf("[%s] %s: %s (%.2f s)\n", ok ? "PASS" : "FAIL", name.c_str(), line.c_str(), secs);
    std::fflush(stdout);
    if (!ok) ++failed;
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
