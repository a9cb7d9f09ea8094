#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "pointspeak/vad.hpp"
#include "pointspeak/wav.hpp"
#include "support/test_support.hpp"

using namespace pointspeak;
namespace pt = pointspeak::testing;

namespace {

std::vector<AudioFrame> frames_from_rms(const std::vector<double>& rms, const VadConfig& cfg) {
  std::vector<AudioFrame> out;
  for (std::size_t i = 0; i < rms.size(); ++i) {
    out.push_back({pt::frame_with_rms(rms[i], cfg.frame_samples()), static_cast<double>(i) * cfg.frame_len});
  }
  return out;
}

}  // namespace

TEST(FrameRms, Examples) {
  EXPECT_EQ(frame_rms({std::vector<float>(320, 0.0f), 0.0}), 0.0);
  EXPECT_NEAR(frame_rms({std::vector<float>(320, 0.5f), 0.0}), 0.5, 1e-7);
  EXPECT_NEAR(frame_rms({pt::frame_with_rms(0.3, 320), 0.0}), 0.3, 1e-7);
}

TEST(Vad, ContinuousSilenceHasNoEvents) {
  VadConfig cfg;
  EXPECT_TRUE(detect_events(frames_from_rms(std::vector<double>(200, 0.01), cfg), cfg).empty());
}

TEST(Vad, OnsetAfterOneSecondOfSilence) {
  VadConfig cfg;
  std::vector<double> rms(50, 0.01);
  rms.resize(150, 0.5);
  const auto ev = detect_events(frames_from_rms(rms, cfg), cfg);
  ASSERT_EQ(ev.size(), 1u);
  EXPECT_EQ(ev[0].kind, VadEventKind::Onset);
  EXPECT_NEAR(ev[0].t, 1.04, cfg.frame_len);
}

TEST(Vad, SingleLoudFrameIsDebounced) {
  VadConfig cfg;
  std::vector<double> rms(100, 0.01);
  rms[40] = 0.9;
  EXPECT_TRUE(detect_events(frames_from_rms(rms, cfg), cfg).empty());
}

TEST(Vad, SilenceAfterHangover) {
  VadConfig cfg;
  std::vector<double> rms(10, 0.0);
  rms.resize(60, 0.5);
  rms.resize(150, 0.0);
  const auto ev = detect_events(frames_from_rms(rms, cfg), cfg);
  const auto ref = pt::ref_vad(rms, cfg.frame_len, cfg.threshold, cfg.onset_frames, cfg.silence_duration);
  ASSERT_EQ(ev.size(), 2u);
  ASSERT_EQ(ref.size(), 2u);
  EXPECT_EQ(ev[1].kind, VadEventKind::Silence);
  EXPECT_NEAR(ev[0].t, ref[0].t, 1e-9);
  EXPECT_NEAR(ev[1].t, ref[1].t, 1e-9);
  // 40 quiet frames from t=1.2 s; the 40th starts at 1.98 s.
  EXPECT_NEAR(ev[1].t, 1.98, cfg.frame_len);
}

TEST(Vad, FuzzedStreamsAlternateAndMatchOracle) {
  VadConfig cfg;
  std::mt19937_64 rng(3);
  std::bernoulli_distribution flip(0.15);
  std::uniform_real_distribution<double> loud(0.11, 0.9), quiet(0.0, 0.1);
  for (int run = 0; run < 100; ++run) {
    std::vector<double> rms;
    bool on = false;
    for (int i = 0; i < 500; ++i) {
      if (flip(rng)) on = !on;
      rms.push_back(on ? loud(rng) : quiet(rng));
    }
    const auto ev = detect_events(frames_from_rms(rms, cfg), cfg);
    const auto ref = pt::ref_vad(rms, cfg.frame_len, cfg.threshold, cfg.onset_frames, cfg.silence_duration);
    ASSERT_EQ(ev.size(), ref.size());
    for (std::size_t i = 0; i < ev.size(); ++i) {
      ASSERT_EQ(ev[i].kind, i % 2 == 0 ? VadEventKind::Onset : VadEventKind::Silence);
      ASSERT_EQ(ev[i].kind == VadEventKind::Onset, ref[i].onset);
      ASSERT_NEAR(ev[i].t, ref[i].t, 1e-9);
    }
  }
}

TEST(Vad, RaisingThresholdNeverAddsOnsets) {
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> u(0.0, 0.6);
  std::vector<double> rms;
  for (int i = 0; i < 600; ++i) rms.push_back(u(rng) * (i / 50 % 2));
  std::size_t prev = SIZE_MAX;
  for (double th : {0.05, 0.1, 0.2, 0.3, 0.5}) {
    VadConfig cfg;
    cfg.threshold = th;
    const auto ev = detect_events(frames_from_rms(rms, cfg), cfg);
    const auto onsets = static_cast<std::size_t>(
        std::count_if(ev.begin(), ev.end(), [](const VadEvent& e) { return e.kind == VadEventKind::Onset; }));
    EXPECT_LE(onsets, prev);
    prev = onsets;
  }
}

TEST(Vad, RejectsMalformedFrames) {
  VadConfig cfg;
  VoiceActivityDetector vad(cfg);
  EXPECT_THROW(vad.step({std::vector<float>(10, 0.0f), 0.0}), std::invalid_argument);
  EXPECT_THROW(vad.step({std::vector<float>(320, 1.5f), 0.0}), std::invalid_argument);
  vad.step({std::vector<float>(320, 0.0f), 1.0});
  EXPECT_THROW(vad.step({std::vector<float>(320, 0.0f), 1.0}), std::invalid_argument);
}

TEST(Calibrate, Floor) {
  VadConfig cfg;
  EXPECT_EQ(calibrate(frames_from_rms(std::vector<double>(50, 0.0), cfg), cfg), kCalibrationFloor);
}

TEST(Calibrate, ConstantAmbient) {
  VadConfig cfg;
  EXPECT_NEAR(calibrate(frames_from_rms(std::vector<double>(50, 0.02), cfg), cfg), 0.02, 1e-7);
}

TEST(Calibrate, ThreeLevels) {
  std::vector<double> rms;
  for (int i = 0; i < 60; ++i) rms.push_back(0.01 * (1 + i % 3));
  // population std of {0.01, 0.02, 0.03} = sqrt(2/3) * 0.01
  const double expected = 0.02 + 4.0 * std::sqrt(2.0 / 3.0) * 0.01;
  EXPECT_NEAR(calibrate_from_rms(rms, 0.02), expected, 1e-12);
  VadConfig cfg;
  EXPECT_NEAR(calibrate(frames_from_rms(rms, cfg), cfg), expected, 1e-6);
}

TEST(Calibrate, NeedsOneSecond) {
  EXPECT_THROW(calibrate_from_rms(std::vector<double>(10, 0.01), 0.02), std::invalid_argument);
}

TEST(MakeFrames, DropsPartialFrame) {
  VadConfig cfg;
  const auto f = make_frames(std::vector<float>(320 * 3 + 100, 0.0f), cfg, 2.0);
  ASSERT_EQ(f.size(), 3u);
  EXPECT_NEAR(f[2].t, 2.04, 1e-12);
}

TEST(Wav, RoundTrip) {
  PcmAudio a;
  a.sample_rate = 16000;
  for (int i = 0; i < 1600; ++i) a.samples.push_back(static_cast<float>(std::sin(i * 0.05) * 0.5));
  const auto bytes = encode_wav_pcm16(a);
  EXPECT_EQ(bytes.size(), 44u + 2 * 1600);
  const PcmAudio b = decode_wav_pcm16(bytes);
  EXPECT_EQ(b.sample_rate, 16000);
  ASSERT_EQ(b.samples.size(), a.samples.size());
  for (std::size_t i = 0; i < a.samples.size(); ++i) EXPECT_NEAR(a.samples[i], b.samples[i], 1.0 / 32767);
}

TEST(Wav, RejectsGarbage) {
  const std::vector<std::uint8_t> junk{'R', 'I', 'F', 'F', 0, 0};
  EXPECT_THROW(decode_wav_pcm16(junk), WavError);
}
