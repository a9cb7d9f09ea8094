#include "pointspeak/vad.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace pointspeak {

std::size_t VadConfig::frame_samples() const {
  return static_cast<std::size_t>(std::llround(frame_len * sample_rate));
}

int VadConfig::silence_frames() const {
  return std::max(1, static_cast<int>(std::ceil(silence_duration / frame_len - 1e-9)));
}

void VadConfig::validate() const {
  if (!(threshold >= 0.0) || !std::isfinite(threshold)) {
    throw std::invalid_argument("vad threshold must be >= 0");
  }
  if (sample_rate <= 0) throw std::invalid_argument("vad sample_rate must be > 0");
  if (!(frame_len > 0.0) || frame_samples() == 0) {
    throw std::invalid_argument("vad frame_len must cover at least one sample");
  }
  if (onset_frames < 1) throw std::invalid_argument("vad onset_frames must be >= 1");
  if (!(silence_duration > 0.0)) throw std::invalid_argument("vad silence_duration must be > 0");
}

const char* to_string(VadEventKind kind) {
  return kind == VadEventKind::Onset ? "Onset" : "Silence";
}

double samples_rms(std::span<const float> samples) {
  if (samples.empty()) {
    throw std::invalid_argument("cannot take the RMS of an empty frame");
  }
  double acc = 0.0;
  for (float s : samples) acc += static_cast<double>(s) * static_cast<double>(s);
  return std::sqrt(acc / static_cast<double>(samples.size()));
}

double frame_rms(const AudioFrame& frame) { return samples_rms(frame.samples); }

VoiceActivityDetector::VoiceActivityDetector(VadConfig cfg) : cfg_(cfg) { cfg_.validate(); }

void VoiceActivityDetector::set_threshold(double threshold) {
  VadConfig next = cfg_;
  next.threshold = threshold;
  next.validate();
  cfg_ = next;
}

void VoiceActivityDetector::reset() {
  speaking_ = false;
  loud_run_ = 0;
  quiet_run_ = 0;
  last_t_.reset();
}

std::optional<VadEvent> VoiceActivityDetector::step(const AudioFrame& frame) {
  if (frame.samples.size() != cfg_.frame_samples()) {
    throw std::invalid_argument("audio frame has the wrong length");
  }
  if (!std::isfinite(frame.t) || (last_t_ && frame.t <= *last_t_)) {
    throw std::invalid_argument("audio frames must be fed in time order");
  }
  for (float s : frame.samples) {
    if (!(s >= -1.0f && s <= 1.0f)) {
      throw std::invalid_argument("audio samples must lie in [-1, 1]");
    }
  }
  last_t_ = frame.t;

  const bool loud = frame_rms(frame) > cfg_.threshold;
  if (!speaking_) {
    loud_run_ = loud ? loud_run_ + 1 : 0;
    if (loud_run_ >= cfg_.onset_frames) {
      speaking_ = true;
      loud_run_ = 0;
      quiet_run_ = 0;
      return VadEvent{VadEventKind::Onset, frame.t};
    }
    return std::nullopt;
  }

  quiet_run_ = loud ? 0 : quiet_run_ + 1;
  if (quiet_run_ >= cfg_.silence_frames()) {
    speaking_ = false;
    quiet_run_ = 0;
    loud_run_ = 0;
    return VadEvent{VadEventKind::Silence, frame.t};
  }
  return std::nullopt;
}

std::vector<VadEvent> detect_events(std::span<const AudioFrame> frames, const VadConfig& cfg) {
  VoiceActivityDetector vad(cfg);
  std::vector<VadEvent> events;
  for (const AudioFrame& f : frames) {
    if (auto e = vad.step(f)) events.push_back(*e);
  }
  return events;
}

double calibrate_from_rms(std::span<const double> rms, double frame_len) {
  if (!(frame_len > 0.0)) throw std::invalid_argument("frame_len must be > 0");
  if (rms.empty() || static_cast<double>(rms.size()) * frame_len < 1.0 - 1e-9) {
    throw std::invalid_argument("calibration needs at least 1 s of ambient audio");
  }
  const double n = static_cast<double>(rms.size());
  const double mean = std::accumulate(rms.begin(), rms.end(), 0.0) / n;
  double var = 0.0;
  for (double r : rms) var += (r - mean) * (r - mean);
  const double stddev = std::sqrt(var / n);
  return std::max(mean + 4.0 * stddev, kCalibrationFloor);
}

double calibrate(std::span<const AudioFrame> ambient, const VadConfig& cfg) {
  std::vector<double> rms;
  rms.reserve(ambient.size());
  for (const AudioFrame& f : ambient) {
    if (f.samples.size() != cfg.frame_samples()) {
      throw std::invalid_argument("audio frame has the wrong length");
    }
    rms.push_back(frame_rms(f));
  }
  return calibrate_from_rms(rms, cfg.frame_len);
}

std::vector<AudioFrame> make_frames(std::span<const float> samples, const VadConfig& cfg,
                                    double t0) {
  cfg.validate();
  const std::size_t len = cfg.frame_samples();
  std::vector<AudioFrame> frames;
  frames.reserve(samples.size() / len);
  for (std::size_t i = 0; i + len <= samples.size(); i += len) {
    AudioFrame f;
    f.samples.assign(samples.begin() + static_cast<std::ptrdiff_t>(i),
                     samples.begin() + static_cast<std::ptrdiff_t>(i + len));
    f.t = t0 + static_cast<double>(i) / cfg.sample_rate;
    frames.push_back(std::move(f));
  }
  return frames;
}

}  // namespace pointspeak
