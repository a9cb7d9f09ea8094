#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

namespace pointspeak {

struct AudioFrame {
  std::vector<float> samples;  // normalized to [-1, 1]
  double t = 0.0;              // frame start, seconds
};

struct VadConfig {
  double threshold = 0.1;  // RMS amplitude
  int sample_rate = 16000;
  double frame_len = 0.02;  // seconds
  int onset_frames = 3;
  double silence_duration = 0.8;  // seconds

  std::size_t frame_samples() const;
  // Number of consecutive quiet frames that make up silence_duration.
  int silence_frames() const;
  void validate() const;
};

enum class VadEventKind { Onset, Silence };

struct VadEvent {
  VadEventKind kind;
  double t = 0.0;

  friend bool operator==(const VadEvent&, const VadEvent&) = default;
};

const char* to_string(VadEventKind kind);

double frame_rms(const AudioFrame& frame);
double samples_rms(std::span<const float> samples);

// Energy-threshold detector with onset debounce and a silence hangover.
// Events are stamped with the start time of the frame that completes the
// condition. One instance per audio stream.
class VoiceActivityDetector {
 public:
  explicit VoiceActivityDetector(VadConfig cfg);

  // Throws std::invalid_argument for frames of the wrong length, amplitudes
  // outside [-1, 1], or frames that do not advance in time.
  std::optional<VadEvent> step(const AudioFrame& frame);

  bool speaking() const { return speaking_; }
  const VadConfig& config() const { return cfg_; }
  void set_threshold(double threshold);
  void reset();

 private:
  VadConfig cfg_;
  bool speaking_ = false;
  int loud_run_ = 0;
  int quiet_run_ = 0;
  std::optional<double> last_t_;
};

// Runs a fresh detector over a frame sequence.
std::vector<VadEvent> detect_events(std::span<const AudioFrame> frames, const VadConfig& cfg);

// Threshold from ambient audio: mean RMS + 4 * population std of RMS,
// floored at 0.005. Requires at least one second of audio.
double calibrate(std::span<const AudioFrame> ambient, const VadConfig& cfg);
double calibrate_from_rms(std::span<const double> rms, double frame_len);

inline constexpr double kCalibrationFloor = 0.005;

// Splits normalized samples into fixed frames; a trailing partial frame is dropped.
std::vector<AudioFrame> make_frames(std::span<const float> samples, const VadConfig& cfg,
                                    double t0 = 0.0);

}  // namespace pointspeak
