#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <stdexcept>
#include <vector>

namespace pointspeak {

class WavError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct PcmAudio {
  int sample_rate = 16000;
  std::vector<float> samples;  // mono, normalized to [-1, 1]
};

// Decodes a RIFF/WAVE file holding 16-bit PCM mono audio.
PcmAudio decode_wav_pcm16(std::span<const std::uint8_t> bytes);
PcmAudio read_wav_file(const std::filesystem::path& path);

std::vector<std::uint8_t> encode_wav_pcm16(const PcmAudio& audio);

}  // namespace pointspeak
