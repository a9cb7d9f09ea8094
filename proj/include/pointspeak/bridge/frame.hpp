#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace pointspeak::bridge {

// Wire layout, all lengths little-endian:
//   [u32 topic_len][topic bytes][u32 payload_len][payload bytes]
// topic_len is 1..255; payload is UTF-8 JSON.
struct BridgeFrame {
  std::string topic;
  std::string payload;

  friend bool operator==(const BridgeFrame&, const BridgeFrame&) = default;
};

inline constexpr std::size_t kMaxTopicLen = 255;
inline constexpr std::size_t kMaxPayloadLen = 16u << 20;

class IncompleteFrameError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ProtocolError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::vector<std::uint8_t> encode_frame(const BridgeFrame& f);

// Decodes exactly one frame occupying all of `bytes`. Throws
// IncompleteFrameError on a short buffer and ProtocolError on a bad header,
// invalid payload, or trailing bytes.
BridgeFrame decode_frame(std::span<const std::uint8_t> bytes);

// Incremental decoder for a byte stream.
class FrameDecoder {
 public:
  void feed(std::span<const std::uint8_t> bytes);
  // Next complete frame, if buffered. Throws ProtocolError; the decoder is
  // unusable afterwards.
  std::optional<BridgeFrame> next();
  std::size_t buffered() const { return buf_.size() - pos_; }

 private:
  std::vector<std::uint8_t> buf_;
  std::size_t pos_ = 0;
};

}  // namespace pointspeak::bridge
