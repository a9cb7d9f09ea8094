#include "pointspeak/bridge/frame.hpp"

#include "json.hpp"

namespace pointspeak::bridge {
namespace {

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

std::uint32_t get_u32(std::span<const std::uint8_t> b, std::size_t at) {
  return static_cast<std::uint32_t>(b[at]) | (static_cast<std::uint32_t>(b[at + 1]) << 8) |
         (static_cast<std::uint32_t>(b[at + 2]) << 16) |
         (static_cast<std::uint32_t>(b[at + 3]) << 24);
}

void check_topic(std::size_t len) {
  if (len == 0 || len > kMaxTopicLen) {
    throw ProtocolError("topic length " + std::to_string(len) + " outside 1..255");
  }
}

void check_payload(const std::string& payload) {
  if (payload.size() > kMaxPayloadLen) throw ProtocolError("payload too large");
  // accept() rejects invalid UTF-8 inside strings as well as bad syntax.
  if (!nlohmann::json::accept(payload)) throw ProtocolError("payload is not valid JSON");
}

// Parses one frame at the start of `b`. Returns the frame and its encoded
// length, or nullopt when more bytes are needed.
std::optional<std::pair<BridgeFrame, std::size_t>> parse_one(std::span<const std::uint8_t> b) {
  if (b.size() < 4) return std::nullopt;
  const std::size_t topic_len = get_u32(b, 0);
  check_topic(topic_len);
  if (b.size() < 4 + topic_len + 4) return std::nullopt;
  const std::size_t payload_len = get_u32(b, 4 + topic_len);
  if (payload_len > kMaxPayloadLen) throw ProtocolError("payload too large");
  const std::size_t total = 8 + topic_len + payload_len;
  if (b.size() < total) return std::nullopt;

  BridgeFrame f;
  f.topic.assign(reinterpret_cast<const char*>(b.data() + 4), topic_len);
  f.payload.assign(reinterpret_cast<const char*>(b.data() + 8 + topic_len), payload_len);
  check_payload(f.payload);
  return std::make_pair(std::move(f), total);
}

}  // namespace

std::vector<std::uint8_t> encode_frame(const BridgeFrame& f) {
  check_topic(f.topic.size());
  check_payload(f.payload);
  std::vector<std::uint8_t> out;
  out.reserve(8 + f.topic.size() + f.payload.size());
  put_u32(out, static_cast<std::uint32_t>(f.topic.size()));
  out.insert(out.end(), f.topic.begin(), f.topic.end());
  put_u32(out, static_cast<std::uint32_t>(f.payload.size()));
  out.insert(out.end(), f.payload.begin(), f.payload.end());
  return out;
}

BridgeFrame decode_frame(std::span<const std::uint8_t> bytes) {
  auto parsed = parse_one(bytes);
  if (!parsed) throw IncompleteFrameError("incomplete frame");
  if (parsed->second != bytes.size()) throw ProtocolError("trailing bytes after frame");
  return std::move(parsed->first);
}

void FrameDecoder::feed(std::span<const std::uint8_t> bytes) {
  if (pos_ > 0 && pos_ == buf_.size()) {
    buf_.clear();
    pos_ = 0;
  }
  buf_.insert(buf_.end(), bytes.begin(), bytes.end());
}

std::optional<BridgeFrame> FrameDecoder::next() {
  auto parsed = parse_one(std::span<const std::uint8_t>(buf_).subspan(pos_));
  if (!parsed) {
    if (pos_ > 0) {
      buf_.erase(buf_.begin(), buf_.begin() + static_cast<std::ptrdiff_t>(pos_));
      pos_ = 0;
    }
    return std::nullopt;
  }
  pos_ += parsed->second;
  return std::move(parsed->first);
}

}  // namespace pointspeak::bridge
