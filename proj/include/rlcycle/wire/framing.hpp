#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace rlcycle::wire {

// Frames larger than this are treated as stream corruption.
inline constexpr std::uint32_t kMaxFrameBytes = 256u * 1024u * 1024u;

class FrameTooLarge : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// 4-byte big-endian length followed by the payload bytes.
std::string frame(std::string_view payload);

enum class DeframeStatus { kOk, kIncomplete, kTooLarge };

struct DeframeResult {
  DeframeStatus status = DeframeStatus::kIncomplete;
  std::string payload;
  std::size_t consumed = 0;  // bytes of `stream` used by the frame
};

// Decodes the first frame in `stream`.
DeframeResult deframe(std::string_view stream);

// Incremental decoder for a byte stream.
class FrameReader {
 public:
  void feed(std::string_view bytes) { buffer_.append(bytes); }
  // Next complete payload, nullopt if more bytes are needed. Throws
  // FrameTooLarge on an oversized length prefix.
  std::optional<std::string> next();
  std::size_t buffered() const { return buffer_.size() - offset_; }

 private:
  std::string buffer_;
  std::size_t offset_ = 0;
};

}  // namespace rlcycle::wire
