#include "rlcycle/wire/framing.hpp"

namespace rlcycle::wire {

std::string frame(std::string_view payload) {
  if (payload.size() > kMaxFrameBytes) throw FrameTooLarge("payload exceeds frame limit");
  const auto n = static_cast<std::uint32_t>(payload.size());
  std::string out;
  out.reserve(4 + payload.size());
  out.push_back(static_cast<char>((n >> 24) & 0xff));
  out.push_back(static_cast<char>((n >> 16) & 0xff));
  out.push_back(static_cast<char>((n >> 8) & 0xff));
  out.push_back(static_cast<char>(n & 0xff));
  out.append(payload);
  return out;
}

DeframeResult deframe(std::string_view stream) {
  DeframeResult r;
  if (stream.size() < 4) return r;
  const auto b = [&](std::size_t i) {
    return static_cast<std::uint32_t>(static_cast<unsigned char>(stream[i]));
  };
  const std::uint32_t n = (b(0) << 24) | (b(1) << 16) | (b(2) << 8) | b(3);
  if (n > kMaxFrameBytes) {
    r.status = DeframeStatus::kTooLarge;
    return r;
  }
  if (stream.size() - 4 < n) return r;
  r.status = DeframeStatus::kOk;
  r.payload.assign(stream.substr(4, n));
  r.consumed = 4 + static_cast<std::size_t>(n);
  return r;
}

std::optional<std::string> FrameReader::next() {
  const std::string_view view(buffer_.data() + offset_, buffer_.size() - offset_);
  DeframeResult r = deframe(view);
  if (r.status == DeframeStatus::kTooLarge) throw FrameTooLarge("frame length over limit");
  if (r.status == DeframeStatus::kIncomplete) return std::nullopt;
  offset_ += r.consumed;
  if (offset_ > 4096 && offset_ * 2 > buffer_.size()) {
    buffer_.erase(0, offset_);
    offset_ = 0;
  }
  return std::move(r.payload);
}

}  // namespace rlcycle::wire
