#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>

#include <json.hpp>

namespace rlcycle::wire {

inline constexpr int kProtocolVersion = 1;

enum class MessageType {
  kHello,
  kHelloAck,
  kHeartbeat,
  kModelBroadcast,
  kGenerateTrainingData,
  kGenerateValidationData,
  kExperienceUpload,
  kError,
  kShutdown,
};

std::string_view to_string(MessageType t);

// Envelope {"type":"...","cycle":n,"payload":{...}}.
struct WireMessage {
  MessageType type = MessageType::kHeartbeat;
  std::uint64_t cycle = 0;
  nlohmann::json payload = nlohmann::json::object();
};

// Well-formed envelope whose type is outside the closed set.
class UnknownMessageType : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::string encode(const WireMessage& msg);
// Throws ParseError on malformed envelopes, UnknownMessageType on unknown types.
WireMessage decode(std::string_view text);

WireMessage make_error(std::uint64_t cycle, std::string_view reason);

}  // namespace rlcycle::wire
