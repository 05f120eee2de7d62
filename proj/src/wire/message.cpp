#include "rlcycle/wire/message.hpp"

#include <array>
#include <utility>

#include "rlcycle/errors.hpp"

namespace rlcycle::wire {

namespace {

constexpr std::array<std::pair<MessageType, std::string_view>, 9> kNames{{
    {MessageType::kHello, "hello"},
    {MessageType::kHelloAck, "hello_ack"},
    {MessageType::kHeartbeat, "heartbeat"},
    {MessageType::kModelBroadcast, "model_broadcast"},
    {MessageType::kGenerateTrainingData, "generate_training_data"},
    {MessageType::kGenerateValidationData, "generate_validation_data"},
    {MessageType::kExperienceUpload, "experience_upload"},
    {MessageType::kError, "error"},
    {MessageType::kShutdown, "shutdown"},
}};

}  // namespace

std::string_view to_string(MessageType t) {
  for (const auto& [type, name] : kNames) {
    if (type == t) return name;
  }
  return "error";
}

std::string encode(const WireMessage& msg) {
  nlohmann::json j{{"type", to_string(msg.type)},
                   {"cycle", msg.cycle},
                   {"payload", msg.payload.is_null() ? nlohmann::json::object()
                                                     : msg.payload}};
  return j.dump();
}

WireMessage decode(std::string_view text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(std::string("message is not valid JSON: ") + e.what());
  }
  if (!j.is_object() || !j.contains("type") || !j["type"].is_string()) {
    throw ParseError("envelope needs a string 'type'");
  }
  WireMessage msg;
  if (j.contains("cycle")) {
    if (!j["cycle"].is_number_unsigned() && !j["cycle"].is_number_integer()) {
      throw ParseError("'cycle' must be a non-negative integer");
    }
    if (j["cycle"].is_number_integer() && j["cycle"].get<std::int64_t>() < 0) {
      throw ParseError("'cycle' must be a non-negative integer");
    }
    msg.cycle = j["cycle"].get<std::uint64_t>();
  }
  if (j.contains("payload")) {
    if (!j["payload"].is_object()) throw ParseError("'payload' must be an object");
    msg.payload = j["payload"];
  }
  const auto name = j["type"].get<std::string>();
  for (const auto& [type, n] : kNames) {
    if (n == name) {
      msg.type = type;
      return msg;
    }
  }
  throw UnknownMessageType("unknown message type '" + name + "'");
}

WireMessage make_error(std::uint64_t cycle, std::string_view reason) {
  return {MessageType::kError, cycle, {{"reason", reason}}};
}

}  // namespace rlcycle::wire
