#pragma once

#include <string>
#include <string_view>

#include <json.hpp>

#include "rlcycle/nn/network.hpp"

namespace rlcycle::nn {

inline constexpr int kManifestVersion = 1;

// Weight manifest:
//   {"format_version":1,"layers":[{"activation":"tanh",
//     "weights":[[...],...],"biases":[...]},...]}
// Row k of "weights" holds the incoming weights of output unit k.
nlohmann::json to_manifest_json(const Network& net);
Network from_manifest_json(const nlohmann::json& manifest);

std::string serialize(const Network& net);
Network deserialize(std::string_view bytes);

void save_manifest(const Network& net, const std::string& path);
Network load_manifest(const std::string& path);

}  // namespace rlcycle::nn
