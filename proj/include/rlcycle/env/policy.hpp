#pragma once

#include <cstdint>
#include <map>
#include <random>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "rlcycle/nn/network.hpp"
#include "rlcycle/rl/experience.hpp"
#include "rlcycle/rl/spaces.hpp"
#include "rlcycle/rl/train_batch.hpp"

namespace rlcycle::env {

enum class ActMode { kTraining, kValidation };

// What a minion executes: the broadcast policy network plus how to read it.
struct PolicySnapshot {
  rl::Algorithm algorithm = rl::Algorithm::kPpo;
  nn::Network network;
  double exploration_sigma = 0.0;  // DDPG only
  std::uint64_t weights_hash = 0;  // FNV-1a of the manifest text
};

// model_broadcast payload:
//   {"algorithm":"ppo"|"ddpg","weights":<manifest>,"weights_hash":"<hex>",
//    "exploration_sigma":x}
nlohmann::json broadcast_payload(const PolicySnapshot& snapshot);
PolicySnapshot snapshot_from_payload(const nlohmann::json& payload);
PolicySnapshot make_snapshot(rl::Algorithm algorithm, const nn::Network& network,
                             double exploration_sigma);

std::string hash_to_hex(std::uint64_t h);
std::uint64_t hash_from_hex(const std::string& s);

struct ActResult {
  std::vector<double> action;  // normalised (pre-tanh)
  std::vector<double> torque;  // denormalised
  std::map<std::string, rl::AuxValue> aux;
};

// normalised obs -> network -> sample (training) or mean (validation) ->
// tanh map onto the action bounds.
ActResult act(const PolicySnapshot& policy, std::span<const double> obs, ActMode mode,
              const rl::SpaceSpec& spec, std::mt19937_64& rng);

}  // namespace rlcycle::env
