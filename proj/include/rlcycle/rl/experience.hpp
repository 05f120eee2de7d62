#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "rlcycle/rl/spaces.hpp"

namespace rlcycle::rl {

using AuxValue = std::variant<double, std::vector<double>>;

// Auxiliary column names shared by the minion, the wire format and the batch.
namespace aux {
inline constexpr const char* kVfPred = "vf_pred";
inline constexpr const char* kActionLogp = "action_logp";
inline constexpr const char* kDistMean = "dist_mean";
inline constexpr const char* kDistLogStd = "dist_log_std";
}  // namespace aux

// One transition (s, a, s', r, d), everything in normalised space.
struct Experience {
  std::vector<double> obs;
  std::vector<double> action;
  std::vector<double> next_obs;
  double reward = 0.0;
  bool done = false;
  std::map<std::string, AuxValue> aux;

  friend bool operator==(const Experience&, const Experience&) = default;
};

struct Trajectory {
  std::uint64_t episode_id = 0;
  std::vector<Experience> experiences;

  std::size_t size() const { return experiences.size(); }
  bool empty() const { return experiences.empty(); }
  bool terminal() const { return !experiences.empty() && experiences.back().done; }

  friend bool operator==(const Trajectory&, const Trajectory&) = default;
};

double aux_scalar(const Experience& e, const std::string& key);
const std::vector<double>& aux_vector(const Experience& e, const std::string& key);

// Throws ContractError if lengths disagree with `spec`, a value is not finite,
// an observation leaves [-1 - 1e-9, 1 + 1e-9], or `done` appears before the
// last step.
void validate(const Experience& e, const SpaceSpec& spec);
void validate(const Trajectory& t, const SpaceSpec& spec);

// {"obs":[...],"action":[...],"next_obs":[...],"reward":x,"done":b,"aux":{...}}
nlohmann::json to_json(const Experience& e);
Experience experience_from_json(const nlohmann::json& j);

nlohmann::json to_json(const Trajectory& t);  // array of experiences
Trajectory trajectory_from_json(const nlohmann::json& j, std::uint64_t episode_id);

}  // namespace rlcycle::rl
