#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "rlcycle/env/pendulum.hpp"
#include "rlcycle/env/policy.hpp"
#include "rlcycle/rl/experience.hpp"

namespace rlcycle::env {

// Collects one episode's experiences; hands them out exactly once.
class EpisodeBuffer {
 public:
  EpisodeBuffer(std::uint64_t episode_id, std::size_t capacity);

  void push(rl::Experience e);
  bool full() const { return traj_.size() >= capacity_; }
  std::size_t size() const { return traj_.size(); }
  bool flushed() const { return flushed_; }
  // Throws ContractError on a second call.
  rl::Trajectory flush();

 private:
  rl::Trajectory traj_;
  std::size_t capacity_;
  bool flushed_ = false;
};

struct InitialConditions {
  double phi = 0.0;
  double phi_dot = 0.0;
};

struct EpisodeTask {
  std::uint64_t episode_id = 0;
  std::uint64_t seed = 0;
  ActMode mode = ActMode::kTraining;
  std::optional<InitialConditions> initial;
  int episode_length = 200;
};

// Per-experience post-processing (e.g. auxiliary reward penalties).
using PostprocessHook = std::function<void(rl::Experience&)>;

struct EpisodeOutcome {
  rl::Trajectory trajectory;
  double env_return = 0.0;  // accumulated inside the environment loop
};

// Runs one full episode of the snapshot against the pendulum. Observations and
// actions are recorded in normalised space.
EpisodeOutcome run_episode(const PolicySnapshot& policy, const EpisodeTask& task,
                           const rl::SpaceSpec& spec, const PostprocessHook& hook = {},
                           const PendulumParams& params = {});

}  // namespace rlcycle::env
