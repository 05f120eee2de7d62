#include "rlcycle/env/rollout.hpp"

#include <algorithm>
#include <random>

#include "rlcycle/errors.hpp"

namespace rlcycle::env {

EpisodeBuffer::EpisodeBuffer(std::uint64_t episode_id, std::size_t capacity)
    : capacity_(capacity) {
  traj_.episode_id = episode_id;
  traj_.experiences.reserve(capacity);
}

void EpisodeBuffer::push(rl::Experience e) {
  if (flushed_) throw ContractError("episode buffer already flushed");
  if (full()) throw ContractError("episode buffer is full");
  traj_.experiences.push_back(std::move(e));
}

rl::Trajectory EpisodeBuffer::flush() {
  if (flushed_) throw ContractError("episode buffer flushed twice");
  flushed_ = true;
  return std::move(traj_);
}

EpisodeOutcome run_episode(const PolicySnapshot& policy, const EpisodeTask& task,
                           const rl::SpaceSpec& spec, const PostprocessHook& hook,
                           const PendulumParams& base_params) {
  if (task.episode_length <= 0) throw DomainError("episode length must be positive");
  PendulumParams params = base_params;
  params.episode_length = task.episode_length;

  std::mt19937_64 rng(task.seed);
  PendulumState state;
  if (task.initial) {
    state = {task.initial->phi, task.initial->phi_dot, 0};
  } else {
    state = env_reset(task.mode == ActMode::kValidation ? ResetMode::kValidation
                                                        : ResetMode::kTraining,
                      rng);
  }

  EpisodeBuffer buffer(task.episode_id, static_cast<std::size_t>(task.episode_length));
  EpisodeOutcome outcome;
  std::vector<double> obs = observe(state, spec, params);
  bool done = false;
  while (!done) {
    ActResult a = act(policy, obs, task.mode, spec, rng);
    const double torque = std::clamp(a.torque.at(0), -params.max_torque, params.max_torque);
    const StepResult step = env_step(state, torque, params);
    std::vector<double> next_obs = observe(step.state, spec, params);

    rl::Experience e;
    e.obs = std::move(obs);
    e.action = std::move(a.action);
    e.next_obs = next_obs;
    e.reward = step.reward;
    e.done = step.done;
    e.aux = std::move(a.aux);
    outcome.env_return += step.reward;
    if (hook) hook(e);
    buffer.push(std::move(e));

    state = step.state;
    obs = std::move(next_obs);
    done = step.done;
  }
  outcome.trajectory = buffer.flush();
  return outcome;
}

}  // namespace rlcycle::env
