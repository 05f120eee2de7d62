#pragma once

#include <span>
#include <vector>

#include "rlcycle/rl/experience.hpp"

namespace rlcycle::rl {

// sum_t gamma^t r_t. gamma must lie in (0, 1].
double discounted_return(std::span<const double> rewards, double gamma);
double discounted_return(const Trajectory& traj, double gamma);

std::vector<double> rewards_of(const Trajectory& traj);

struct AdvantageEstimate {
  std::vector<double> advantages;
  std::vector<double> value_targets;  // advantages + vf_preds
};

// GAE(lambda): delta_t = r_t + gamma V_{t+1} - V_t with V_T := bootstrap_value,
// A_t = sum_k (gamma lambda)^k delta_{t+k}.
AdvantageEstimate gae_advantages(std::span<const double> rewards,
                                 std::span<const double> vf_preds,
                                 double bootstrap_value, double gamma, double lambda);
AdvantageEstimate gae_advantages(const Trajectory& traj, std::span<const double> vf_preds,
                                 double bootstrap_value, double gamma, double lambda);

}  // namespace rlcycle::rl
