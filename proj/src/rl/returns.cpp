#include "rlcycle/rl/returns.hpp"

#include <string>

#include "rlcycle/errors.hpp"

namespace rlcycle::rl {

namespace {

void check_gamma(double gamma) {
  if (!(gamma > 0.0 && gamma <= 1.0)) {
    throw DomainError("gamma must lie in (0, 1], got " + std::to_string(gamma));
  }
}

}  // namespace

double discounted_return(std::span<const double> rewards, double gamma) {
  check_gamma(gamma);
  if (rewards.empty()) throw ContractError("discounted return of an empty trajectory");
  double total = 0.0;
  double discount = 1.0;
  for (double r : rewards) {
    total += discount * r;
    discount *= gamma;
  }
  return total;
}

std::vector<double> rewards_of(const Trajectory& traj) {
  std::vector<double> r;
  r.reserve(traj.size());
  for (const auto& e : traj.experiences) r.push_back(e.reward);
  return r;
}

double discounted_return(const Trajectory& traj, double gamma) {
  return discounted_return(rewards_of(traj), gamma);
}

AdvantageEstimate gae_advantages(std::span<const double> rewards,
                                 std::span<const double> vf_preds,
                                 double bootstrap_value, double gamma, double lambda) {
  check_gamma(gamma);
  if (rewards.size() != vf_preds.size()) {
    throw ShapeError("vf_preds length " + std::to_string(vf_preds.size()) +
                     " != trajectory length " + std::to_string(rewards.size()));
  }
  const std::size_t n = rewards.size();
  AdvantageEstimate est;
  est.advantages.assign(n, 0.0);
  est.value_targets.assign(n, 0.0);
  double running = 0.0;
  for (std::size_t t = n; t-- > 0;) {
    const double next_value = t + 1 < n ? vf_preds[t + 1] : bootstrap_value;
    const double delta = rewards[t] + gamma * next_value - vf_preds[t];
    running = delta + gamma * lambda * running;
    est.advantages[t] = running;
    est.value_targets[t] = running + vf_preds[t];
  }
  return est;
}

AdvantageEstimate gae_advantages(const Trajectory& traj, std::span<const double> vf_preds,
                                 double bootstrap_value, double gamma, double lambda) {
  const auto r = rewards_of(traj);
  return gae_advantages(r, vf_preds, bootstrap_value, gamma, lambda);
}

}  // namespace rlcycle::rl
