#pragma once

#include <cmath>
#include <random>
#include <vector>

#include "rlcycle/ddpg/ddpg.hpp"
#include "rlcycle/nn/network.hpp"
#include "rlcycle/ppo/gaussian.hpp"
#include "rlcycle/rl/train_batch.hpp"

namespace rlcycle::fixture {

inline nn::Network patterned(std::vector<std::size_t> sizes, std::vector<nn::Activation> acts,
                             double a, double b, double scale) {
  nn::Network net(sizes, acts);
  auto p = net.parameters();
  for (std::size_t i = 0; i < p.size(); ++i) {
    p[i] = scale * std::sin(a * static_cast<double>(i) + b);
  }
  return net;
}

inline rl::TrainBatch empty_batch(rl::Algorithm alg, std::size_t rows, std::size_t obs,
                                  std::size_t act) {
  rl::TrainBatch b;
  b.algorithm = alg;
  b.obs = nn::Matrix(rows, obs);
  b.actions = nn::Matrix(rows, act);
  b.next_obs = nn::Matrix(rows, obs);
  b.rewards.assign(rows, 0.0);
  b.dones.assign(rows, 0);
  if (alg == rl::Algorithm::kPpo) {
    rl::PpoColumns c;
    c.advantages.assign(rows, 0.0);
    c.value_targets.assign(rows, 0.0);
    c.vf_preds.assign(rows, 0.0);
    c.action_logp.assign(rows, 0.0);
    c.dist_mean = nn::Matrix(rows, act);
    c.dist_log_std = nn::Matrix(rows, act);
    b.ppo = std::move(c);
  }
  return b;
}

// Policy 3x4x2 (tanh hidden), value net 3x4x1.
inline nn::Network small_policy() {
  return patterned({3, 4, 2}, {nn::Activation::kTanh, nn::Activation::kLinear}, 1.7, 0.2, 0.3);
}
inline nn::Network small_vf() {
  return patterned({3, 4, 1}, {nn::Activation::kTanh, nn::Activation::kLinear}, 0.9, 1.1, 0.5);
}

// Two hand-picked experiences; row 0 lands outside the clip band, row 1 inside.
inline rl::TrainBatch two_row_ppo_batch() {
  rl::TrainBatch b = empty_batch(rl::Algorithm::kPpo, 2, 3, 1);
  const double obs[2][3] = {{0.5, -0.3, 0.2}, {-0.8, 0.1, 0.9}};
  for (std::size_t r = 0; r < 2; ++r) {
    for (std::size_t c = 0; c < 3; ++c) b.obs(r, c) = obs[r][c];
  }
  b.actions(0, 0) = 0.4;
  b.actions(1, 0) = -1.1;
  auto& c = *b.ppo;
  c.action_logp = {-1.9, -1.3};
  c.dist_mean(0, 0) = 0.1;
  c.dist_mean(1, 0) = -0.3;
  c.dist_log_std(0, 0) = -0.2;
  c.dist_log_std(1, 0) = 0.1;
  c.advantages = {1.5, -0.8};
  c.value_targets = {-2.0, 0.7};
  c.vf_preds = {-1.0, 0.2};
  return b;
}

// Random PPO minibatch whose log-ratios stay clear of the clip kinks.
inline rl::TrainBatch random_ppo_batch(std::mt19937_64& rng, const nn::Network& policy,
                                       std::size_t rows) {
  const std::size_t act = policy.output_size() / 2;
  rl::TrainBatch b = empty_batch(rl::Algorithm::kPpo, rows, policy.input_size(), act);
  std::uniform_real_distribution<double> u(-1.0, 1.0), pick(0.0, 1.0);
  auto& c = *b.ppo;
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t k = 0; k < b.obs.cols(); ++k) b.obs(r, k) = u(rng);
    const auto dist = ppo::GaussianDist::from_output(policy.forward(b.obs.row(r)));
    for (std::size_t d = 0; d < act; ++d) {
      b.actions(r, d) = dist.mean[d] + 0.8 * u(rng);
      c.dist_mean(r, d) = dist.mean[d] + 0.3 * u(rng);
      c.dist_log_std(r, d) = dist.log_std[d] + 0.3 * u(rng);
    }
    const double logp = ppo::log_prob(dist, b.actions.row(r));
    const double which = pick(rng);
    double shift;
    if (which < 0.5) {
      shift = 0.2 * u(rng);  // inside the band
    } else if (which < 0.75) {
      shift = 0.45 + 0.5 * pick(rng);  // ratio well above 1 + eps
    } else {
      shift = -0.6 - 0.5 * pick(rng);  // well below 1 - eps
    }
    c.action_logp[r] = logp - shift;
    c.advantages[r] = 2.0 * u(rng);
    c.value_targets[r] = 3.0 * u(rng);
  }
  return b;
}

inline ddpg::ActorCritic small_actor_critic() {
  ddpg::ActorCritic n;
  using A = nn::Activation;
  n.actor = patterned({3, 5, 1}, {A::kRelu, A::kLinear}, 1.3, 0.4, 0.6);
  n.critic = patterned({4, 5, 1}, {A::kRelu, A::kLinear}, 0.7, 2.0, 0.6);
  n.target_actor = patterned({3, 5, 1}, {A::kRelu, A::kLinear}, 1.1, 0.9, 0.5);
  n.target_critic = patterned({4, 5, 1}, {A::kRelu, A::kLinear}, 0.5, 1.5, 0.7);
  return n;
}

// Four transitions, the third terminal; errors span both Huber branches.
inline rl::TrainBatch four_row_ddpg_batch() {
  rl::TrainBatch b = empty_batch(rl::Algorithm::kDdpg, 4, 3, 1);
  const double obs[4][3] = {{0.9, 0.1, -0.2}, {-0.4, 0.7, 0.5}, {0.2, -0.9, 0.0}, {-1.0, 0.0, 1.0}};
  const double nxt[4][3] = {{0.8, 0.2, -0.1}, {-0.5, 0.6, 0.3}, {0.1, -0.8, 0.4}, {-0.9, 0.3, 0.8}};
  const double act[4] = {0.3, -1.2, 2.5, 0.0};
  const double rew[4] = {-0.5, -3.2, -7.9, -0.01};
  for (std::size_t r = 0; r < 4; ++r) {
    for (std::size_t c = 0; c < 3; ++c) {
      b.obs(r, c) = obs[r][c];
      b.next_obs(r, c) = nxt[r][c];
    }
    b.actions(r, 0) = act[r];
    b.rewards[r] = rew[r];
  }
  b.dones[2] = 1;
  return b;
}

inline rl::TrainBatch random_ddpg_batch(std::mt19937_64& rng, std::size_t rows,
                                        std::size_t obs = 3, std::size_t act = 1) {
  rl::TrainBatch b = empty_batch(rl::Algorithm::kDdpg, rows, obs, act);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < obs; ++c) {
      b.obs(r, c) = u(rng);
      b.next_obs(r, c) = u(rng);
    }
    for (std::size_t c = 0; c < act; ++c) b.actions(r, c) = 2.0 * u(rng);
    b.rewards[r] = 4.0 * u(rng);
    b.dones[r] = u(rng) > 0.6 ? 1 : 0;
  }
  return b;
}

}  // namespace rlcycle::fixture
