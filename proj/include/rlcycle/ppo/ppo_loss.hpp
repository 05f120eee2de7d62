#pragma once

#include <vector>

#include "rlcycle/nn/batch_kernels.hpp"
#include "rlcycle/nn/network.hpp"
#include "rlcycle/ppo/gaussian.hpp"
#include "rlcycle/ppo/ppo_config.hpp"
#include "rlcycle/rl/train_batch.hpp"

namespace rlcycle::ppo {

// min(clip(ratio, 1 - eps, 1 + eps) * adv, ratio * adv)
double clip_objective(double ratio, double advantage, double clip_param);

// ratio * adv - beta * KL(old || next)
double kl_penalty_term(const GaussianDist& old, const GaussianDist& next, double ratio,
                       double advantage, double beta);

// Squared error clamped to [0, vf_clip_param].
double vf_loss(double vf_pred, double value_target, double vf_clip_param);

// Adaptive KL coefficient: x1.5 above twice the target, /1.5 below half of it.
double update_kl_coefficient(double beta, double mean_kl, double kl_target);

struct PpoLossStats {
  double mean_kl = 0.0;
  double mean_entropy = 0.0;
  double clip_fraction = 0.0;
  double mean_surrogate = 0.0;  // mean clipped objective
  double mean_vf_loss = 0.0;
};

struct PpoLossResult {
  double loss = 0.0;
  PpoLossStats stats;
  std::vector<double> policy_grads;  // dL/d(policy params), empty unless requested
  std::vector<double> vf_grads;      // dL/d(vf params), empty unless requested
};

// Minibatch loss
//   L = -mean( L_clip + L_KL - c_VF * L_VF + c_S * S )
// where L_KL = ratio * A - beta * KL(old || new). The minibatch must carry the
// PPO columns (advantages, value targets, old logp and old dist params).
PpoLossResult ppo_total_loss(const nn::Network& policy, const nn::Network& vf,
                             const rl::TrainBatch& minibatch, double beta,
                             const PpoConfig& config, bool want_grads,
                             nn::Backend backend = nn::Backend::kOpenMP);

}  // namespace rlcycle::ppo
