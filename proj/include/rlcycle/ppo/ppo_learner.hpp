#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "rlcycle/nn/network.hpp"
#include "rlcycle/nn/optimizer.hpp"
#include "rlcycle/ppo/gaussian.hpp"
#include "rlcycle/ppo/ppo_config.hpp"
#include "rlcycle/rl/experience.hpp"
#include "rlcycle/rl/train_batch.hpp"

namespace rlcycle::ppo {

struct PpoTrainStats {
  std::size_t gradient_steps = 0;
  double mean_loss = 0.0;
  double mean_kl = 0.0;        // over the final pass
  double mean_entropy = 0.0;   // over the final pass
  double clip_fraction = 0.0;  // over the final pass
  double mean_vf_loss = 0.0;   // over the final pass
  double kl_coeff = 0.0;       // after adaptation
  bool aborted = false;        // non-finite loss; weights were restored
};

GaussianDist policy_forward(const nn::Network& policy, std::span<const double> obs);

// Writes vf_pred, dist_mean, dist_log_std and a recomputed action_logp into
// every experience of `traj`.
void postprocess_rollout(rl::Trajectory& traj, const nn::Network& policy,
                         const nn::Network& vf);

// Policy + value networks with their optimizers and the adaptive KL coefficient.
class PpoLearner {
 public:
  PpoLearner(PpoConfig config, std::size_t obs_dims, std::size_t action_dims,
             std::uint64_t seed);
  PpoLearner(PpoConfig config, nn::Network policy, nn::Network vf, std::uint64_t seed);

  const PpoConfig& config() const { return config_; }
  const nn::Network& policy() const { return policy_; }
  const nn::Network& vf() const { return vf_; }
  double kl_coeff() const { return kl_coeff_; }

  rl::TrainBatch build_batch(std::vector<rl::Trajectory> episodes) const;

  // Standardises advantages, runs sgd_iters shuffled minibatch passes, then
  // adapts the KL coefficient once from the last pass's mean KL.
  PpoTrainStats train_on_batch(const rl::TrainBatch& batch);

 private:
  PpoConfig config_;
  nn::Network policy_;
  nn::Network vf_;
  nn::Optimizer policy_opt_;
  nn::Optimizer vf_opt_;
  double kl_coeff_;
  std::mt19937_64 rng_;
};

// Returns a copy with advantages shifted to mean 0 and scaled to std 1.
rl::TrainBatch standardize_advantages(const rl::TrainBatch& batch);

}  // namespace rlcycle::ppo
