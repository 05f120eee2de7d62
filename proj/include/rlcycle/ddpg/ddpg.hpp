#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "rlcycle/ddpg/replay_buffer.hpp"
#include "rlcycle/nn/batch_kernels.hpp"
#include "rlcycle/nn/network.hpp"
#include "rlcycle/nn/optimizer.hpp"
#include "rlcycle/rl/train_batch.hpp"

namespace rlcycle::ddpg {

// kTimesteps: fraction * size update steps (one batch per replayed step).
// kSamples: fraction * size rows in total, i.e. that many rows / batch steps.
enum class ReplaySchedule { kTimesteps, kSamples };

std::string_view to_string(ReplaySchedule s);
ReplaySchedule replay_schedule_from_string(std::string_view s);

struct DdpgConfig {
  double gamma = 0.99;
  double tau = 0.001;  // polyak coefficient rho
  double actor_lr = 0.001;
  double critic_lr = 0.001;
  double huber_threshold = 1.0;
  std::size_t replay_capacity = 10000;
  std::size_t train_batch_size = 64;
  std::size_t experiences_per_cycle = 600;
  std::size_t learning_starts = 2400;
  double replay_fraction_per_cycle = 0.25;
  ReplaySchedule replay_schedule = ReplaySchedule::kTimesteps;
  double exploration_sigma = 0.1;
  std::vector<std::size_t> actor_hidden{64, 64};
  std::vector<std::size_t> critic_hidden{64, 64};
  nn::Activation activation = nn::Activation::kRelu;

  void validate() const;
};

nlohmann::json to_json(const DdpgConfig& c);
DdpgConfig ddpg_config_from_json(const nlohmann::json& j);

struct ActorCritic {
  nn::Network actor;          // obs -> action
  nn::Network critic;         // [obs, action] -> Q
  nn::Network target_actor;
  nn::Network target_critic;
};

// mu(s) + N(0, sigma^2) per dimension, unclipped.
std::vector<double> explore_action(const nn::Network& actor, std::span<const double> obs,
                                   double sigma, std::mt19937_64& rng);

// r + gamma (1 - d) Q'(s', mu'(s')) for every row.
std::vector<double> q_targets(const rl::TrainBatch& batch, const nn::Network& target_actor,
                              const nn::Network& target_critic, double gamma,
                              nn::Backend backend = nn::Backend::kOpenMP);

double huber(double error, double threshold);

// Rows [obs, action] for the critic.
nn::Matrix critic_inputs(const nn::Matrix& obs, const nn::Matrix& actions);

struct CriticLoss {
  double loss = 0.0;
  double mean_abs_td_error = 0.0;
  std::vector<double> grads;  // dL/d(critic params), empty unless requested
};

// Mean Huber(Q(s, a) - y) over the batch.
CriticLoss critic_loss(const rl::TrainBatch& batch, const ActorCritic& nets,
                       const DdpgConfig& config, bool want_grads,
                       nn::Backend backend = nn::Backend::kOpenMP);

// Mean Q(s, mu(s)) and its gradient w.r.t. the actor parameters (critic fixed).
struct ActorObjective {
  double mean_q = 0.0;
  std::vector<double> grads;
};
ActorObjective actor_objective(const nn::Matrix& obs, const nn::Network& actor,
                               const nn::Network& critic, bool want_grads,
                               nn::Backend backend = nn::Backend::kOpenMP);

// One ascent step on mean Q(s, mu(s)). Returns false (actor unchanged) if the
// gradient is not finite.
bool actor_update(const rl::TrainBatch& batch, nn::Network& actor,
                  const nn::Network& critic, nn::Optimizer& opt);

// target <- rho * online + (1 - rho) * target
void polyak_update(nn::Network& target, const nn::Network& online, double rho);

// Update steps one replay-training call performs for the given buffer size.
std::size_t planned_replay_steps(std::size_t buffer_size, const DdpgConfig& config);

struct DdpgTrainStats {
  std::size_t steps = 0;
  std::size_t skipped_actor_steps = 0;
  double mean_critic_loss = 0.0;
  double mean_abs_td_error = 0.0;
  double mean_q = 0.0;
};

class DdpgLearner {
 public:
  DdpgLearner(DdpgConfig config, std::size_t obs_dims, std::size_t action_dims,
              std::uint64_t seed);
  DdpgLearner(DdpgConfig config, ActorCritic nets, std::uint64_t seed);

  const DdpgConfig& config() const { return config_; }
  const ActorCritic& nets() const { return nets_; }
  const nn::Network& policy() const { return nets_.actor; }
  ReplayBuffer& buffer() { return buffer_; }
  const ReplayBuffer& buffer() const { return buffer_; }

  // Critic step, actor step, then polyak update of both targets.
  DdpgTrainStats train_step(const rl::TrainBatch& batch);

  // Replay training for one cycle; expects the cycle's experiences in the
  // buffer already. No-op below learning_starts.
  DdpgTrainStats cycle_train();

 private:
  DdpgConfig config_;
  ActorCritic nets_;
  nn::Optimizer actor_opt_;
  nn::Optimizer critic_opt_;
  ReplayBuffer buffer_;
  std::mt19937_64 rng_;
};

}  // namespace rlcycle::ddpg
