#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "rlcycle/nn/matrix.hpp"
#include "rlcycle/rl/experience.hpp"

namespace rlcycle::rl {

enum class Algorithm { kPpo, kDdpg };

std::string_view to_string(Algorithm a);
Algorithm algorithm_from_string(std::string_view name);

// Columns only PPO needs.
struct PpoColumns {
  std::vector<double> advantages;
  std::vector<double> value_targets;
  std::vector<double> vf_preds;
  std::vector<double> action_logp;
  nn::Matrix dist_mean;
  nn::Matrix dist_log_std;
};

// Columnar experience batch in the layout the learners consume.
struct TrainBatch {
  Algorithm algorithm = Algorithm::kPpo;
  nn::Matrix obs;
  nn::Matrix actions;
  nn::Matrix next_obs;
  std::vector<double> rewards;
  std::vector<std::uint8_t> dones;
  std::optional<PpoColumns> ppo;  // present iff algorithm == kPpo

  std::size_t size() const { return rewards.size(); }
  bool valid_for_training() const { return size() > 0; }

  // Rows in the given order.
  TrainBatch select(std::span<const std::size_t> rows) const;
};

struct GaeParams {
  double gamma = 0.95;
  double lambda = 0.1;
};

// Concatenates trajectories into columns. For PPO every experience must carry
// vf_pred, action_logp, dist_mean and dist_log_std; GAE runs per episode
// before concatenation. `bootstrap_values[i]` is V(s'_T) of trajectory i and
// only read for trajectories whose last step is not done (empty span: all 0).
TrainBatch assemble_train_batch(std::span<const Trajectory> trajectories,
                                Algorithm algorithm, GaeParams gae = {},
                                std::span<const double> bootstrap_values = {});

}  // namespace rlcycle::rl
