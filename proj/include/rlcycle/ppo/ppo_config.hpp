#pragma once

#include <cstddef>
#include <vector>

#include <json.hpp>

#include "rlcycle/nn/network.hpp"

namespace rlcycle::ppo {

struct PpoConfig {
  double gamma = 0.95;
  double lambda = 0.1;
  double clip_param = 0.3;
  double initial_kl_coeff = 0.2;
  double kl_target = 0.01;
  double vf_loss_coeff = 1.0;
  double entropy_coeff = 0.0;
  double vf_clip_param = 10000.0;
  double learning_rate = 0.0003;
  std::size_t train_batch_size = 512;  // informational; whole cycles are trained
  std::size_t minibatch_size = 64;
  std::size_t sgd_iters = 6;
  std::vector<std::size_t> policy_hidden{64, 64};
  std::vector<std::size_t> vf_hidden{64, 64};
  nn::Activation activation = nn::Activation::kTanh;

  void validate() const;
};

nlohmann::json to_json(const PpoConfig& c);
PpoConfig ppo_config_from_json(const nlohmann::json& j);

}  // namespace rlcycle::ppo
