#pragma once

#include <cstdint>
#include <string>

#include <json.hpp>

#include "rlcycle/ddpg/ddpg.hpp"
#include "rlcycle/ppo/ppo_config.hpp"
#include "rlcycle/rl/spaces.hpp"
#include "rlcycle/rl/train_batch.hpp"

namespace rlcycle::master {

struct MasterConfig {
  rl::Algorithm algorithm = rl::Algorithm::kPpo;
  rl::SpaceSpec space;  // defaults to the pendulum's
  int episodes_per_cycle = 3;
  int episode_length = 200;
  int validation_interval = 5;
  std::uint64_t total_cycles = 800;
  int checkpoint_interval = 10;
  std::string output_dir = "results";
  std::string host = "127.0.0.1";
  int port = 5555;
  double heartbeat_interval = 5.0;  // seconds
  double heartbeat_timeout = 15.0;
  double task_deadline = 600.0;
  double monitor_period = 1.0;
  std::uint64_t seed = 0;
  int local_minions = 0;  // in-process minions started by the master binary
  ppo::PpoConfig ppo;
  ddpg::DdpgConfig ddpg;

  MasterConfig();
  // Throws DomainError naming the offending field.
  void validate() const;
};

nlohmann::json to_json(const MasterConfig& c);
// Unknown keys are rejected. Throws ParseError or DomainError.
MasterConfig master_config_from_json(const nlohmann::json& j);
MasterConfig load_master_config(const std::string& path);

}  // namespace rlcycle::master
