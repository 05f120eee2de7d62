#include "rlcycle/master/config.hpp"

#include <fstream>
#include <set>

#include "rlcycle/env/pendulum.hpp"
#include "rlcycle/errors.hpp"

namespace rlcycle::master {

MasterConfig::MasterConfig() : space(env::pendulum_space()) {}

void MasterConfig::validate() const {
  space.validate();
  if (episodes_per_cycle < 1) throw DomainError("episodes_per_cycle must be >= 1");
  if (episode_length < 1) throw DomainError("episode_length must be >= 1");
  if (validation_interval < 1) throw DomainError("validation_interval must be >= 1");
  if (checkpoint_interval < 1) throw DomainError("checkpoint_interval must be >= 1");
  if (port < 0 || port > 65535) throw DomainError("port out of range");
  if (!(heartbeat_interval > 0)) throw DomainError("heartbeat_interval must be > 0");
  if (!(heartbeat_timeout > heartbeat_interval)) {
    throw DomainError("heartbeat_timeout must exceed heartbeat_interval");
  }
  if (!(task_deadline > 0)) throw DomainError("task_deadline must be > 0");
  if (!(monitor_period > 0)) throw DomainError("monitor_period must be > 0");
  if (local_minions < 0) throw DomainError("local_minions must be >= 0");
  if (output_dir.empty()) throw DomainError("output_dir must not be empty");
  if (space.obs_dims() != 3 || space.action_dims() != 1) {
    throw DomainError("the pendulum needs 3 observation and 1 action dimensions");
  }
  if (algorithm == rl::Algorithm::kPpo) {
    ppo.validate();
  } else {
    ddpg.validate();
  }
}

nlohmann::json to_json(const MasterConfig& c) {
  return {{"algorithm", rl::to_string(c.algorithm)},
          {"space_spec", rl::to_json(c.space)},
          {"episodes_per_cycle", c.episodes_per_cycle},
          {"episode_length", c.episode_length},
          {"validation_interval", c.validation_interval},
          {"total_cycles", c.total_cycles},
          {"checkpoint_interval", c.checkpoint_interval},
          {"output_dir", c.output_dir},
          {"host", c.host},
          {"port", c.port},
          {"heartbeat_interval", c.heartbeat_interval},
          {"heartbeat_timeout", c.heartbeat_timeout},
          {"task_deadline", c.task_deadline},
          {"monitor_period", c.monitor_period},
          {"seed", c.seed},
          {"local_minions", c.local_minions},
          {"ppo", to_json(c.ppo)},
          {"ddpg", to_json(c.ddpg)}};
}

MasterConfig master_config_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw ParseError("config must be a JSON object");
  static const std::set<std::string> kKeys{
      "algorithm",         "space_spec",   "episodes_per_cycle", "episode_length",
      "validation_interval", "total_cycles", "checkpoint_interval", "output_dir",
      "host",              "port",         "heartbeat_interval", "heartbeat_timeout",
      "task_deadline",     "monitor_period", "seed",             "local_minions",
      "ppo",               "ddpg"};
  for (const auto& [key, _] : j.items()) {
    if (!kKeys.contains(key)) throw ParseError("unknown config key '" + key + "'");
  }
  MasterConfig c;
  try {
    if (j.contains("algorithm")) c.algorithm = rl::algorithm_from_string(j["algorithm"].get<std::string>());
    if (j.contains("space_spec")) c.space = rl::space_spec_from_json(j["space_spec"]);
    c.episodes_per_cycle = j.value("episodes_per_cycle", c.episodes_per_cycle);
    c.episode_length = j.value("episode_length", c.episode_length);
    c.validation_interval = j.value("validation_interval", c.validation_interval);
    c.total_cycles = j.value("total_cycles", c.total_cycles);
    c.checkpoint_interval = j.value("checkpoint_interval", c.checkpoint_interval);
    c.output_dir = j.value("output_dir", c.output_dir);
    c.host = j.value("host", c.host);
    c.port = j.value("port", c.port);
    c.heartbeat_interval = j.value("heartbeat_interval", c.heartbeat_interval);
    c.heartbeat_timeout = j.value("heartbeat_timeout", c.heartbeat_timeout);
    c.task_deadline = j.value("task_deadline", c.task_deadline);
    c.monitor_period = j.value("monitor_period", c.monitor_period);
    c.seed = j.value("seed", c.seed);
    c.local_minions = j.value("local_minions", c.local_minions);
    if (j.contains("ppo")) c.ppo = ppo::ppo_config_from_json(j["ppo"]);
    if (j.contains("ddpg")) c.ddpg = ddpg::ddpg_config_from_json(j["ddpg"]);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("config: ") + e.what());
  }
  c.validate();
  return c;
}

MasterConfig load_master_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open config file " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(path + ": " + e.what());
  }
  return master_config_from_json(j);
}

}  // namespace rlcycle::master
