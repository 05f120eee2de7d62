#pragma once

#include <atomic>
#include <cstdint>
#include <functional>
#include <memory>
#include <thread>
#include <vector>

#include "rlcycle/ddpg/ddpg.hpp"
#include "rlcycle/env/minion.hpp"
#include "rlcycle/env/policy.hpp"
#include "rlcycle/master/config.hpp"
#include "rlcycle/master/minion_server.hpp"
#include "rlcycle/master/persist.hpp"
#include "rlcycle/ppo/ppo_learner.hpp"

namespace rlcycle::master {

// The learning side of a cycle.
class Agent {
 public:
  virtual ~Agent() = default;
  virtual env::PolicySnapshot snapshot() const = 0;
  virtual const nn::Network& policy() const = 0;
  // Consumes one cycle's episodes and fills the training fields of `stats`.
  virtual void train(std::vector<rl::Trajectory> episodes, CycleStats& stats) = 0;
};

class PpoAgent : public Agent {
 public:
  PpoAgent(const ppo::PpoConfig& config, const rl::SpaceSpec& space, std::uint64_t seed);
  env::PolicySnapshot snapshot() const override;
  const nn::Network& policy() const override { return learner_.policy(); }
  void train(std::vector<rl::Trajectory> episodes, CycleStats& stats) override;
  ppo::PpoLearner& learner() { return learner_; }

 private:
  ppo::PpoLearner learner_;
};

// Collection happens first, then the cycle's replay training.
class DdpgAgent : public Agent {
 public:
  DdpgAgent(const ddpg::DdpgConfig& config, const rl::SpaceSpec& space, std::uint64_t seed);
  env::PolicySnapshot snapshot() const override;
  const nn::Network& policy() const override { return learner_.policy(); }
  void train(std::vector<rl::Trajectory> episodes, CycleStats& stats) override;
  ddpg::DdpgLearner& learner() { return learner_; }

 private:
  ddpg::DdpgLearner learner_;
};

std::unique_ptr<Agent> make_agent(const MasterConfig& config);

struct ValidationRecord {
  std::uint64_t cycle = 0;
  double episode_return = 0.0;
  std::vector<TraceRow> trace;
};

struct RunSummary {
  std::uint64_t cycles_completed = 0;
  std::vector<CycleStats> cycles;
  std::vector<ValidationRecord> validations;
  bool interrupted = false;
};

// Seed of training episode `index` in `cycle`.
std::uint64_t episode_seed(std::uint64_t master_seed, std::uint64_t cycle, std::uint64_t index);

class Master {
 public:
  using CycleObserver =
      std::function<void(std::uint64_t cycle, const std::vector<rl::Trajectory>& episodes)>;
  using ValidationObserver = std::function<void(const ValidationRecord&)>;

  // Binds the listening port; throws wire::PortInUse.
  explicit Master(MasterConfig config);
  ~Master();

  std::uint16_t port() const { return server_.port(); }
  const MasterConfig& config() const { return config_; }
  MinionServer& server() { return server_; }
  Agent& agent() { return *agent_; }
  const ResultWriter& results() const { return writer_; }

  void set_cycle_observer(CycleObserver observer) { observer_ = std::move(observer); }
  // Called after each validation episode; may call request_stop().
  void set_validation_observer(ValidationObserver observer) {
    validation_observer_ = std::move(observer);
  }
  void request_stop();

  // Runs all configured cycles; shuts the minions down at the end.
  RunSummary run_training();
  // One deterministic episode from the hanging rest position on one minion.
  std::optional<ValidationRecord> run_validation(std::uint64_t cycle);

 private:
  MasterConfig config_;
  ResultWriter writer_;
  MinionServer server_;
  std::unique_ptr<Agent> agent_;
  CycleObserver observer_;
  ValidationObserver validation_observer_;
  std::atomic<bool> stop_{false};
};

// In-process minions, handy for single-machine runs and tests.
class LocalMinions {
 public:
  LocalMinions(std::uint16_t port, int count, std::uint64_t seed,
               const std::string& id_prefix = "local");
  ~LocalMinions();
  env::Minion& at(std::size_t i) { return *minions_.at(i); }
  std::size_t size() const { return minions_.size(); }
  void stop();

 private:
  std::vector<std::unique_ptr<env::Minion>> minions_;
  std::vector<std::thread> threads_;
};

}  // namespace rlcycle::master
