#include "rlcycle/master/master.hpp"

#include <chrono>
#include <cmath>

#include <spdlog/spdlog.h>

#include "rlcycle/env/pendulum.hpp"
#include "rlcycle/errors.hpp"
#include "rlcycle/hash.hpp"
#include "rlcycle/rl/returns.hpp"

namespace rlcycle::master {

namespace {

constexpr std::uint64_t kLearnerStream = 0x1ea4e5;
constexpr std::uint64_t kValidationIndex = 1u << 20;

ServerSettings server_settings(const MasterConfig& c) {
  ServerSettings s;
  s.host = c.host;
  s.port = static_cast<std::uint16_t>(c.port);
  s.heartbeat_interval = wire::Seconds(c.heartbeat_interval);
  s.monitor.heartbeat_timeout = wire::Seconds(c.heartbeat_timeout);
  s.monitor.task_deadline = wire::Seconds(c.task_deadline);
  s.monitor_period = wire::Seconds(c.monitor_period);
  s.space = c.space;
  return s;
}

}  // namespace

PpoAgent::PpoAgent(const ppo::PpoConfig& config, const rl::SpaceSpec& space, std::uint64_t seed)
    : learner_(config, space.obs_dims(), space.action_dims(), derive_seed(seed, kLearnerStream)) {}

env::PolicySnapshot PpoAgent::snapshot() const {
  return env::make_snapshot(rl::Algorithm::kPpo, learner_.policy(), 0.0);
}

void PpoAgent::train(std::vector<rl::Trajectory> episodes, CycleStats& stats) {
  const rl::TrainBatch batch = learner_.build_batch(std::move(episodes));
  const ppo::PpoTrainStats t = learner_.train_on_batch(batch);
  stats.gradient_steps = t.gradient_steps;
  stats.loss = t.mean_loss;
  stats.kl_or_td = t.mean_kl;
  if (t.aborted) spdlog::warn("cycle {}: PPO update aborted (non-finite loss)", stats.cycle);
}

DdpgAgent::DdpgAgent(const ddpg::DdpgConfig& config, const rl::SpaceSpec& space,
                     std::uint64_t seed)
    : learner_(config, space.obs_dims(), space.action_dims(), derive_seed(seed, kLearnerStream)) {}

env::PolicySnapshot DdpgAgent::snapshot() const {
  return env::make_snapshot(rl::Algorithm::kDdpg, learner_.policy(),
                            learner_.config().exploration_sigma);
}

void DdpgAgent::train(std::vector<rl::Trajectory> episodes, CycleStats& stats) {
  for (auto& ep : episodes) learner_.buffer().add(ep.experiences);
  const ddpg::DdpgTrainStats t = learner_.cycle_train();
  stats.gradient_steps = t.steps;
  stats.loss = t.mean_critic_loss;
  stats.kl_or_td = t.mean_abs_td_error;
}

std::unique_ptr<Agent> make_agent(const MasterConfig& config) {
  if (config.algorithm == rl::Algorithm::kPpo) {
    return std::make_unique<PpoAgent>(config.ppo, config.space, config.seed);
  }
  return std::make_unique<DdpgAgent>(config.ddpg, config.space, config.seed);
}

std::uint64_t episode_seed(std::uint64_t master_seed, std::uint64_t cycle, std::uint64_t index) {
  return derive_seed(master_seed, cycle, index);
}

Master::Master(MasterConfig config)
    : config_((config.validate(), std::move(config))),
      writer_(config_.output_dir),
      server_(server_settings(config_)),
      agent_(make_agent(config_)) {
  writer_.write_config(config_);
}

Master::~Master() { server_.stop(); }

void Master::request_stop() {
  stop_ = true;
  server_.stop();
}

std::optional<ValidationRecord> Master::run_validation(std::uint64_t cycle) {
  CollectRequest req;
  req.cycle = cycle;
  req.validation = true;
  req.snapshot = agent_->snapshot();
  req.episodes = {{0, episode_seed(config_.seed, cycle, kValidationIndex)}};
  req.episode_length = config_.episode_length;
  req.initial = env::InitialConditions{M_PI, 0.0};
  auto episodes = server_.collect(req);
  if (!episodes) return std::nullopt;
  ValidationRecord rec;
  rec.cycle = cycle;
  rec.episode_return = rl::discounted_return(episodes->front(), 1.0);
  rec.trace = validation_trace(episodes->front(), config_.space);
  writer_.append_validation(cycle, rec.episode_return);
  writer_.write_trace(cycle, rec.trace);
  return rec;
}

RunSummary Master::run_training() {
  RunSummary summary;
  if (config_.total_cycles == 0) {
    server_.stop();
    return summary;
  }
  server_.start();
  spdlog::info("master listening on port {}", server_.port());
  while (!stop_ && !server_.wait_for_minions(1, wire::Seconds(1.0))) {
  }

  for (std::uint64_t cycle = 1; cycle <= config_.total_cycles && !stop_; ++cycle) {
    const auto t0 = std::chrono::steady_clock::now();
    CollectRequest req;
    req.cycle = cycle;
    req.snapshot = agent_->snapshot();
    req.episode_length = config_.episode_length;
    for (int i = 0; i < config_.episodes_per_cycle; ++i) {
      const auto idx = static_cast<std::uint64_t>(i);
      req.episodes.push_back({idx, episode_seed(config_.seed, cycle, idx)});
    }
    std::optional<std::vector<rl::Trajectory>> episodes;
    do {
      episodes = server_.collect(req);
    } while (episodes && episodes->empty() && !stop_);
    if (!episodes) break;

    if (observer_) observer_(cycle, *episodes);
    CycleStats stats = summarize_cycle(cycle, *episodes);
    agent_->train(std::move(*episodes), stats);
    stats.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    writer_.append_training(stats);
    spdlog::info("cycle {}: mean return {:.2f} ({} steps)", cycle, stats.mean_return,
                 stats.gradient_steps);

    if (cycle % static_cast<std::uint64_t>(config_.validation_interval) == 0) {
      auto rec = run_validation(cycle);
      if (!rec) break;
      spdlog::info("cycle {}: validation return {:.2f}", cycle, rec->episode_return);
      if (validation_observer_) validation_observer_(*rec);
      summary.validations.push_back(std::move(*rec));
    }
    if (cycle % static_cast<std::uint64_t>(config_.checkpoint_interval) == 0) {
      writer_.write_checkpoint(cycle, agent_->policy());
    }
    summary.cycles.push_back(std::move(stats));
    summary.cycles_completed = cycle;
  }
  summary.interrupted = summary.cycles_completed < config_.total_cycles;
  writer_.write_final(agent_->policy());
  server_.stop();
  return summary;
}

LocalMinions::LocalMinions(std::uint16_t port, int count, std::uint64_t seed,
                           const std::string& id_prefix) {
  for (int i = 0; i < count; ++i) {
    env::MinionOptions o;
    o.port = port;
    o.minion_id = id_prefix + "-" + std::to_string(i);
    o.seed = derive_seed(seed, static_cast<std::uint64_t>(i));
    o.backoff_initial = std::chrono::milliseconds(20);
    minions_.push_back(std::make_unique<env::Minion>(o));
  }
  for (auto& m : minions_) threads_.emplace_back([&m] { m->run(); });
}

LocalMinions::~LocalMinions() { stop(); }

void LocalMinions::stop() {
  for (auto& m : minions_) m->request_stop();
  for (auto& t : threads_) {
    if (t.joinable()) t.join();
  }
}

}  // namespace rlcycle::master
