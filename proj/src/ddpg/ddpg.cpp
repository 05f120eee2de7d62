#include "rlcycle/ddpg/ddpg.hpp"

#include <cmath>
#include <string>

#include "rlcycle/errors.hpp"

namespace rlcycle::ddpg {

using nlohmann::json;

void DdpgConfig::validate() const {
  if (!(gamma >= 0.0 && gamma <= 1.0)) throw DomainError("gamma must lie in [0, 1]");
  if (!(tau > 0.0 && tau < 1.0)) throw DomainError("tau must lie in (0, 1)");
  if (!(actor_lr > 0.0) || !(critic_lr > 0.0)) throw DomainError("learning rates must be > 0");
  if (!(huber_threshold > 0.0)) throw DomainError("huber_threshold must be > 0");
  if (train_batch_size == 0) throw DomainError("train_batch_size must be > 0");
  if (replay_capacity < learning_starts) {
    throw DomainError("replay_capacity must be >= learning_starts");
  }
  if (replay_capacity < train_batch_size) {
    throw DomainError("replay_capacity must be >= train_batch_size");
  }
  if (!(replay_fraction_per_cycle >= 0.0)) {
    throw DomainError("replay_fraction_per_cycle must be >= 0");
  }
  if (!(exploration_sigma >= 0.0)) throw DomainError("exploration_sigma must be >= 0");
}

json to_json(const DdpgConfig& c) {
  return {{"gamma", c.gamma},
          {"tau", c.tau},
          {"actor_lr", c.actor_lr},
          {"critic_lr", c.critic_lr},
          {"huber_threshold", c.huber_threshold},
          {"replay_buffer_capacity", c.replay_capacity},
          {"train_batch_size", c.train_batch_size},
          {"experiences_per_cycle", c.experiences_per_cycle},
          {"learning_starts", c.learning_starts},
          {"replay_fraction_per_cycle", c.replay_fraction_per_cycle},
          {"replay_schedule", to_string(c.replay_schedule)},
          {"exploration_sigma", c.exploration_sigma},
          {"actor_hidden", c.actor_hidden},
          {"critic_hidden", c.critic_hidden},
          {"activation", nn::to_string(c.activation)}};
}

DdpgConfig ddpg_config_from_json(const json& j) {
  DdpgConfig c;
  if (!j.is_object()) throw ParseError("ddpg config must be an object");
  try {
    c.gamma = j.value("gamma", c.gamma);
    c.tau = j.value("tau", c.tau);
    c.actor_lr = j.value("actor_lr", c.actor_lr);
    c.critic_lr = j.value("critic_lr", c.critic_lr);
    c.huber_threshold = j.value("huber_threshold", c.huber_threshold);
    c.replay_capacity = j.value("replay_buffer_capacity", c.replay_capacity);
    c.train_batch_size = j.value("train_batch_size", c.train_batch_size);
    c.experiences_per_cycle = j.value("experiences_per_cycle", c.experiences_per_cycle);
    c.learning_starts = j.value("learning_starts", c.learning_starts);
    c.replay_fraction_per_cycle =
        j.value("replay_fraction_per_cycle", c.replay_fraction_per_cycle);
    c.replay_schedule = replay_schedule_from_string(
        j.value("replay_schedule", std::string(to_string(c.replay_schedule))));
    c.exploration_sigma = j.value("exploration_sigma", c.exploration_sigma);
    c.actor_hidden = j.value("actor_hidden", c.actor_hidden);
    c.critic_hidden = j.value("critic_hidden", c.critic_hidden);
    c.activation = nn::activation_from_string(
        j.value("activation", std::string(nn::to_string(c.activation))));
  } catch (const json::exception& e) {
    throw ParseError(std::string("bad ddpg config: ") + e.what());
  }
  try {
    c.validate();
  } catch (const DomainError& e) {
    throw ParseError(e.what());
  }
  return c;
}

std::vector<double> explore_action(const nn::Network& actor, std::span<const double> obs,
                                   double sigma, std::mt19937_64& rng) {
  std::vector<double> u = actor.forward(obs);
  if (sigma > 0.0) {
    std::normal_distribution<double> noise(0.0, sigma);
    for (double& x : u) x += noise(rng);
  }
  return u;
}

nn::Matrix critic_inputs(const nn::Matrix& obs, const nn::Matrix& actions) {
  if (obs.rows() != actions.rows()) throw ShapeError("obs/action row mismatch");
  nn::Matrix in(obs.rows(), obs.cols() + actions.cols());
  for (std::size_t r = 0; r < obs.rows(); ++r) {
    auto dst = in.row(r);
    const auto o = obs.row(r);
    const auto a = actions.row(r);
    std::copy(o.begin(), o.end(), dst.begin());
    std::copy(a.begin(), a.end(), dst.begin() + static_cast<std::ptrdiff_t>(o.size()));
  }
  return in;
}

std::vector<double> q_targets(const rl::TrainBatch& batch, const nn::Network& target_actor,
                              const nn::Network& target_critic, double gamma,
                              nn::Backend backend) {
  const nn::Matrix next_actions = nn::batch_forward(target_actor, batch.next_obs, backend);
  const nn::Matrix next_q =
      nn::batch_forward(target_critic, critic_inputs(batch.next_obs, next_actions), backend);
  std::vector<double> y(batch.size());
  for (std::size_t r = 0; r < batch.size(); ++r) {
    const double not_done = batch.dones[r] ? 0.0 : 1.0;
    y[r] = batch.rewards[r] + gamma * not_done * next_q(r, 0);
  }
  return y;
}

double huber(double error, double threshold) {
  const double a = std::abs(error);
  return a <= threshold ? 0.5 * error * error : threshold * (a - 0.5 * threshold);
}

CriticLoss critic_loss(const rl::TrainBatch& batch, const ActorCritic& nets,
                       const DdpgConfig& config, bool want_grads, nn::Backend backend) {
  const std::size_t n = batch.size();
  if (n == 0) throw ContractError("critic loss on an empty batch");
  const std::vector<double> y =
      q_targets(batch, nets.target_actor, nets.target_critic, config.gamma, backend);
  const nn::Matrix inputs = critic_inputs(batch.obs, batch.actions);
  const nn::Matrix q = nn::batch_forward(nets.critic, inputs, backend);

  const double inv_n = 1.0 / static_cast<double>(n);
  const double delta = config.huber_threshold;
  CriticLoss out;
  nn::Matrix out_grad(n, 1);
  for (std::size_t r = 0; r < n; ++r) {
    const double e = q(r, 0) - y[r];
    out.loss += huber(e, delta);
    out.mean_abs_td_error += std::abs(e);
    const double slope = std::abs(e) <= delta ? e : (e > 0.0 ? delta : -delta);
    out_grad(r, 0) = slope * inv_n;
  }
  out.loss *= inv_n;
  out.mean_abs_td_error *= inv_n;
  if (want_grads) {
    out.grads = nn::batch_backward(nets.critic, inputs, out_grad, false, backend)
                    .parameter_grads;
  }
  return out;
}

ActorObjective actor_objective(const nn::Matrix& obs, const nn::Network& actor,
                               const nn::Network& critic, bool want_grads,
                               nn::Backend backend) {
  const std::size_t n = obs.rows();
  if (n == 0) throw ContractError("actor objective on an empty batch");
  const nn::Matrix actions = nn::batch_forward(actor, obs, backend);
  const nn::Matrix inputs = critic_inputs(obs, actions);
  const nn::Matrix q = nn::batch_forward(critic, inputs, backend);
  const double inv_n = 1.0 / static_cast<double>(n);
  ActorObjective out;
  for (std::size_t r = 0; r < n; ++r) out.mean_q += q(r, 0);
  out.mean_q *= inv_n;
  if (!want_grads) return out;

  const nn::Matrix seed(n, 1, inv_n);
  const nn::BatchGradient through_critic =
      nn::batch_backward(critic, inputs, seed, true, backend);
  nn::Matrix dq_da(n, actions.cols());
  for (std::size_t r = 0; r < n; ++r) {
    const auto g = through_critic.input_grads.row(r);
    std::copy(g.begin() + static_cast<std::ptrdiff_t>(obs.cols()), g.end(),
              dq_da.row(r).begin());
  }
  out.grads = nn::batch_backward(actor, obs, dq_da, false, backend).parameter_grads;
  return out;
}

bool actor_update(const rl::TrainBatch& batch, nn::Network& actor,
                  const nn::Network& critic, nn::Optimizer& opt) {
  const ActorObjective obj = actor_objective(batch.obs, actor, critic, true);
  try {
    opt.apply(actor, obj.grads, nn::Direction::kMaximize);
  } catch (const NumericError&) {
    return false;
  }
  return true;
}

void polyak_update(nn::Network& target, const nn::Network& online, double rho) {
  if (target.layers() != online.layers()) {
    throw ShapeError("target and online networks differ in shape");
  }
  auto t = target.parameters();
  const auto o = online.parameters();
  for (std::size_t i = 0; i < t.size(); ++i) t[i] = rho * o[i] + (1.0 - rho) * t[i];
}

std::string_view to_string(ReplaySchedule s) {
  return s == ReplaySchedule::kTimesteps ? "timesteps" : "samples";
}

ReplaySchedule replay_schedule_from_string(std::string_view s) {
  if (s == "timesteps") return ReplaySchedule::kTimesteps;
  if (s == "samples") return ReplaySchedule::kSamples;
  throw ParseError("unknown replay_schedule: " + std::string(s));
}

std::size_t planned_replay_steps(std::size_t buffer_size, const DdpgConfig& config) {
  if (buffer_size < config.learning_starts || buffer_size < config.train_batch_size) {
    return 0;
  }
  const double replayed = config.replay_fraction_per_cycle * static_cast<double>(buffer_size);
  if (config.replay_schedule == ReplaySchedule::kTimesteps) {
    return static_cast<std::size_t>(std::ceil(replayed));
  }
  return static_cast<std::size_t>(
      std::ceil(replayed / static_cast<double>(config.train_batch_size)));
}

namespace {

nn::OptimizerSettings adam(double lr) {
  nn::OptimizerSettings s;
  s.kind = nn::OptimizerKind::kAdam;
  s.learning_rate = lr;
  return s;
}

ActorCritic build_nets(const DdpgConfig& c, std::size_t obs_dims, std::size_t action_dims,
                       std::mt19937_64& rng) {
  ActorCritic nets;
  nets.actor = nn::Network::mlp(obs_dims, c.actor_hidden, action_dims, c.activation, rng);
  nets.critic =
      nn::Network::mlp(obs_dims + action_dims, c.critic_hidden, 1, c.activation, rng);
  nets.target_actor = nets.actor;
  nets.target_critic = nets.critic;
  return nets;
}

}  // namespace

DdpgLearner::DdpgLearner(DdpgConfig config, std::size_t obs_dims, std::size_t action_dims,
                         std::uint64_t seed)
    : config_(std::move(config)), buffer_(config_.replay_capacity), rng_(seed) {
  config_.validate();
  nets_ = build_nets(config_, obs_dims, action_dims, rng_);
  actor_opt_ = nn::Optimizer(adam(config_.actor_lr), nets_.actor.parameter_count());
  critic_opt_ = nn::Optimizer(adam(config_.critic_lr), nets_.critic.parameter_count());
}

DdpgLearner::DdpgLearner(DdpgConfig config, ActorCritic nets, std::uint64_t seed)
    : config_(std::move(config)),
      nets_(std::move(nets)),
      buffer_(config_.replay_capacity),
      rng_(seed) {
  config_.validate();
  if (nets_.critic.input_size() != nets_.actor.input_size() + nets_.actor.output_size()) {
    throw ShapeError("critic input must be obs width + action width");
  }
  actor_opt_ = nn::Optimizer(adam(config_.actor_lr), nets_.actor.parameter_count());
  critic_opt_ = nn::Optimizer(adam(config_.critic_lr), nets_.critic.parameter_count());
}

DdpgTrainStats DdpgLearner::train_step(const rl::TrainBatch& batch) {
  DdpgTrainStats stats;
  const CriticLoss closs = critic_loss(batch, nets_, config_, true);
  bool critic_ok = std::isfinite(closs.loss);
  if (critic_ok) {
    try {
      critic_opt_.apply(nets_.critic, closs.grads, nn::Direction::kMinimize);
    } catch (const NumericError&) {
      critic_ok = false;
    }
  }
  if (!actor_update(batch, nets_.actor, nets_.critic, actor_opt_)) {
    ++stats.skipped_actor_steps;
  }
  polyak_update(nets_.target_critic, nets_.critic, config_.tau);
  polyak_update(nets_.target_actor, nets_.actor, config_.tau);
  stats.steps = 1;
  stats.mean_critic_loss = critic_ok ? closs.loss : 0.0;
  stats.mean_abs_td_error = critic_ok ? closs.mean_abs_td_error : 0.0;
  return stats;
}

DdpgTrainStats DdpgLearner::cycle_train() {
  DdpgTrainStats total;
  const std::size_t steps = planned_replay_steps(buffer_.size(), config_);
  for (std::size_t i = 0; i < steps; ++i) {
    const rl::TrainBatch batch = buffer_.sample(config_.train_batch_size, rng_);
    const DdpgTrainStats s = train_step(batch);
    total.steps += s.steps;
    total.skipped_actor_steps += s.skipped_actor_steps;
    total.mean_critic_loss += s.mean_critic_loss;
    total.mean_abs_td_error += s.mean_abs_td_error;
  }
  if (total.steps > 0) {
    const double inv = 1.0 / static_cast<double>(total.steps);
    total.mean_critic_loss *= inv;
    total.mean_abs_td_error *= inv;
    if (buffer_.size() >= config_.train_batch_size) {
      const rl::TrainBatch probe = buffer_.sample(config_.train_batch_size, rng_);
      total.mean_q = actor_objective(probe.obs, nets_.actor, nets_.critic, false).mean_q;
    }
  }
  return total;
}

}  // namespace rlcycle::ddpg
