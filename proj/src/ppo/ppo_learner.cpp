#include "rlcycle/ppo/ppo_learner.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "rlcycle/errors.hpp"
#include "rlcycle/nn/batch_kernels.hpp"
#include "rlcycle/ppo/ppo_loss.hpp"

namespace rlcycle::ppo {

using nlohmann::json;

void PpoConfig::validate() const {
  if (!(clip_param > 0.0)) throw DomainError("clip_param must be > 0");
  if (!(gamma > 0.0 && gamma <= 1.0)) throw DomainError("gamma must lie in (0, 1]");
  if (lambda < 0.0 || lambda > 1.0) throw DomainError("lambda must lie in [0, 1]");
  if (sgd_iters < 1) throw DomainError("sgd_iters must be >= 1");
  if (minibatch_size < 1) throw DomainError("minibatch_size must be >= 1");
  if (!(learning_rate > 0.0)) throw DomainError("learning_rate must be > 0");
  if (!(vf_clip_param > 0.0)) throw DomainError("vf_clip_param must be > 0");
}

json to_json(const PpoConfig& c) {
  return {{"gamma", c.gamma},
          {"lambda", c.lambda},
          {"clip_param", c.clip_param},
          {"kl_coeff", c.initial_kl_coeff},
          {"kl_target", c.kl_target},
          {"vf_loss_coeff", c.vf_loss_coeff},
          {"entropy_coeff", c.entropy_coeff},
          {"vf_clip_param", c.vf_clip_param},
          {"lr", c.learning_rate},
          {"train_batch_size", c.train_batch_size},
          {"sgd_minibatch_size", c.minibatch_size},
          {"num_sgd_iter", c.sgd_iters},
          {"policy_hidden", c.policy_hidden},
          {"vf_hidden", c.vf_hidden},
          {"activation", nn::to_string(c.activation)}};
}

PpoConfig ppo_config_from_json(const json& j) {
  PpoConfig c;
  if (!j.is_object()) throw ParseError("ppo config must be an object");
  try {
    c.gamma = j.value("gamma", c.gamma);
    c.lambda = j.value("lambda", c.lambda);
    c.clip_param = j.value("clip_param", c.clip_param);
    c.initial_kl_coeff = j.value("kl_coeff", c.initial_kl_coeff);
    c.kl_target = j.value("kl_target", c.kl_target);
    c.vf_loss_coeff = j.value("vf_loss_coeff", c.vf_loss_coeff);
    c.entropy_coeff = j.value("entropy_coeff", c.entropy_coeff);
    c.vf_clip_param = j.value("vf_clip_param", c.vf_clip_param);
    c.learning_rate = j.value("lr", c.learning_rate);
    c.train_batch_size = j.value("train_batch_size", c.train_batch_size);
    c.minibatch_size = j.value("sgd_minibatch_size", c.minibatch_size);
    c.sgd_iters = j.value("num_sgd_iter", c.sgd_iters);
    c.policy_hidden = j.value("policy_hidden", c.policy_hidden);
    c.vf_hidden = j.value("vf_hidden", c.vf_hidden);
    c.activation = nn::activation_from_string(
        j.value("activation", std::string(nn::to_string(c.activation))));
  } catch (const json::exception& e) {
    throw ParseError(std::string("bad ppo config: ") + e.what());
  }
  try {
    c.validate();
  } catch (const DomainError& e) {
    throw ParseError(e.what());
  }
  return c;
}

GaussianDist policy_forward(const nn::Network& policy, std::span<const double> obs) {
  return GaussianDist::from_output(policy.forward(obs));
}

void postprocess_rollout(rl::Trajectory& traj, const nn::Network& policy,
                         const nn::Network& vf) {
  if (traj.empty()) return;
  nn::Matrix obs(traj.size(), traj.experiences.front().obs.size());
  for (std::size_t r = 0; r < traj.size(); ++r) {
    const auto& o = traj.experiences[r].obs;
    if (o.size() != obs.cols()) throw ShapeError("observation width varies in episode");
    std::copy(o.begin(), o.end(), obs.row(r).begin());
  }
  const nn::Matrix heads = nn::batch_forward(policy, obs);
  const nn::Matrix values = nn::batch_forward(vf, obs);
  for (std::size_t r = 0; r < traj.size(); ++r) {
    auto& e = traj.experiences[r];
    const GaussianDist dist = GaussianDist::from_output(heads.row(r));
    e.aux[rl::aux::kVfPred] = values(r, 0);
    e.aux[rl::aux::kActionLogp] = log_prob(dist, e.action);
    e.aux[rl::aux::kDistMean] = dist.mean;
    e.aux[rl::aux::kDistLogStd] = dist.log_std;
  }
}

namespace {

nn::OptimizerSettings adam(double lr) {
  nn::OptimizerSettings s;
  s.kind = nn::OptimizerKind::kAdam;
  s.learning_rate = lr;
  return s;
}

}  // namespace

PpoLearner::PpoLearner(PpoConfig config, std::size_t obs_dims, std::size_t action_dims,
                       std::uint64_t seed)
    : config_(std::move(config)), kl_coeff_(config_.initial_kl_coeff), rng_(seed) {
  config_.validate();
  policy_ = nn::Network::mlp(obs_dims, config_.policy_hidden, 2 * action_dims,
                             config_.activation, rng_);
  vf_ = nn::Network::mlp(obs_dims, config_.vf_hidden, 1, config_.activation, rng_);
  policy_opt_ = nn::Optimizer(adam(config_.learning_rate), policy_.parameter_count());
  vf_opt_ = nn::Optimizer(adam(config_.learning_rate), vf_.parameter_count());
}

PpoLearner::PpoLearner(PpoConfig config, nn::Network policy, nn::Network vf,
                       std::uint64_t seed)
    : config_(std::move(config)),
      policy_(std::move(policy)),
      vf_(std::move(vf)),
      kl_coeff_(config_.initial_kl_coeff),
      rng_(seed) {
  config_.validate();
  if (policy_.input_size() != vf_.input_size()) {
    throw ShapeError("policy and value networks disagree on observation width");
  }
  if (vf_.output_size() != 1) throw ShapeError("value network must have one output");
  policy_opt_ = nn::Optimizer(adam(config_.learning_rate), policy_.parameter_count());
  vf_opt_ = nn::Optimizer(adam(config_.learning_rate), vf_.parameter_count());
}

rl::TrainBatch PpoLearner::build_batch(std::vector<rl::Trajectory> episodes) const {
  std::vector<double> bootstrap(episodes.size(), 0.0);
  for (std::size_t i = 0; i < episodes.size(); ++i) {
    postprocess_rollout(episodes[i], policy_, vf_);
    if (!episodes[i].empty() && !episodes[i].terminal()) {
      bootstrap[i] = vf_.forward(episodes[i].experiences.back().next_obs)[0];
    }
  }
  return rl::assemble_train_batch(episodes, rl::Algorithm::kPpo,
                                  {config_.gamma, config_.lambda}, bootstrap);
}

rl::TrainBatch standardize_advantages(const rl::TrainBatch& batch) {
  if (!batch.ppo) throw ContractError("advantage standardisation needs a PPO batch");
  rl::TrainBatch out = batch;
  auto& adv = out.ppo->advantages;
  if (adv.empty()) return out;
  const double n = static_cast<double>(adv.size());
  const double mean = std::accumulate(adv.begin(), adv.end(), 0.0) / n;
  double var = 0.0;
  for (double a : adv) var += (a - mean) * (a - mean);
  const double std_dev = std::sqrt(var / n);
  for (double& a : adv) {
    a -= mean;
    if (std_dev > 1e-12) a /= std_dev;
  }
  return out;
}

PpoTrainStats PpoLearner::train_on_batch(const rl::TrainBatch& batch) {
  PpoTrainStats stats;
  stats.kl_coeff = kl_coeff_;
  if (!batch.valid_for_training()) return stats;
  if (!batch.ppo) throw ContractError("PPO training needs a PPO batch");

  const rl::TrainBatch data = standardize_advantages(batch);
  const nn::Network policy_backup = policy_;
  const nn::Network vf_backup = vf_;
  const nn::Optimizer policy_opt_backup = policy_opt_;
  const nn::Optimizer vf_opt_backup = vf_opt_;

  std::vector<std::size_t> order(data.size());
  std::iota(order.begin(), order.end(), 0);
  const std::size_t mb = config_.minibatch_size;
  double loss_sum = 0.0;

  for (std::size_t iter = 0; iter < config_.sgd_iters; ++iter) {
    std::shuffle(order.begin(), order.end(), rng_);
    double kl = 0.0, ent = 0.0, clip = 0.0, vfl = 0.0;
    std::size_t rows_seen = 0;
    for (std::size_t start = 0; start < order.size(); start += mb) {
      const std::size_t end = std::min(start + mb, order.size());
      const std::span<const std::size_t> rows(order.data() + start, end - start);
      const rl::TrainBatch minibatch = data.select(rows);
      const PpoLossResult res =
          ppo_total_loss(policy_, vf_, minibatch, kl_coeff_, config_, true);
      bool ok = std::isfinite(res.loss);
      if (ok) {
        try {
          policy_opt_.apply(policy_, res.policy_grads, nn::Direction::kMinimize);
          vf_opt_.apply(vf_, res.vf_grads, nn::Direction::kMinimize);
        } catch (const NumericError&) {
          ok = false;
        }
      }
      if (!ok || !policy_.all_finite() || !vf_.all_finite()) {
        policy_ = policy_backup;
        vf_ = vf_backup;
        policy_opt_ = policy_opt_backup;
        vf_opt_ = vf_opt_backup;
        stats.aborted = true;
        stats.kl_coeff = kl_coeff_;
        return stats;
      }
      ++stats.gradient_steps;
      loss_sum += res.loss;
      const double w = static_cast<double>(rows.size());
      kl += res.stats.mean_kl * w;
      ent += res.stats.mean_entropy * w;
      clip += res.stats.clip_fraction * w;
      vfl += res.stats.mean_vf_loss * w;
      rows_seen += rows.size();
    }
    const double inv = 1.0 / static_cast<double>(rows_seen);
    stats.mean_kl = kl * inv;
    stats.mean_entropy = ent * inv;
    stats.clip_fraction = clip * inv;
    stats.mean_vf_loss = vfl * inv;
  }
  stats.mean_loss = loss_sum / static_cast<double>(stats.gradient_steps);
  kl_coeff_ = update_kl_coefficient(kl_coeff_, stats.mean_kl, config_.kl_target);
  stats.kl_coeff = kl_coeff_;
  return stats;
}

}  // namespace rlcycle::ppo
