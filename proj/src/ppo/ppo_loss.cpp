#include "rlcycle/ppo/ppo_loss.hpp"

#include <algorithm>
#include <cmath>

#include "rlcycle/errors.hpp"

namespace rlcycle::ppo {

double clip_objective(double ratio, double advantage, double clip_param) {
  const double clipped = std::clamp(ratio, 1.0 - clip_param, 1.0 + clip_param);
  return std::min(clipped * advantage, ratio * advantage);
}

double kl_penalty_term(const GaussianDist& old, const GaussianDist& next, double ratio,
                       double advantage, double beta) {
  return ratio * advantage - beta * kl_divergence(old, next);
}

double vf_loss(double vf_pred, double value_target, double vf_clip_param) {
  const double err = vf_pred - value_target;
  return std::clamp(err * err, 0.0, vf_clip_param);
}

double update_kl_coefficient(double beta, double mean_kl, double kl_target) {
  if (mean_kl > 2.0 * kl_target) return beta * 1.5;
  if (mean_kl < 0.5 * kl_target) return beta / 1.5;
  return beta;
}

PpoLossResult ppo_total_loss(const nn::Network& policy, const nn::Network& vf,
                             const rl::TrainBatch& mb, double beta,
                             const PpoConfig& config, bool want_grads,
                             nn::Backend backend) {
  if (!mb.ppo) throw ContractError("PPO loss needs the PPO batch columns");
  const auto& cols = *mb.ppo;
  const std::size_t n = mb.size();
  if (n == 0) throw ContractError("PPO loss on an empty minibatch");
  const std::size_t act_dims = mb.actions.cols();
  if (policy.output_size() != 2 * act_dims) {
    throw ShapeError("policy head must output mean and log_std per action dimension");
  }
  if (vf.output_size() != 1) throw ShapeError("value network must have one output");
  if (cols.advantages.size() != n || cols.value_targets.size() != n ||
      cols.action_logp.size() != n || cols.dist_mean.rows() != n ||
      cols.dist_log_std.rows() != n) {
    throw ContractError("PPO batch columns have unequal lengths");
  }

  const nn::Matrix policy_out = nn::batch_forward(policy, mb.obs, backend);
  const nn::Matrix vf_out = nn::batch_forward(vf, mb.obs, backend);

  nn::Matrix policy_out_grad(n, policy.output_size());
  nn::Matrix vf_out_grad(n, 1);
  const double inv_n = 1.0 / static_cast<double>(n);
  const double eps = config.clip_param;

  PpoLossResult result;
  double total = 0.0;
  std::size_t clipped = 0;
  for (std::size_t r = 0; r < n; ++r) {
    const auto out = policy_out.row(r);
    const GaussianDist next = GaussianDist::from_output(out);
    const auto old_mean = cols.dist_mean.row(r);
    const auto old_log_std = cols.dist_log_std.row(r);
    const GaussianDist old({old_mean.begin(), old_mean.end()},
                           {old_log_std.begin(), old_log_std.end()});
    const auto action = mb.actions.row(r);
    const double adv = cols.advantages[r];

    const double logp = log_prob(next, action);
    const double ratio = std::exp(logp - cols.action_logp[r]);
    const double surrogate = clip_objective(ratio, adv, eps);
    const double kl = kl_divergence(old, next);
    const double ent = entropy(next);
    const double v = vf_out(r, 0);
    const double vfl = vf_loss(v, cols.value_targets[r], config.vf_clip_param);

    const double objective = surrogate + (ratio * adv - beta * kl) -
                             config.vf_loss_coeff * vfl + config.entropy_coeff * ent;
    total -= objective;
    result.stats.mean_kl += kl;
    result.stats.mean_entropy += ent;
    result.stats.mean_surrogate += surrogate;
    result.stats.mean_vf_loss += vfl;
    if (std::abs(ratio - 1.0) > eps) ++clipped;

    if (!want_grads) continue;

    // d(surrogate)/d(ratio): the unclipped branch carries the slope.
    const double clipped_term = std::clamp(ratio, 1.0 - eps, 1.0 + eps) * adv;
    const double d_surrogate = ratio * adv <= clipped_term ? adv : 0.0;
    const double d_ratio = -(d_surrogate + adv);  // dL/d(ratio)
    const double d_logp = d_ratio * ratio;

    auto g = policy_out_grad.row(r);
    for (std::size_t d = 0; d < act_dims; ++d) {
      const double ls = next.log_std[d];
      const double sigma = std::exp(ls);
      const double var_new = std::exp(2.0 * ls);
      const double z = (action[d] - next.mean[d]) / sigma;
      const double dm = next.mean[d] - old.mean[d];
      const double var_old = std::exp(2.0 * old.log_std[d]);

      const double dlogp_dmean = z / sigma;
      const double dlogp_dls = z * z - 1.0;
      const double dkl_dmean = dm / var_new;
      const double dkl_dls = 1.0 - (var_old + dm * dm) / var_new;

      g[d] = (d_logp * dlogp_dmean + beta * dkl_dmean) * inv_n;
      // log_std is clamped; the clamp passes no gradient outside its range.
      const double raw = out[act_dims + d];
      const bool active = raw >= kMinLogStd && raw <= kMaxLogStd;
      g[act_dims + d] =
          active ? (d_logp * dlogp_dls + beta * dkl_dls - config.entropy_coeff) * inv_n
                 : 0.0;
    }
    const double err = v - cols.value_targets[r];
    const double dvf = err * err < config.vf_clip_param ? 2.0 * err : 0.0;
    vf_out_grad(r, 0) = config.vf_loss_coeff * dvf * inv_n;
  }

  result.loss = total * inv_n;
  result.stats.mean_kl *= inv_n;
  result.stats.mean_entropy *= inv_n;
  result.stats.mean_surrogate *= inv_n;
  result.stats.mean_vf_loss *= inv_n;
  result.stats.clip_fraction = static_cast<double>(clipped) * inv_n;

  if (want_grads) {
    result.policy_grads =
        nn::batch_backward(policy, mb.obs, policy_out_grad, false, backend).parameter_grads;
    result.vf_grads =
        nn::batch_backward(vf, mb.obs, vf_out_grad, false, backend).parameter_grads;
  }
  return result;
}

}  // namespace rlcycle::ppo
