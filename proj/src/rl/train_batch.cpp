#include "rlcycle/rl/train_batch.hpp"

#include <string>

#include "rlcycle/errors.hpp"
#include "rlcycle/rl/returns.hpp"

namespace rlcycle::rl {

std::string_view to_string(Algorithm a) { return a == Algorithm::kPpo ? "ppo" : "ddpg"; }

Algorithm algorithm_from_string(std::string_view name) {
  if (name == "ppo") return Algorithm::kPpo;
  if (name == "ddpg") return Algorithm::kDdpg;
  throw ParseError("unknown algorithm '" + std::string(name) + "'");
}

namespace {

void copy_row(const nn::Matrix& src, std::size_t from, nn::Matrix& dst, std::size_t to) {
  const auto s = src.row(from);
  std::copy(s.begin(), s.end(), dst.row(to).begin());
}

void put_row(nn::Matrix& dst, std::size_t r, const std::vector<double>& v) {
  if (v.size() != dst.cols()) throw ContractError("inconsistent column width in batch");
  std::copy(v.begin(), v.end(), dst.row(r).begin());
}

}  // namespace

TrainBatch TrainBatch::select(std::span<const std::size_t> rows) const {
  TrainBatch out;
  out.algorithm = algorithm;
  const std::size_t n = rows.size();
  out.obs = nn::Matrix(n, obs.cols());
  out.actions = nn::Matrix(n, actions.cols());
  out.next_obs = nn::Matrix(n, next_obs.cols());
  out.rewards.resize(n);
  out.dones.resize(n);
  if (ppo) {
    out.ppo.emplace();
    out.ppo->advantages.resize(n);
    out.ppo->value_targets.resize(n);
    out.ppo->vf_preds.resize(n);
    out.ppo->action_logp.resize(n);
    out.ppo->dist_mean = nn::Matrix(n, ppo->dist_mean.cols());
    out.ppo->dist_log_std = nn::Matrix(n, ppo->dist_log_std.cols());
  }
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t r = rows[i];
    if (r >= size()) throw ContractError("batch row out of range");
    copy_row(obs, r, out.obs, i);
    copy_row(actions, r, out.actions, i);
    copy_row(next_obs, r, out.next_obs, i);
    out.rewards[i] = rewards[r];
    out.dones[i] = dones[r];
    if (ppo) {
      out.ppo->advantages[i] = ppo->advantages[r];
      out.ppo->value_targets[i] = ppo->value_targets[r];
      out.ppo->vf_preds[i] = ppo->vf_preds[r];
      out.ppo->action_logp[i] = ppo->action_logp[r];
      copy_row(ppo->dist_mean, r, out.ppo->dist_mean, i);
      copy_row(ppo->dist_log_std, r, out.ppo->dist_log_std, i);
    }
  }
  return out;
}

TrainBatch assemble_train_batch(std::span<const Trajectory> trajectories,
                                Algorithm algorithm, GaeParams gae,
                                std::span<const double> bootstrap_values) {
  if (!bootstrap_values.empty() && bootstrap_values.size() != trajectories.size()) {
    throw ShapeError("one bootstrap value per trajectory required");
  }
  TrainBatch batch;
  batch.algorithm = algorithm;
  std::size_t rows = 0;
  for (const auto& t : trajectories) rows += t.size();
  if (rows == 0) return batch;

  const Experience* first = nullptr;
  for (const auto& t : trajectories) {
    if (!t.empty()) {
      first = &t.experiences.front();
      break;
    }
  }
  const std::size_t obs_dims = first->obs.size();
  const std::size_t act_dims = first->action.size();
  batch.obs = nn::Matrix(rows, obs_dims);
  batch.actions = nn::Matrix(rows, act_dims);
  batch.next_obs = nn::Matrix(rows, obs_dims);
  batch.rewards.reserve(rows);
  batch.dones.reserve(rows);
  if (algorithm == Algorithm::kPpo) {
    batch.ppo.emplace();
    batch.ppo->dist_mean = nn::Matrix(rows, act_dims);
    batch.ppo->dist_log_std = nn::Matrix(rows, act_dims);
  }

  std::size_t r = 0;
  for (std::size_t ti = 0; ti < trajectories.size(); ++ti) {
    const auto& traj = trajectories[ti];
    std::vector<double> vf_preds;
    for (const auto& e : traj.experiences) {
      put_row(batch.obs, r, e.obs);
      put_row(batch.actions, r, e.action);
      put_row(batch.next_obs, r, e.next_obs);
      batch.rewards.push_back(e.reward);
      batch.dones.push_back(e.done ? 1 : 0);
      if (batch.ppo) {
        vf_preds.push_back(aux_scalar(e, aux::kVfPred));
        batch.ppo->action_logp.push_back(aux_scalar(e, aux::kActionLogp));
        put_row(batch.ppo->dist_mean, r, aux_vector(e, aux::kDistMean));
        put_row(batch.ppo->dist_log_std, r, aux_vector(e, aux::kDistLogStd));
      }
      ++r;
    }
    if (batch.ppo && !traj.empty()) {
      const double bootstrap =
          traj.terminal() || bootstrap_values.empty() ? 0.0 : bootstrap_values[ti];
      const auto est = gae_advantages(traj, vf_preds, bootstrap, gae.gamma, gae.lambda);
      auto& cols = *batch.ppo;
      cols.advantages.insert(cols.advantages.end(), est.advantages.begin(),
                             est.advantages.end());
      cols.value_targets.insert(cols.value_targets.end(), est.value_targets.begin(),
                                est.value_targets.end());
      cols.vf_preds.insert(cols.vf_preds.end(), vf_preds.begin(), vf_preds.end());
    }
  }
  return batch;
}

}  // namespace rlcycle::rl
