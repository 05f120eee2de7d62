#pragma once

// Straight-line reference evaluations used as test oracles. Nothing here calls
// into the library's math; only parameter storage is shared.

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include "rlcycle/nn/network.hpp"
#include "rlcycle/rl/train_batch.hpp"

namespace rlcycle::oracle {

inline std::vector<double> mlp(const nn::Network& net, std::vector<double> x) {
  for (std::size_t l = 0; l < net.layer_count(); ++l) {
    const auto& shape = net.layers()[l];
    const auto w = net.weights(l);
    const auto b = net.biases(l);
    std::vector<double> y(shape.out);
    for (std::size_t o = 0; o < shape.out; ++o) {
      double s = b[o];
      for (std::size_t i = 0; i < shape.in; ++i) s += w[o * shape.in + i] * x[i];
      switch (shape.activation) {
        case nn::Activation::kTanh: y[o] = std::tanh(s); break;
        case nn::Activation::kRelu: y[o] = s > 0.0 ? s : 0.0; break;
        case nn::Activation::kLinear: y[o] = s; break;
      }
    }
    x = std::move(y);
  }
  return x;
}

inline double gaussian_logpdf(double x, double mean, double log_std) {
  const double sigma = std::exp(log_std);
  const double pdf = std::exp(-(x - mean) * (x - mean) / (2.0 * sigma * sigma)) /
                     (sigma * std::sqrt(2.0 * std::numbers::pi));
  return std::log(pdf);
}

// KL(N(m1, s1) || N(m2, s2)) for one dimension
inline double gaussian_kl(double m1, double ls1, double m2, double ls2) {
  const double s1 = std::exp(ls1), s2 = std::exp(ls2);
  return std::log(s2 / s1) + (s1 * s1 + (m1 - m2) * (m1 - m2)) / (2.0 * s2 * s2) - 0.5;
}

inline double gaussian_entropy(double log_std) {
  const double s = std::exp(log_std);
  return 0.5 * std::log(2.0 * std::numbers::pi * std::numbers::e * s * s);
}

struct PpoTerms {
  double clip_param = 0.3;
  double vf_clip = 10000.0;
  double c_vf = 1.0;
  double c_s = 0.0;
};

// -mean(L_clip + L_KL - c_VF L_VF + c_S S) evaluated row by row.
inline double ppo_loss(const nn::Network& policy, const nn::Network& vf,
                       const rl::TrainBatch& b, double beta, const PpoTerms& t) {
  const auto& c = *b.ppo;
  const std::size_t dims = b.actions.cols();
  double sum = 0.0;
  for (std::size_t r = 0; r < b.size(); ++r) {
    const auto obs = b.obs.row(r);
    const std::vector<double> out = mlp(policy, {obs.begin(), obs.end()});
    double logp = 0.0, kl = 0.0, ent = 0.0;
    for (std::size_t d = 0; d < dims; ++d) {
      const double ls = std::min(std::max(out[dims + d], -20.0), 2.0);
      logp += gaussian_logpdf(b.actions(r, d), out[d], ls);
      kl += gaussian_kl(c.dist_mean(r, d), c.dist_log_std(r, d), out[d], ls);
      ent += gaussian_entropy(ls);
    }
    const double ratio = std::exp(logp) / std::exp(c.action_logp[r]);
    const double a = c.advantages[r];
    const double lo = 1.0 - t.clip_param, hi = 1.0 + t.clip_param;
    const double clipped_ratio = ratio < lo ? lo : (ratio > hi ? hi : ratio);
    const double l_clip = std::min(ratio * a, clipped_ratio * a);
    const double l_kl = ratio * a - beta * kl;
    const double v = mlp(vf, {obs.begin(), obs.end()})[0];
    const double sq = (v - c.value_targets[r]) * (v - c.value_targets[r]);
    const double l_vf = sq > t.vf_clip ? t.vf_clip : sq;
    sum += l_clip + l_kl - t.c_vf * l_vf + t.c_s * ent;
  }
  return -sum / static_cast<double>(b.size());
}

inline double huber(double e, double delta) {
  if (e < 0.0) e = -e;
  if (e <= delta) return e * e / 2.0;
  return delta * e - delta * delta / 2.0;
}

// mean Huber(Q(s,a) - (r + gamma (1-d) Q'(s', mu'(s'))))
inline double critic_loss(const nn::Network& critic, const nn::Network& target_actor,
                          const nn::Network& target_critic, const rl::TrainBatch& b,
                          double gamma, double delta) {
  double sum = 0.0;
  for (std::size_t r = 0; r < b.size(); ++r) {
    const auto s = b.obs.row(r);
    const auto a = b.actions.row(r);
    const auto s2 = b.next_obs.row(r);
    std::vector<double> in(s.begin(), s.end());
    in.insert(in.end(), a.begin(), a.end());
    const double q = mlp(critic, in)[0];
    std::vector<double> in2(s2.begin(), s2.end());
    const std::vector<double> mu = mlp(target_actor, in2);
    in2.insert(in2.end(), mu.begin(), mu.end());
    double y = b.rewards[r];
    if (!b.dones[r]) y += gamma * mlp(target_critic, in2)[0];
    sum += huber(q - y, delta);
  }
  return sum / static_cast<double>(b.size());
}

// Transliteration of the classic-control pendulum step (gravity passed in).
// Returns {new_th (unwrapped), new_thdot, reward}.
struct GymStep {
  double th, thdot, reward;
};

inline double gym_angle_normalize(double x) {
  // Python's % takes the sign of the divisor
  double r = std::fmod(x + std::numbers::pi, 2.0 * std::numbers::pi);
  if (r < 0.0) r += 2.0 * std::numbers::pi;
  return r - std::numbers::pi;
}

inline GymStep gym_pendulum_step(double th, double thdot, double u, double g = 9.81) {
  const double m = 1.0, l = 1.0, dt = 0.05, max_speed = 8.0, max_torque = 2.0;
  u = std::min(std::max(u, -max_torque), max_torque);
  const double costs = std::pow(gym_angle_normalize(th), 2) + 0.1 * std::pow(thdot, 2) +
                       0.001 * std::pow(u, 2);
  double newthdot = thdot + (3 * g / (2 * l) * std::sin(th) + 3.0 / (m * std::pow(l, 2)) * u) * dt;
  newthdot = std::min(std::max(newthdot, -max_speed), max_speed);
  const double newth = th + newthdot * dt;
  return {newth, newthdot, -costs};
}

// Smallest absolute difference between two angles.
inline double angle_gap(double a, double b) {
  return std::abs(gym_angle_normalize(a - b));
}

}  // namespace rlcycle::oracle
