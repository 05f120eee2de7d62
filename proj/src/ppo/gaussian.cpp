#include "rlcycle/ppo/gaussian.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "rlcycle/errors.hpp"

namespace rlcycle::ppo {

namespace {
constexpr double kHalfLog2Pi = 0.91893853320467274178;  // 0.5 ln(2 pi)
}

GaussianDist::GaussianDist(std::vector<double> m, std::vector<double> ls)
    : mean(std::move(m)), log_std(std::move(ls)) {
  if (mean.size() != log_std.size()) throw ShapeError("mean/log_std arity mismatch");
  for (double& s : log_std) s = std::clamp(s, kMinLogStd, kMaxLogStd);
}

GaussianDist GaussianDist::from_output(std::span<const double> output) {
  if (output.size() % 2 != 0 || output.empty()) {
    throw ShapeError("policy output must hold mean and log_std halves");
  }
  const std::size_t d = output.size() / 2;
  return GaussianDist({output.begin(), output.begin() + d},
                      {output.begin() + d, output.end()});
}

double log_prob(const GaussianDist& dist, std::span<const double> action) {
  if (action.size() != dist.dims()) throw ShapeError("action arity mismatch");
  double logp = 0.0;
  for (std::size_t i = 0; i < action.size(); ++i) {
    const double z = (action[i] - dist.mean[i]) / std::exp(dist.log_std[i]);
    logp += -0.5 * z * z - dist.log_std[i] - kHalfLog2Pi;
  }
  return logp;
}

SampledAction sample_action(const GaussianDist& dist, std::mt19937_64& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  SampledAction out;
  out.action.resize(dist.dims());
  for (std::size_t i = 0; i < dist.dims(); ++i) {
    out.action[i] = dist.mean[i] + std::exp(dist.log_std[i]) * normal(rng);
  }
  out.logp = log_prob(dist, out.action);
  return out;
}

std::vector<double> mean_action(const GaussianDist& dist) { return dist.mean; }

double kl_divergence(const GaussianDist& old, const GaussianDist& next) {
  if (old.dims() != next.dims()) throw ShapeError("distribution arity mismatch");
  double kl = 0.0;
  for (std::size_t i = 0; i < old.dims(); ++i) {
    const double var_old = std::exp(2.0 * old.log_std[i]);
    const double var_new = std::exp(2.0 * next.log_std[i]);
    const double dm = old.mean[i] - next.mean[i];
    kl += next.log_std[i] - old.log_std[i] + (var_old + dm * dm) / (2.0 * var_new) - 0.5;
  }
  return kl;
}

double entropy(const GaussianDist& dist) {
  double h = 0.0;
  for (double ls : dist.log_std) h += ls + 0.5 + kHalfLog2Pi;
  return h;
}

}  // namespace rlcycle::ppo
