#pragma once

#include <random>
#include <span>
#include <vector>

namespace rlcycle::ppo {

inline constexpr double kMinLogStd = -20.0;
inline constexpr double kMaxLogStd = 2.0;

// Diagonal Gaussian over normalised actions.
struct GaussianDist {
  std::vector<double> mean;
  std::vector<double> log_std;  // clamped to [kMinLogStd, kMaxLogStd]

  // Splits a policy head output [mean..., log_std...] and clamps log_std.
  static GaussianDist from_output(std::span<const double> output);
  GaussianDist(std::vector<double> mean, std::vector<double> log_std);
  GaussianDist() = default;

  std::size_t dims() const { return mean.size(); }
  friend bool operator==(const GaussianDist&, const GaussianDist&) = default;
};

struct SampledAction {
  std::vector<double> action;
  double logp = 0.0;
};

double log_prob(const GaussianDist& dist, std::span<const double> action);
SampledAction sample_action(const GaussianDist& dist, std::mt19937_64& rng);
std::vector<double> mean_action(const GaussianDist& dist);

// Closed-form KL(old || next) summed over dimensions.
double kl_divergence(const GaussianDist& old, const GaussianDist& next);
// sum_d 0.5 ln(2 pi e sigma_d^2)
double entropy(const GaussianDist& dist);

}  // namespace rlcycle::ppo
