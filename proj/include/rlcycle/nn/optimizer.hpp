#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "rlcycle/nn/network.hpp"

namespace rlcycle::nn {

enum class OptimizerKind { kSgd, kAdam };
enum class Direction { kMinimize, kMaximize };

struct OptimizerSettings {
  OptimizerKind kind = OptimizerKind::kAdam;
  double learning_rate = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

// Optimizer state bound to one network's parameter layout.
class Optimizer {
 public:
  Optimizer() = default;
  Optimizer(OptimizerSettings settings, std::size_t parameter_count);

  // Applies one step. Plain SGD is theta +/- lr * grad. Throws NumericError
  // and leaves both the network and the moments untouched if `grads` holds a
  // non-finite value.
  void apply(Network& net, std::span<const double> grads, Direction direction);

  const OptimizerSettings& settings() const { return settings_; }
  std::uint64_t steps() const { return steps_; }
  const std::vector<double>& first_moment() const { return m_; }
  const std::vector<double>& second_moment() const { return v_; }

 private:
  OptimizerSettings settings_;
  std::vector<double> m_;
  std::vector<double> v_;
  std::uint64_t steps_ = 0;
};

}  // namespace rlcycle::nn
