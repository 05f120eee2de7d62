#include "rlcycle/nn/optimizer.hpp"

#include <cmath>
#include <string>

#include "rlcycle/errors.hpp"

namespace rlcycle::nn {

Optimizer::Optimizer(OptimizerSettings settings, std::size_t parameter_count)
    : settings_(settings) {
  if (!(settings_.learning_rate > 0.0)) throw DomainError("learning rate must be > 0");
  if (settings_.kind == OptimizerKind::kAdam) {
    m_.assign(parameter_count, 0.0);
    v_.assign(parameter_count, 0.0);
  }
}

void Optimizer::apply(Network& net, std::span<const double> grads,
                      Direction direction) {
  auto params = net.parameters();
  if (grads.size() != params.size()) {
    throw ShapeError("gradient size " + std::to_string(grads.size()) +
                     " != parameter count " + std::to_string(params.size()));
  }
  for (std::size_t i = 0; i < grads.size(); ++i) {
    if (!std::isfinite(grads[i])) {
      throw NumericError("non-finite gradient at parameter " + std::to_string(i) +
                         "; update rejected");
    }
  }
  const double sign = direction == Direction::kMaximize ? 1.0 : -1.0;
  const double lr = settings_.learning_rate;

  if (settings_.kind == OptimizerKind::kSgd) {
    for (std::size_t i = 0; i < params.size(); ++i) params[i] += sign * lr * grads[i];
    ++steps_;
    return;
  }

  if (m_.size() != params.size()) throw ShapeError("optimizer bound to another network");
  ++steps_;
  const double b1 = settings_.beta1;
  const double b2 = settings_.beta2;
  const double t = static_cast<double>(steps_);
  const double c1 = 1.0 - std::pow(b1, t);
  const double c2 = 1.0 - std::pow(b2, t);
  for (std::size_t i = 0; i < params.size(); ++i) {
    const double g = grads[i];
    m_[i] = b1 * m_[i] + (1.0 - b1) * g;
    v_[i] = b2 * v_[i] + (1.0 - b2) * g * g;
    const double m_hat = m_[i] / c1;
    const double v_hat = v_[i] / c2;
    params[i] += sign * lr * m_hat / (std::sqrt(v_hat) + settings_.epsilon);
  }
}

}  // namespace rlcycle::nn
