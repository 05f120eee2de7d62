#include "rlcycle/env/pendulum.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "rlcycle/errors.hpp"

namespace rlcycle::env {

using std::numbers::pi;

double wrap_angle(double phi) {
  const double two_pi = 2.0 * pi;
  double w = std::fmod(phi + pi, two_pi);
  if (w < 0.0) w += two_pi;
  w -= pi;
  return w <= -pi ? pi : w;
}

PendulumState env_reset(ResetMode mode, std::mt19937_64& rng) {
  if (mode == ResetMode::kValidation) return {pi, 0.0, 0};
  std::uniform_real_distribution<double> angle(-pi, pi);
  std::uniform_real_distribution<double> speed(-1.0, 1.0);
  PendulumState s;
  // uniform_real_distribution draws from [-pi, pi); negate for (-pi, pi].
  s.phi = -angle(rng);
  s.phi_dot = speed(rng);
  return s;
}

StepResult env_step(const PendulumState& state, double applied,
                    const PendulumParams& p) {
  if (!std::isfinite(state.phi) || !std::isfinite(state.phi_dot) ||
      !std::isfinite(applied)) {
    throw NumericError("non-finite pendulum state or torque");
  }
  const double torque = std::clamp(applied, -p.max_torque, p.max_torque);
  const double phi = wrap_angle(state.phi);
  const double cost =
      phi * phi + 0.1 * state.phi_dot * state.phi_dot + 0.001 * torque * torque;

  const double accel = 3.0 * p.gravity / (2.0 * p.length) * std::sin(state.phi) +
                       3.0 / (p.mass * p.length * p.length) * torque;
  const double phi_dot =
      std::clamp(state.phi_dot + accel * p.dt, -p.max_speed, p.max_speed);

  StepResult out;
  out.state.phi = wrap_angle(state.phi + phi_dot * p.dt);
  out.state.phi_dot = phi_dot;
  out.state.t = state.t + 1;
  out.reward = -cost;
  out.done = out.state.t >= p.episode_length;
  return out;
}

std::array<double, 3> raw_observation(const PendulumState& state,
                                      const PendulumParams& p) {
  return {p.length * std::cos(state.phi), p.length * std::sin(state.phi), state.phi_dot};
}

rl::SpaceSpec pendulum_space(const PendulumParams& p) {
  return {{{-p.length, p.length}, {-p.length, p.length}, {-p.max_speed, p.max_speed}},
          {{-p.max_torque, p.max_torque}}};
}

std::vector<double> observe(const PendulumState& state, const rl::SpaceSpec& spec,
                            const PendulumParams& p) {
  const auto raw = raw_observation(state, p);
  return rl::normalize_observation(spec, raw);
}

double rod_energy(const PendulumState& s, const PendulumParams& p) {
  const double inertia = p.mass * p.length * p.length / 3.0;
  return 0.5 * inertia * s.phi_dot * s.phi_dot +
         p.mass * p.gravity * 0.5 * p.length * std::cos(s.phi);
}

}  // namespace rlcycle::env
