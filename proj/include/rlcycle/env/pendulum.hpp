#pragma once

#include <array>
#include <random>

#include "rlcycle/rl/spaces.hpp"

namespace rlcycle::env {

// Rod pendulum swing-up. phi = 0 is upright; phi is kept in (-pi, pi].
struct PendulumParams {
  double length = 1.0;     // m
  double mass = 1.0;       // kg
  double gravity = 9.81;   // m/s^2
  double dt = 0.05;        // s
  double max_speed = 8.0;  // rad/s
  double max_torque = 2.0; // N m
  int episode_length = 200;
};

struct PendulumState {
  double phi = 0.0;
  double phi_dot = 0.0;
  int t = 0;
};

enum class ResetMode { kTraining, kValidation };

struct StepResult {
  PendulumState state;
  double reward = 0.0;
  bool done = false;
};

// Maps any angle to (-pi, pi].
double wrap_angle(double phi);

// Training: phi ~ U(-pi, pi], phi_dot ~ U[-1, 1]. Validation: hanging still (pi, 0).
PendulumState env_reset(ResetMode mode, std::mt19937_64& rng);

// One semi-implicit Euler step. The torque must already be within
// [-max_torque, max_torque]. The reward is -(phi^2 + 0.1 phi_dot^2 + 0.001 M^2)
// on the state the torque is applied to. Throws NumericError on non-finite state.
StepResult env_step(const PendulumState& state, double torque,
                    const PendulumParams& params = {});

// (x, y, phi_dot) = (l cos phi, l sin phi, phi_dot) in physical units.
std::array<double, 3> raw_observation(const PendulumState& state,
                                      const PendulumParams& params = {});

// Observation bounds ([-1,1], [-1,1], [-8,8]) and action bounds ([-2,2]).
rl::SpaceSpec pendulum_space(const PendulumParams& params = {});

// Min-max normalised observation.
std::vector<double> observe(const PendulumState& state, const rl::SpaceSpec& spec,
                            const PendulumParams& params = {});

// Mechanical energy of the rod about the pivot (phi = 0 upright).
double rod_energy(const PendulumState& state, const PendulumParams& params = {});

}  // namespace rlcycle::env
