#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include <json.hpp>

namespace rlcycle::rl {

struct Bounds {
  double lo = -1.0;
  double hi = 1.0;
  friend bool operator==(const Bounds&, const Bounds&) = default;
};

// Denormalised bounds of every observation and action dimension.
struct SpaceSpec {
  std::vector<Bounds> observation;
  std::vector<Bounds> action;

  std::size_t obs_dims() const { return observation.size(); }
  std::size_t action_dims() const { return action.size(); }

  // Throws DomainError unless lo < hi everywhere and both lists are non-empty.
  void validate() const;

  friend bool operator==(const SpaceSpec&, const SpaceSpec&) = default;
};

// {"observation":[[lo,hi],...],"action":[[lo,hi],...],"action_type":"continuous"}
nlohmann::json to_json(const SpaceSpec& spec);
SpaceSpec space_spec_from_json(const nlohmann::json& j);

// Affine map of [lo, hi] onto [-1, 1]; results outside are clamped.
double min_max_normalize(double x, double lo, double hi);
// Inverse affine map (no clamping).
double min_max_denormalize(double u, double lo, double hi);

// lo + (tanh(u) + 1) / 2 * (hi - lo).
double tanh_action_map(double u, double lo, double hi);

std::vector<double> normalize_observation(const SpaceSpec& spec,
                                          std::span<const double> raw);
std::vector<double> denormalize_action(const SpaceSpec& spec,
                                       std::span<const double> normalized);

}  // namespace rlcycle::rl
