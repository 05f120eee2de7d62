#include "rlcycle/rl/spaces.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "rlcycle/errors.hpp"

namespace rlcycle::rl {

namespace {

void check_bounds(double lo, double hi) {
  if (!(lo < hi)) {
    throw DomainError("bounds require lo < hi (got [" + std::to_string(lo) + ", " +
                      std::to_string(hi) + "])");
  }
}

std::vector<Bounds> bounds_from_json(const nlohmann::json& j, const char* key) {
  if (!j.contains(key) || !j[key].is_array()) {
    throw ParseError(std::string("space spec needs '") + key + "'");
  }
  std::vector<Bounds> out;
  for (const auto& pair : j[key]) {
    if (!pair.is_array() || pair.size() != 2 || !pair[0].is_number() ||
        !pair[1].is_number()) {
      throw ParseError(std::string("'") + key + "' entries must be [lo, hi]");
    }
    out.push_back({pair[0].get<double>(), pair[1].get<double>()});
  }
  return out;
}

}  // namespace

void SpaceSpec::validate() const {
  if (observation.empty() || action.empty()) {
    throw DomainError("space spec needs at least one observation and action dimension");
  }
  for (const auto& b : observation) check_bounds(b.lo, b.hi);
  for (const auto& b : action) check_bounds(b.lo, b.hi);
}

nlohmann::json to_json(const SpaceSpec& spec) {
  auto pairs = [](const std::vector<Bounds>& bs) {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& b : bs) arr.push_back({b.lo, b.hi});
    return arr;
  };
  return {{"observation", pairs(spec.observation)},
          {"action", pairs(spec.action)},
          {"action_type", "continuous"}};
}

SpaceSpec space_spec_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw ParseError("space spec must be an object");
  if (j.contains("action_type") && j["action_type"] != "continuous") {
    throw ParseError("only continuous action spaces are supported");
  }
  SpaceSpec spec{bounds_from_json(j, "observation"), bounds_from_json(j, "action")};
  try {
    spec.validate();
  } catch (const DomainError& e) {
    throw ParseError(e.what());
  }
  return spec;
}

double min_max_normalize(double x, double lo, double hi) {
  check_bounds(lo, hi);
  const double u = 2.0 * (x - lo) / (hi - lo) - 1.0;
  return std::clamp(u, -1.0, 1.0);
}

double min_max_denormalize(double u, double lo, double hi) {
  check_bounds(lo, hi);
  return lo + (u + 1.0) * 0.5 * (hi - lo);
}

double tanh_action_map(double u, double lo, double hi) {
  check_bounds(lo, hi);
  return lo + (std::tanh(u) + 1.0) * 0.5 * (hi - lo);
}

std::vector<double> normalize_observation(const SpaceSpec& spec,
                                          std::span<const double> raw) {
  if (raw.size() != spec.obs_dims()) throw ShapeError("observation width mismatch");
  std::vector<double> out(raw.size());
  for (std::size_t i = 0; i < raw.size(); ++i) {
    out[i] = min_max_normalize(raw[i], spec.observation[i].lo, spec.observation[i].hi);
  }
  return out;
}

std::vector<double> denormalize_action(const SpaceSpec& spec,
                                       std::span<const double> normalized) {
  if (normalized.size() != spec.action_dims()) throw ShapeError("action width mismatch");
  std::vector<double> out(normalized.size());
  for (std::size_t i = 0; i < normalized.size(); ++i) {
    out[i] = tanh_action_map(normalized[i], spec.action[i].lo, spec.action[i].hi);
  }
  return out;
}

}  // namespace rlcycle::rl
