#include "rlcycle/rl/experience.hpp"

#include <cmath>

#include "rlcycle/errors.hpp"

namespace rlcycle::rl {

using nlohmann::json;

double aux_scalar(const Experience& e, const std::string& key) {
  const auto it = e.aux.find(key);
  if (it == e.aux.end()) throw ContractError("experience lacks aux '" + key + "'");
  if (const double* d = std::get_if<double>(&it->second)) return *d;
  const auto& v = std::get<std::vector<double>>(it->second);
  if (v.size() != 1) throw ContractError("aux '" + key + "' is not a scalar");
  return v.front();
}

const std::vector<double>& aux_vector(const Experience& e, const std::string& key) {
  const auto it = e.aux.find(key);
  if (it == e.aux.end()) throw ContractError("experience lacks aux '" + key + "'");
  if (const auto* v = std::get_if<std::vector<double>>(&it->second)) return *v;
  throw ContractError("aux '" + key + "' is not a vector");
}

namespace {

bool finite(const std::vector<double>& v) {
  for (double x : v) {
    if (!std::isfinite(x)) return false;
  }
  return true;
}

void check_obs_range(const std::vector<double>& v, const char* what) {
  constexpr double kSlack = 1e-9;
  for (double x : v) {
    if (x < -1.0 - kSlack || x > 1.0 + kSlack) {
      throw ContractError(std::string(what) + " component outside normalised range");
    }
  }
}

std::vector<double> numbers(const json& j, const char* key) {
  if (!j.contains(key) || !j[key].is_array()) {
    throw ParseError(std::string("experience needs array '") + key + "'");
  }
  std::vector<double> out;
  out.reserve(j[key].size());
  for (const auto& x : j[key]) {
    if (!x.is_number()) throw ParseError(std::string("'") + key + "' must hold numbers");
    out.push_back(x.get<double>());
  }
  return out;
}

}  // namespace

void validate(const Experience& e, const SpaceSpec& spec) {
  if (e.obs.size() != spec.obs_dims() || e.next_obs.size() != spec.obs_dims()) {
    throw ContractError("observation length does not match the space spec");
  }
  if (e.action.size() != spec.action_dims()) {
    throw ContractError("action length does not match the space spec");
  }
  if (!finite(e.obs) || !finite(e.next_obs) || !finite(e.action) ||
      !std::isfinite(e.reward)) {
    throw ContractError("experience holds a non-finite value");
  }
  check_obs_range(e.obs, "obs");
  check_obs_range(e.next_obs, "next_obs");
  for (const auto& [key, value] : e.aux) {
    const bool ok = std::visit(
        [](const auto& v) {
          if constexpr (std::is_same_v<std::decay_t<decltype(v)>, double>) {
            return std::isfinite(v);
          } else {
            return finite(v);
          }
        },
        value);
    if (!ok) throw ContractError("aux '" + key + "' is not finite");
  }
}

void validate(const Trajectory& t, const SpaceSpec& spec) {
  for (std::size_t i = 0; i < t.experiences.size(); ++i) {
    validate(t.experiences[i], spec);
    if (t.experiences[i].done && i + 1 != t.experiences.size()) {
      throw ContractError("done flag set before the final experience");
    }
  }
}

json to_json(const Experience& e) {
  json aux_obj = json::object();
  for (const auto& [key, value] : e.aux) {
    std::visit([&](const auto& v) { aux_obj[key] = v; }, value);
  }
  return {{"obs", e.obs},         {"action", e.action}, {"next_obs", e.next_obs},
          {"reward", e.reward},   {"done", e.done},     {"aux", std::move(aux_obj)}};
}

Experience experience_from_json(const json& j) {
  if (!j.is_object()) throw ParseError("experience must be an object");
  Experience e;
  e.obs = numbers(j, "obs");
  e.action = numbers(j, "action");
  e.next_obs = numbers(j, "next_obs");
  if (!j.contains("reward") || !j["reward"].is_number()) {
    throw ParseError("experience needs numeric 'reward'");
  }
  e.reward = j["reward"].get<double>();
  if (!j.contains("done") || !j["done"].is_boolean()) {
    throw ParseError("experience needs boolean 'done'");
  }
  e.done = j["done"].get<bool>();
  if (j.contains("aux")) {
    if (!j["aux"].is_object()) throw ParseError("'aux' must be an object");
    for (const auto& [key, value] : j["aux"].items()) {
      if (value.is_number()) {
        e.aux[key] = value.get<double>();
      } else if (value.is_array()) {
        e.aux[key] = numbers(j["aux"], key.c_str());
      } else {
        throw ParseError("aux '" + key + "' must be a number or array");
      }
    }
  }
  return e;
}

json to_json(const Trajectory& t) {
  json arr = json::array();
  for (const auto& e : t.experiences) arr.push_back(to_json(e));
  return arr;
}

Trajectory trajectory_from_json(const json& j, std::uint64_t episode_id) {
  if (!j.is_array()) throw ParseError("episode must be an array of experiences");
  Trajectory t;
  t.episode_id = episode_id;
  t.experiences.reserve(j.size());
  for (const auto& e : j) t.experiences.push_back(experience_from_json(e));
  return t;
}

}  // namespace rlcycle::rl
