#include "rlcycle/env/policy.hpp"

#include <cstdio>

#include "rlcycle/ddpg/ddpg.hpp"
#include "rlcycle/errors.hpp"
#include "rlcycle/hash.hpp"
#include "rlcycle/nn/manifest.hpp"
#include "rlcycle/ppo/gaussian.hpp"
#include "rlcycle/ppo/ppo_learner.hpp"

namespace rlcycle::env {

using nlohmann::json;

std::string hash_to_hex(std::uint64_t h) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::uint64_t hash_from_hex(const std::string& s) {
  if (s.size() != 16) throw ParseError("weights_hash must be 16 hex digits");
  std::uint64_t h = 0;
  for (char c : s) {
    h <<= 4;
    if (c >= '0' && c <= '9') {
      h |= static_cast<std::uint64_t>(c - '0');
    } else if (c >= 'a' && c <= 'f') {
      h |= static_cast<std::uint64_t>(c - 'a' + 10);
    } else {
      throw ParseError("weights_hash must be lowercase hex");
    }
  }
  return h;
}

PolicySnapshot make_snapshot(rl::Algorithm algorithm, const nn::Network& network,
                             double exploration_sigma) {
  PolicySnapshot s;
  s.algorithm = algorithm;
  s.network = network;
  s.exploration_sigma = exploration_sigma;
  s.weights_hash = fnv1a64(nn::serialize(network));
  return s;
}

json broadcast_payload(const PolicySnapshot& snapshot) {
  return {{"algorithm", rl::to_string(snapshot.algorithm)},
          {"weights", nn::to_manifest_json(snapshot.network)},
          {"weights_hash", hash_to_hex(snapshot.weights_hash)},
          {"exploration_sigma", snapshot.exploration_sigma}};
}

PolicySnapshot snapshot_from_payload(const json& payload) {
  if (!payload.is_object() || !payload.contains("algorithm") ||
      !payload["algorithm"].is_string() || !payload.contains("weights")) {
    throw ParseError("model_broadcast payload needs 'algorithm' and 'weights'");
  }
  PolicySnapshot s;
  s.algorithm = rl::algorithm_from_string(payload["algorithm"].get<std::string>());
  s.network = nn::from_manifest_json(payload["weights"]);
  s.exploration_sigma = payload.value("exploration_sigma", 0.0);
  // The hash covers the manifest text as this process re-serialises it; the
  // master compares it to the hash of what it sent.
  s.weights_hash = fnv1a64(nn::serialize(s.network));
  if (payload.contains("weights_hash")) {
    if (!payload["weights_hash"].is_string() ||
        hash_from_hex(payload["weights_hash"].get<std::string>()) != s.weights_hash) {
      throw ParseError("broadcast weights do not match their hash");
    }
  }
  return s;
}

ActResult act(const PolicySnapshot& policy, std::span<const double> obs, ActMode mode,
              const rl::SpaceSpec& spec, std::mt19937_64& rng) {
  ActResult out;
  if (policy.algorithm == rl::Algorithm::kPpo) {
    const ppo::GaussianDist dist = ppo::policy_forward(policy.network, obs);
    if (dist.dims() != spec.action_dims()) throw ShapeError("policy arity != action dims");
    if (mode == ActMode::kTraining) {
      auto sampled = ppo::sample_action(dist, rng);
      out.action = std::move(sampled.action);
      out.aux[rl::aux::kActionLogp] = sampled.logp;
    } else {
      out.action = ppo::mean_action(dist);
      out.aux[rl::aux::kActionLogp] = ppo::log_prob(dist, out.action);
    }
    out.aux[rl::aux::kDistMean] = dist.mean;
    out.aux[rl::aux::kDistLogStd] = dist.log_std;
  } else {
    const double sigma = mode == ActMode::kTraining ? policy.exploration_sigma : 0.0;
    out.action = ddpg::explore_action(policy.network, obs, sigma, rng);
    if (out.action.size() != spec.action_dims()) {
      throw ShapeError("actor arity != action dims");
    }
  }
  out.torque = rl::denormalize_action(spec, out.action);
  return out;
}

}  // namespace rlcycle::env
