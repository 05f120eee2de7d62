#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "rlcycle/errors.hpp"
#include "rlcycle/rl/experience.hpp"
#include "rlcycle/rl/returns.hpp"
#include "rlcycle/rl/spaces.hpp"
#include "rlcycle/rl/train_batch.hpp"

using namespace rlcycle;
using namespace rlcycle::rl;

namespace {

// Direct double sum, no recursion.
std::vector<double> gae_oracle(const std::vector<double>& r, const std::vector<double>& v,
                               double boot, double gamma, double lambda) {
  const std::size_t n = r.size();
  std::vector<double> delta(n), adv(n, 0.0);
  for (std::size_t t = 0; t < n; ++t) {
    const double next = t + 1 < n ? v[t + 1] : boot;
    delta[t] = r[t] + gamma * next - v[t];
  }
  for (std::size_t t = 0; t < n; ++t) {
    double w = 1.0;
    for (std::size_t k = t; k < n; ++k) {
      adv[t] += w * delta[k];
      w *= gamma * lambda;
    }
  }
  return adv;
}

SpaceSpec pendulum_like() {
  return SpaceSpec{{{-1, 1}, {-1, 1}, {-8, 8}}, {{-2, 2}}};
}

Experience make_exp(double r, bool done, bool ppo, double v = 0.0) {
  Experience e;
  e.obs = {0.1, -0.2, 0.3};
  e.action = {0.5};
  e.next_obs = {0.2, -0.1, 0.0};
  e.reward = r;
  e.done = done;
  if (ppo) {
    e.aux[aux::kVfPred] = v;
    e.aux[aux::kActionLogp] = -0.9;
    e.aux[aux::kDistMean] = std::vector<double>{0.4};
    e.aux[aux::kDistLogStd] = std::vector<double>{-0.5};
  }
  return e;
}

Trajectory make_traj(std::uint64_t id, std::size_t len, bool ppo, bool terminal = true) {
  Trajectory t;
  t.episode_id = id;
  for (std::size_t i = 0; i < len; ++i) {
    t.experiences.push_back(make_exp(-static_cast<double>(i), terminal && i + 1 == len, ppo,
                                     0.1 * static_cast<double>(i)));
  }
  return t;
}

}  // namespace

TEST(DiscountedReturn, Examples) {
  const std::vector<double> a{1, 1, 1};
  EXPECT_DOUBLE_EQ(discounted_return(a, 0.5), 1.75);
  const std::vector<double> b{-3.25};
  EXPECT_EQ(discounted_return(b, 0.3), -3.25);
  const std::vector<double> c{0, 1};
  EXPECT_EQ(discounted_return(c, 1.0), 1.0);
}

TEST(DiscountedReturn, GammaOutsideUnitIntervalThrows) {
  const std::vector<double> r{1};
  EXPECT_THROW(discounted_return(r, 0.0), DomainError);
  EXPECT_THROW(discounted_return(r, 1.0001), DomainError);
  EXPECT_THROW(discounted_return(r, std::nan("")), DomainError);
}

TEST(DiscountedReturn, MatchesLoopOracle) {
  std::mt19937_64 rng(7);
  std::uniform_int_distribution<int> len(1, 300);
  std::uniform_real_distribution<double> rew(-16.3, 0.0), g(0.01, 1.0);
  for (int i = 0; i < 1000; ++i) {
    std::vector<double> r(static_cast<std::size_t>(len(rng)));
    for (double& x : r) x = rew(rng);
    const double gamma = g(rng);
    double want = 0.0;
    for (std::size_t t = 0; t < r.size(); ++t) want += std::pow(gamma, static_cast<double>(t)) * r[t];
    ASSERT_NEAR(discounted_return(r, gamma), want, 1e-12 * std::max(1.0, std::abs(want)));
  }
}

TEST(Normalize, Examples) {
  EXPECT_EQ(min_max_normalize(8, -8, 8), 1.0);
  EXPECT_EQ(min_max_normalize(0, -8, 8), 0.0);
  EXPECT_NEAR(min_max_denormalize(min_max_normalize(3.7, -8, 8), -8, 8), 3.7, 1e-12);
  EXPECT_EQ(min_max_normalize(9, -8, 8), 1.0);
  EXPECT_EQ(min_max_normalize(-100, -8, 8), -1.0);
  EXPECT_THROW(min_max_normalize(0, 1, 1), DomainError);
  EXPECT_THROW(min_max_normalize(0, 2, 1), DomainError);
}

TEST(Normalize, MonotoneAndInverse) {
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 1000; ++i) {
    const double lo = -10.0 * u(rng) - 0.1, hi = 10.0 * u(rng) + 0.1;
    const double a = lo + (hi - lo) * u(rng), b = lo + (hi - lo) * u(rng);
    const double na = min_max_normalize(a, lo, hi), nb = min_max_normalize(b, lo, hi);
    if (a < b) {
      EXPECT_LT(na, nb);
    } else if (a > b) {
      EXPECT_GT(na, nb);
    }
    EXPECT_NEAR(min_max_denormalize(na, lo, hi), a, 1e-12 * (hi - lo));
  }
}

TEST(TanhMap, Examples) {
  EXPECT_EQ(tanh_action_map(0.0, -2, 2), 0.0);
  EXPECT_NEAR(tanh_action_map(40.0, -2, 2), 2.0, 1e-15);
  EXPECT_LT(tanh_action_map(5.0, -2, 2), 2.0);
  EXPECT_GT(tanh_action_map(-5.0, -2, 2), -2.0);
  // 2 tanh(atanh(0.5)) with atanh(0.5) rounded to 6 places
  EXPECT_NEAR(tanh_action_map(0.549306, -2, 2), 2.0 * std::tanh(0.549306), 1e-15);
  EXPECT_NEAR(tanh_action_map(0.549306, -2, 2), 1.0, 1e-6);
}

TEST(Spaces, JsonRoundTripAndValidation) {
  const SpaceSpec s = pendulum_like();
  EXPECT_EQ(space_spec_from_json(to_json(s)), s);
  EXPECT_EQ(to_json(s)["action_type"], "continuous");
  SpaceSpec bad = s;
  bad.observation[1] = {1.0, 1.0};
  EXPECT_THROW(bad.validate(), DomainError);
  EXPECT_THROW(space_spec_from_json(nlohmann::json::parse(R"({"observation":[[0,1]]})")),
               ParseError);
}

TEST(Spaces, NormalizeObservationAndDenormalizeAction) {
  const SpaceSpec s = pendulum_like();
  const std::vector<double> raw{1.0, 0.0, -4.0};
  EXPECT_EQ(normalize_observation(s, raw), (std::vector<double>{1.0, 0.0, -0.5}));
  const std::vector<double> u{0.0};
  EXPECT_EQ(denormalize_action(s, u), std::vector<double>{0.0});
  const std::vector<double> wrong{1.0, 2.0};
  EXPECT_THROW(normalize_observation(s, wrong), ShapeError);
}

TEST(Gae, OneStepTerminal) {
  const std::vector<double> r{1.0}, v{0.5};
  const auto est = gae_advantages(r, v, 0.0, 0.95, 0.1);
  EXPECT_DOUBLE_EQ(est.advantages[0], 0.5);
  EXPECT_DOUBLE_EQ(est.value_targets[0], 1.0);
}

TEST(Gae, TwoStepExampleAgainstOracle) {
  const std::vector<double> r{0, 1}, v{0, 0};
  const auto est = gae_advantages(r, v, 0.0, 0.5, 0.5);
  const auto want = gae_oracle(r, v, 0.0, 0.5, 0.5);
  EXPECT_EQ(want, (std::vector<double>{0.25, 1.0}));
  EXPECT_EQ(est.advantages, want);
}

TEST(Gae, TelescopesToRewardToGoAtUnitLambdaGamma) {
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> u(-2, 2);
  std::vector<double> r(50), v(50);
  for (auto& x : r) x = u(rng);
  for (auto& x : v) x = u(rng);
  const auto est = gae_advantages(r, v, 0.0, 1.0, 1.0);
  for (std::size_t t = 0; t < r.size(); ++t) {
    double togo = 0.0;
    for (std::size_t k = t; k < r.size(); ++k) togo += r[k];
    EXPECT_NEAR(est.advantages[t], togo - v[t], 1e-12);
  }
}

TEST(Gae, ZeroLambdaIsTdResidual) {
  std::mt19937_64 rng(10);
  std::uniform_real_distribution<double> u(-2, 2);
  std::vector<double> r(20), v(20);
  for (auto& x : r) x = u(rng);
  for (auto& x : v) x = u(rng);
  const double boot = 0.7;
  const auto est = gae_advantages(r, v, boot, 0.95, 0.0);
  for (std::size_t t = 0; t < r.size(); ++t) {
    const double next = t + 1 < r.size() ? v[t + 1] : boot;
    EXPECT_EQ(est.advantages[t], r[t] + 0.95 * next - v[t]);
  }
}

TEST(Gae, RandomAgainstOracle) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-3, 3), p(0.0, 1.0);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<double> r(1 + trial % 37), v(r.size());
    for (auto& x : r) x = u(rng);
    for (auto& x : v) x = u(rng);
    const double boot = u(rng), g = p(rng), l = p(rng);
    const auto est = gae_advantages(r, v, boot, g, l);
    const auto want = gae_oracle(r, v, boot, g, l);
    for (std::size_t t = 0; t < r.size(); ++t) {
      ASSERT_NEAR(est.advantages[t], want[t], 1e-12);
      ASSERT_NEAR(est.value_targets[t], want[t] + v[t], 1e-12);
    }
  }
}

TEST(Gae, LengthMismatchThrows) {
  const std::vector<double> r{1, 2}, v{0};
  EXPECT_THROW(gae_advantages(r, v, 0.0, 0.9, 0.9), ShapeError);
}

TEST(Batch, ThreeEpisodesGive600Rows) {
  std::vector<Trajectory> trajs{make_traj(0, 200, true), make_traj(1, 200, true),
                                make_traj(2, 200, true)};
  const TrainBatch b = assemble_train_batch(trajs, Algorithm::kPpo);
  EXPECT_EQ(b.size(), 600u);
  EXPECT_EQ(b.obs.rows(), 600u);
  EXPECT_EQ(b.actions.rows(), 600u);
  ASSERT_TRUE(b.ppo.has_value());
  EXPECT_EQ(b.ppo->advantages.size(), 600u);
  EXPECT_EQ(b.ppo->dist_mean.rows(), 600u);
  EXPECT_TRUE(b.valid_for_training());
}

TEST(Batch, GaeRunsPerEpisode) {
  std::vector<Trajectory> trajs{make_traj(0, 3, true), make_traj(1, 4, true, false)};
  const std::vector<double> boot{99.0, 2.5};  // first is terminal, its bootstrap is ignored
  const GaeParams gp{0.95, 0.1};
  const TrainBatch b = assemble_train_batch(trajs, Algorithm::kPpo, gp, boot);
  std::vector<double> want;
  for (std::size_t i = 0; i < trajs.size(); ++i) {
    std::vector<double> r, v;
    for (const auto& e : trajs[i].experiences) {
      r.push_back(e.reward);
      v.push_back(aux_scalar(e, aux::kVfPred));
    }
    const auto a = gae_oracle(r, v, trajs[i].terminal() ? 0.0 : boot[i], gp.gamma, gp.lambda);
    want.insert(want.end(), a.begin(), a.end());
  }
  ASSERT_EQ(b.ppo->advantages.size(), want.size());
  for (std::size_t i = 0; i < want.size(); ++i) EXPECT_NEAR(b.ppo->advantages[i], want[i], 1e-12);
}

TEST(Batch, EmptyListIsInvalidForTraining) {
  const std::vector<Trajectory> none;
  const TrainBatch b = assemble_train_batch(none, Algorithm::kDdpg);
  EXPECT_EQ(b.size(), 0u);
  EXPECT_FALSE(b.valid_for_training());
}

TEST(Batch, DdpgNeedsNoAux) {
  std::vector<Trajectory> trajs{make_traj(0, 5, false), make_traj(1, 7, false)};
  const TrainBatch b = assemble_train_batch(trajs, Algorithm::kDdpg);
  EXPECT_EQ(b.size(), 12u);
  EXPECT_FALSE(b.ppo.has_value());
  EXPECT_EQ(b.dones[4], 1);
  EXPECT_EQ(b.dones[3], 0);
  EXPECT_EQ(b.rewards[5], 0.0);
}

TEST(Batch, PpoWithoutAuxIsContractError) {
  std::vector<Trajectory> trajs{make_traj(0, 5, false)};
  EXPECT_THROW(assemble_train_batch(trajs, Algorithm::kPpo), ContractError);
}

TEST(Batch, RowCountIsSumOfLengths) {
  std::mt19937_64 rng(12);
  std::uniform_int_distribution<int> len(1, 50), count(0, 6);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<Trajectory> trajs;
    std::size_t total = 0;
    const int n = count(rng);
    for (int i = 0; i < n; ++i) {
      const auto l = static_cast<std::size_t>(len(rng));
      trajs.push_back(make_traj(static_cast<std::uint64_t>(i), l, true));
      total += l;
    }
    EXPECT_EQ(assemble_train_batch(trajs, Algorithm::kPpo).size(), total);
    EXPECT_EQ(assemble_train_batch(trajs, Algorithm::kDdpg).size(), total);
  }
}

TEST(Batch, SelectKeepsRowOrder) {
  std::vector<Trajectory> trajs{make_traj(0, 6, true)};
  const TrainBatch b = assemble_train_batch(trajs, Algorithm::kPpo);
  const std::vector<std::size_t> rows{4, 1};
  const TrainBatch s = b.select(rows);
  EXPECT_EQ(s.size(), 2u);
  EXPECT_EQ(s.rewards[0], b.rewards[4]);
  EXPECT_EQ(s.ppo->advantages[1], b.ppo->advantages[1]);
}

TEST(ExperienceCheck, Validation) {
  const SpaceSpec s = pendulum_like();
  Experience e = make_exp(-1.0, false, false);
  EXPECT_NO_THROW(validate(e, s));
  e.obs[0] = 1.0 + 1e-10;
  EXPECT_NO_THROW(validate(e, s));
  e.obs[0] = 1.0 + 1e-6;
  EXPECT_THROW(validate(e, s), ContractError);
  e = make_exp(-1.0, false, false);
  e.action.push_back(0.0);
  EXPECT_THROW(validate(e, s), ContractError);
  e = make_exp(std::nan(""), false, false);
  EXPECT_THROW(validate(e, s), ContractError);

  Trajectory t = make_traj(0, 3, false);
  EXPECT_NO_THROW(validate(t, s));
  t.experiences[0].done = true;
  EXPECT_THROW(validate(t, s), ContractError);
}

TEST(ExperienceCheck, JsonRoundTripIsExact) {
  Experience e = make_exp(-1.0 / 3.0, true, true, 0.123456789012345678);
  const Experience back = experience_from_json(nlohmann::json::parse(to_json(e).dump()));
  EXPECT_EQ(back, e);
  const Trajectory t = make_traj(4, 10, true);
  EXPECT_EQ(trajectory_from_json(nlohmann::json::parse(to_json(t).dump()), 4), t);
  EXPECT_THROW(experience_from_json(nlohmann::json::parse(R"({"obs":[1]})")), ParseError);
}
