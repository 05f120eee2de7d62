#include <gtest/gtest.h>

#include <algorithm>
#include <future>
#include <thread>

#include "rlcycle/env/minion.hpp"
#include "rlcycle/env/pendulum.hpp"
#include "rlcycle/env/policy.hpp"
#include "rlcycle/env/rollout.hpp"
#include "rlcycle/master/minion_server.hpp"
#include "rlcycle/wire/framing.hpp"
#include "rlcycle/wire/socket.hpp"
#include "test_util.hpp"

using namespace rlcycle;
using namespace rlcycle::wire;
using namespace std::chrono_literals;
using master::CollectRequest;
using master::MinionServer;
using master::ServerSettings;

namespace {

ServerSettings fast_settings() {
  ServerSettings s;
  s.space = env::pendulum_space();
  s.heartbeat_interval = Seconds(0.1);
  s.monitor.heartbeat_timeout = Seconds(0.5);
  s.monitor_period = Seconds(0.1);
  return s;
}

env::PolicySnapshot snapshot(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  const nn::Network net = tutil::random_network(
      rng, {3, 8, 2}, {nn::Activation::kTanh, nn::Activation::kLinear}, 0.5);
  return env::make_snapshot(rl::Algorithm::kPpo, net, 0.0);
}

CollectRequest request(std::uint64_t cycle, int episodes, int length = 20) {
  CollectRequest r;
  r.cycle = cycle;
  r.snapshot = snapshot(cycle);
  r.episode_length = length;
  for (int i = 0; i < episodes; ++i) {
    r.episodes.push_back({static_cast<std::uint64_t>(i), 1000 + static_cast<std::uint64_t>(i)});
  }
  return r;
}

// Hand-driven protocol peer.
struct RawClient {
  Connection conn;
  explicit RawClient(std::uint16_t port) : conn(connect_to("127.0.0.1", port)) {}

  void send(MessageType t, nlohmann::json payload = nlohmann::json::object(), std::uint64_t cycle = 0) {
    ASSERT_TRUE(conn.send({t, cycle, std::move(payload)}));
  }
  std::optional<WireMessage> recv(std::chrono::milliseconds timeout = 3000ms) {
    bool closed = false;
    return conn.receive(timeout, &closed);
  }
  // Skips messages of other types.
  std::optional<WireMessage> expect(MessageType t, std::chrono::milliseconds timeout = 3000ms) {
    const auto deadline = Clock::now() + timeout;
    while (Clock::now() < deadline) {
      auto m = recv(100ms);
      if (m && m->type == t) return m;
    }
    return std::nullopt;
  }
  WireMessage hello(const std::string& id, int version = kProtocolVersion) {
    send(MessageType::kHello, {{"protocol_version", version}, {"minion_id", id}});
    auto m = recv();
    EXPECT_TRUE(m.has_value());
    return m ? *m : WireMessage{};
  }
};

bool wait_until(const std::function<bool()>& pred, std::chrono::milliseconds timeout) {
  const auto deadline = Clock::now() + timeout;
  while (Clock::now() < deadline) {
    if (pred()) return true;
    std::this_thread::sleep_for(10ms);
  }
  return pred();
}

}  // namespace

TEST(Handshake, AcceptsMatchingVersion) {
  MinionServer server(fast_settings());
  server.start();
  RawClient c(server.port());
  const WireMessage ack = c.hello("m1");
  EXPECT_EQ(ack.type, MessageType::kHelloAck);
  EXPECT_TRUE(ack.payload["accepted"].get<bool>());
  EXPECT_EQ(ack.payload["minion_id"], "m1");
  EXPECT_EQ(rl::space_spec_from_json(ack.payload["space_spec"]), env::pendulum_space());
  ASSERT_TRUE(server.wait_for_minions(1, Seconds(2)));
  const auto sessions = server.sessions();
  ASSERT_EQ(sessions.size(), 1u);
  EXPECT_EQ(sessions[0].state, SessionState::kIdle);
  server.stop();
}

TEST(Handshake, VersionMismatchGetsErrorThenClose) {
  MinionServer server(fast_settings());
  server.start();
  RawClient c(server.port());
  const WireMessage reply = c.hello("old", kProtocolVersion + 1);
  EXPECT_EQ(reply.type, MessageType::kError);
  EXPECT_EQ(c.conn.read_frame(3000ms).status, ReadStatus::kClosed);
  EXPECT_EQ(server.alive_count(), 0u);
  server.stop();
}

TEST(Handshake, DuplicateIdIsSuffixed) {
  MinionServer server(fast_settings());
  server.start();
  RawClient a(server.port()), b(server.port());
  EXPECT_EQ(a.hello("twin").payload["minion_id"], "twin");
  EXPECT_EQ(b.hello("twin").payload["minion_id"], "twin-2");
  EXPECT_EQ(server.alive_count(), 2u);
  server.stop();
}

TEST(Envelope, UnknownTypeGetsErrorAndConnectionStaysOpen) {
  MinionServer server(fast_settings());
  server.start();
  RawClient c(server.port());
  c.hello("m");
  for (int i = 0; i < 3; ++i) {
    ASSERT_TRUE(c.conn.send_raw(frame(R"({"type":"dance","cycle":0,"payload":{}})")));
    const auto reply = c.recv();
    ASSERT_TRUE(reply.has_value());
    EXPECT_EQ(reply->type, MessageType::kError);
  }
  c.send(MessageType::kHeartbeat);
  std::this_thread::sleep_for(100ms);
  EXPECT_EQ(server.alive_count(), 1u);
  EXPECT_TRUE(c.conn.open());
  server.stop();
}

TEST(Heartbeat, SilentMinionDeclaredDeadWithinTimeoutPlusPeriod) {
  const ServerSettings s = fast_settings();
  MinionServer server(s);
  server.start();
  RawClient c(server.port());
  c.hello("quiet");
  ASSERT_TRUE(wait_until([&] { return server.alive_count() == 0; }, 3000ms));
  const auto sessions = server.sessions();
  ASSERT_EQ(sessions.size(), 1u);
  ASSERT_TRUE(sessions[0].died_at.has_value());
  const double silent_for = Seconds(*sessions[0].died_at - sessions[0].last_seen).count();
  EXPECT_GT(silent_for, s.monitor.heartbeat_timeout.count());
  EXPECT_LE(silent_for, (s.monitor.heartbeat_timeout + s.monitor_period).count());
  server.stop();
}

TEST(Heartbeat, RegularHeartbeatsKeepMinionAlive) {
  MinionServer server(fast_settings());
  server.start();
  RawClient c(server.port());
  c.hello("steady");
  for (int i = 0; i < 15; ++i) {
    c.send(MessageType::kHeartbeat);
    std::this_thread::sleep_for(100ms);
  }
  EXPECT_EQ(server.alive_count(), 1u);
  server.stop();
}

TEST(Collect, HeartbeatsInterleavedWithTaskAndBadUploadRerequested) {
  MinionServer server(fast_settings());
  server.start();
  RawClient c(server.port());
  c.hello("manual");
  const CollectRequest req = request(1, 2);
  auto fut = std::async(std::launch::async, [&] { return server.collect(req); });

  auto bc = c.expect(MessageType::kModelBroadcast);
  ASSERT_TRUE(bc.has_value());
  const env::PolicySnapshot snap = env::snapshot_from_payload(bc->payload);
  EXPECT_EQ(snap.weights_hash, req.snapshot.weights_hash);
  auto task = c.expect(MessageType::kGenerateTrainingData);
  ASSERT_TRUE(task.has_value());
  EXPECT_EQ(task->cycle, 1u);
  EXPECT_EQ(task->payload["num_episodes"], 2);

  auto build_upload = [&](const nlohmann::json& t, const std::string& hash) {
    nlohmann::json episodes = nlohmann::json::array(), ids = nlohmann::json::array();
    for (const auto& ep : t["episodes"]) {
      env::EpisodeTask et;
      et.episode_id = ep["id"];
      et.seed = ep["seed"];
      et.episode_length = t["episode_length"];
      episodes.push_back(rl::to_json(env::run_episode(snap, et, env::pendulum_space()).trajectory));
      ids.push_back(et.episode_id);
      c.send(MessageType::kHeartbeat);
    }
    return nlohmann::json{{"episodes", episodes}, {"episode_ids", ids}, {"kind", "training"},
                          {"weights_hash", hash}};
  };
  // wrong hash first: must be thrown away and the work handed out again
  c.send(MessageType::kExperienceUpload,
         build_upload(task->payload, env::hash_to_hex(snap.weights_hash ^ 1)), 1);
  auto again = c.expect(MessageType::kGenerateTrainingData);
  ASSERT_TRUE(again.has_value());
  c.send(MessageType::kExperienceUpload,
         build_upload(again->payload, env::hash_to_hex(snap.weights_hash)), 1);

  const auto result = fut.get();
  ASSERT_TRUE(result.has_value());
  ASSERT_EQ(result->size(), 2u);
  EXPECT_EQ((*result)[0].episode_id, 0u);
  EXPECT_EQ((*result)[1].episode_id, 1u);
  EXPECT_EQ((*result)[0].size(), 20u);
  EXPECT_GE(server.counters().uploads_rejected, 1u);
  server.stop();
}

TEST(Collect, TwoMinionsShareWorkInRegistrationOrder) {
  MinionServer server(fast_settings());
  server.start();
  std::vector<std::size_t> sizes(2, 0);
  std::vector<std::unique_ptr<env::Minion>> minions;
  std::vector<std::thread> threads;
  for (int i = 0; i < 2; ++i) {
    env::MinionOptions o;
    o.port = server.port();
    o.minion_id = "w" + std::to_string(i);
    o.on_task = [&sizes, i](const WireMessage& m) {
      sizes[static_cast<std::size_t>(i)] = m.payload["num_episodes"].get<std::size_t>();
      return true;
    };
    minions.push_back(std::make_unique<env::Minion>(o));
    threads.emplace_back([m = minions.back().get()] { m->run(); });
    ASSERT_TRUE(server.wait_for_minions(static_cast<std::size_t>(i + 1), Seconds(3)));
  }
  const auto result = server.collect(request(1, 3));
  ASSERT_TRUE(result.has_value());
  EXPECT_EQ(result->size(), 3u);
  EXPECT_EQ(sizes, (std::vector<std::size_t>{2, 1}));
  server.stop();
  for (auto& t : threads) t.join();
}

TEST(Collect, MinionCrashMidCycleStillDeliversEveryEpisode) {
  MinionServer server(fast_settings());
  server.start();
  std::vector<std::unique_ptr<env::Minion>> minions;
  std::vector<std::thread> threads;
  for (int i = 0; i < 2; ++i) {
    env::MinionOptions o;
    o.port = server.port();
    o.minion_id = "w" + std::to_string(i);
    if (i == 0) o.on_task = [](const WireMessage&) { return false; };  // dies on its first task
    minions.push_back(std::make_unique<env::Minion>(o));
    threads.emplace_back([m = minions.back().get()] { m->run(); });
    ASSERT_TRUE(server.wait_for_minions(static_cast<std::size_t>(i + 1), Seconds(3)));
  }
  const auto result = server.collect(request(1, 3));
  ASSERT_TRUE(result.has_value());
  ASSERT_EQ(result->size(), 3u);
  for (std::size_t i = 0; i < 3; ++i) EXPECT_EQ((*result)[i].episode_id, i);
  EXPECT_EQ(server.counters().deaths, 1u);
  EXPECT_GE(server.counters().episodes_requeued, 2u);
  EXPECT_EQ(minions[1]->episodes_generated(), 3u);
  server.stop();
  for (auto& t : threads) t.join();
}

TEST(Collect, ValidationGoesToSingleMinion) {
  MinionServer server(fast_settings());
  server.start();
  std::vector<std::unique_ptr<env::Minion>> minions;
  std::vector<std::thread> threads;
  for (int i = 0; i < 2; ++i) {
    env::MinionOptions o;
    o.port = server.port();
    o.minion_id = "v" + std::to_string(i);
    minions.push_back(std::make_unique<env::Minion>(o));
    threads.emplace_back([m = minions.back().get()] { m->run(); });
    ASSERT_TRUE(server.wait_for_minions(static_cast<std::size_t>(i + 1), Seconds(3)));
  }
  CollectRequest req = request(5, 1, 200);
  req.validation = true;
  req.initial = env::InitialConditions{3.141592653589793, 0.0};
  const auto result = server.collect(req);
  ASSERT_TRUE(result.has_value());
  ASSERT_EQ(result->size(), 1u);
  EXPECT_EQ((*result)[0].size(), 200u);
  EXPECT_EQ(minions[0]->episodes_generated(), 1u);
  EXPECT_EQ(minions[1]->episodes_generated(), 0u);
  server.stop();
  for (auto& t : threads) t.join();
}

TEST(Minion, ShutdownEndsRunWithZero) {
  MinionServer server(fast_settings());
  server.start();
  env::MinionOptions o;
  o.port = server.port();
  env::Minion m(o);
  auto rc = std::async(std::launch::async, [&] { return m.run(); });
  ASSERT_TRUE(server.wait_for_minions(1, Seconds(3)));
  server.stop();
  ASSERT_EQ(rc.wait_for(5s), std::future_status::ready);
  EXPECT_EQ(rc.get(), 0);
}

// The server tells the minion to heartbeat far less often than its own
// timeout, so it keeps dropping the link; the minion must keep coming back.
TEST(Minion, ReconnectsAfterServerDropsLink) {
  ServerSettings s = fast_settings();
  s.heartbeat_interval = Seconds(5.0);
  s.monitor.heartbeat_timeout = Seconds(0.2);
  s.monitor_period = Seconds(0.05);
  MinionServer server(s);
  server.start();
  env::MinionOptions o;
  o.port = server.port();
  o.backoff_initial = 20ms;
  o.backoff_max = 100ms;
  env::Minion m(o);
  auto rc = std::async(std::launch::async, [&] { return m.run(); });
  ASSERT_TRUE(wait_until([&] { return m.connections_made() >= 3; }, 5000ms));
  EXPECT_GE(server.counters().deaths, 2u);
  server.stop();
  ASSERT_EQ(rc.wait_for(5s), std::future_status::ready);
  EXPECT_EQ(rc.get(), 0);
}
