#include "rlcycle/env/minion.hpp"

#include <condition_variable>
#include <thread>
#include <vector>

#include <spdlog/spdlog.h>

#include "rlcycle/env/pendulum.hpp"
#include "rlcycle/errors.hpp"
#include "rlcycle/hash.hpp"

namespace rlcycle::env {

using wire::MessageType;
using wire::WireMessage;

namespace {

// Sends heartbeats until destroyed.
class Heartbeat {
 public:
  Heartbeat(wire::Connection& conn, std::string id, std::chrono::milliseconds interval)
      : thread_([this, &conn, id = std::move(id), interval] {
          std::unique_lock lock(m_);
          while (!cv_.wait_for(lock, interval, [this] { return done_; })) {
            if (!conn.send({MessageType::kHeartbeat, 0, {{"minion_id", id}}})) return;
          }
        }) {}
  ~Heartbeat() {
    {
      std::lock_guard lock(m_);
      done_ = true;
    }
    cv_.notify_all();
    thread_.join();
  }

 private:
  std::mutex m_;
  std::condition_variable cv_;
  bool done_ = false;
  std::thread thread_;
};

}  // namespace

Minion::Minion(MinionOptions options) : options_(std::move(options)) {
  spec_ = pendulum_space();
}

Minion::~Minion() { request_stop(); }

void Minion::request_stop() {
  stop_ = true;
}

void Minion::kill() {
  stop_ = true;
  std::lock_guard lock(mutex_);
  if (current_) current_->shutdown();
}

std::string Minion::registered_id() const {
  std::lock_guard lock(mutex_);
  return registered_id_;
}

void Minion::sleep_for(std::chrono::milliseconds d) {
  const auto until = std::chrono::steady_clock::now() + d;
  while (!stop_ && std::chrono::steady_clock::now() < until) {
    std::this_thread::sleep_for(std::chrono::milliseconds(20));
  }
}

int Minion::run() {
  auto backoff = options_.backoff_initial;
  while (!stop_) {
    std::shared_ptr<wire::Connection> conn;
    try {
      conn = std::make_shared<wire::Connection>(wire::connect_to(options_.host, options_.port));
    } catch (const std::exception& e) {
      spdlog::debug("minion {}: {} (retry in {} ms)", options_.minion_id, e.what(),
                    backoff.count());
      sleep_for(backoff);
      backoff = std::min(backoff * 2, options_.backoff_max);
      continue;
    }
    backoff = options_.backoff_initial;
    ++connections_made_;
    {
      std::lock_guard lock(mutex_);
      current_ = conn;
    }
    const SessionEnd end = serve(*conn);
    {
      std::lock_guard lock(mutex_);
      current_.reset();
    }
    if (end == SessionEnd::kShutdown) return 0;
    if (end == SessionEnd::kRejected) return 1;
    if (end == SessionEnd::kDropped && !stop_) {
      spdlog::info("minion {}: connection lost, reconnecting", options_.minion_id);
      sleep_for(backoff);
    }
  }
  return 0;
}

Minion::SessionEnd Minion::serve(wire::Connection& conn) {
  using namespace std::chrono_literals;
  if (!conn.send({MessageType::kHello, 0,
                  {{"protocol_version", wire::kProtocolVersion},
                   {"minion_id", options_.minion_id}}})) {
    return SessionEnd::kDropped;
  }

  // Handshake.
  const auto deadline = std::chrono::steady_clock::now() + 10s;
  for (;;) {
    if (stop_) return SessionEnd::kStopped;
    if (std::chrono::steady_clock::now() > deadline) return SessionEnd::kDropped;
    bool closed = false;
    std::optional<WireMessage> msg;
    try {
      msg = conn.receive(100ms, &closed);
    } catch (const std::exception& e) {
      spdlog::warn("minion {}: bad handshake reply: {}", options_.minion_id, e.what());
      return SessionEnd::kDropped;
    }
    if (closed) return SessionEnd::kDropped;
    if (!msg) continue;
    if (msg->type == MessageType::kError) {
      spdlog::error("minion {}: rejected: {}", options_.minion_id,
                    msg->payload.value("reason", std::string("unknown")));
      return SessionEnd::kRejected;
    }
    if (msg->type != MessageType::kHelloAck) continue;
    if (!msg->payload.value("accepted", false)) return SessionEnd::kRejected;
    {
      std::lock_guard lock(mutex_);
      registered_id_ = msg->payload.value("minion_id", options_.minion_id);
    }
    if (msg->payload.contains("space_spec")) {
      spec_ = rl::space_spec_from_json(msg->payload["space_spec"]);
    }
    const double hb = msg->payload.value("heartbeat_interval", 5.0);
    heartbeat_interval_ = std::chrono::milliseconds(static_cast<long>(hb * 1000.0));
    break;
  }

  Heartbeat heartbeat(conn, registered_id(), heartbeat_interval_);
  while (!stop_) {
    bool closed = false;
    std::optional<WireMessage> msg;
    try {
      msg = conn.receive(100ms, &closed);
    } catch (const wire::UnknownMessageType& e) {
      conn.send(wire::make_error(0, e.what()));
      continue;
    } catch (const wire::FrameTooLarge& e) {
      spdlog::error("minion {}: {}", options_.minion_id, e.what());
      return SessionEnd::kDropped;
    } catch (const std::exception& e) {
      conn.send(wire::make_error(0, e.what()));
      continue;
    }
    if (closed) return SessionEnd::kDropped;
    if (!msg) continue;
    switch (msg->type) {
      case MessageType::kShutdown:
        spdlog::info("minion {}: shutdown received", registered_id());
        return SessionEnd::kShutdown;
      case MessageType::kModelBroadcast:
        try {
          snapshot_ = snapshot_from_payload(msg->payload);
        } catch (const std::exception& e) {
          snapshot_.reset();
          conn.send(wire::make_error(msg->cycle, std::string("bad model: ") + e.what()));
        }
        break;
      case MessageType::kGenerateTrainingData:
      case MessageType::kGenerateValidationData:
        if (options_.on_task && !options_.on_task(*msg)) {
          stop_ = true;
          conn.shutdown();
          return SessionEnd::kStopped;
        }
        handle_task(conn, *msg);
        break;
      case MessageType::kError:
        spdlog::warn("minion {}: master reported: {}", registered_id(),
                     msg->payload.value("reason", std::string("?")));
        break;
      default:
        break;
    }
  }
  return SessionEnd::kStopped;
}

void Minion::handle_task(wire::Connection& conn, const WireMessage& msg) {
  const bool validation = msg.type == MessageType::kGenerateValidationData;
  if (!snapshot_) {
    conn.send(wire::make_error(msg.cycle, "no model received"));
    return;
  }
  const auto& p = msg.payload;
  std::vector<EpisodeTask> tasks;
  try {
    const int n = p.at("num_episodes").get<int>();
    if (n < 0) throw DomainError("negative num_episodes");
    const int length = p.value("episode_length", 200);
    std::optional<InitialConditions> initial;
    if (p.contains("initial_conditions") && !p["initial_conditions"].is_null()) {
      const auto& ic = p["initial_conditions"];
      initial = InitialConditions{ic.at("phi").get<double>(), ic.at("phi_dot").get<double>()};
    }
    for (int i = 0; i < n; ++i) {
      EpisodeTask t;
      if (p.contains("episodes")) {
        const auto& ep = p["episodes"].at(static_cast<std::size_t>(i));
        t.episode_id = ep.at("id").get<std::uint64_t>();
        t.seed = ep.at("seed").get<std::uint64_t>();
      } else {
        t.episode_id = static_cast<std::uint64_t>(i);
        t.seed = derive_seed(options_.seed, msg.cycle, static_cast<std::uint64_t>(i));
      }
      t.mode = validation ? ActMode::kValidation : ActMode::kTraining;
      t.initial = initial;
      t.episode_length = length;
      tasks.push_back(t);
    }
  } catch (const std::exception& e) {
    conn.send(wire::make_error(msg.cycle, std::string("bad task: ") + e.what()));
    return;
  }

  nlohmann::json episodes = nlohmann::json::array();
  nlohmann::json ids = nlohmann::json::array();
  for (const auto& t : tasks) {
    if (stop_) return;
    try {
      EpisodeOutcome out = run_episode(*snapshot_, t, spec_, options_.postprocess);
      episodes.push_back(rl::to_json(out.trajectory));
      ids.push_back(t.episode_id);
      ++episodes_generated_;
    } catch (const NumericError& e) {
      // Aborted episode; the master will see it missing and reschedule.
      spdlog::warn("minion {}: episode {} aborted: {}", registered_id(), t.episode_id,
                   e.what());
    }
  }
  conn.send({MessageType::kExperienceUpload, msg.cycle,
             {{"episodes", std::move(episodes)},
              {"episode_ids", std::move(ids)},
              {"kind", validation ? "validation" : "training"},
              {"weights_hash", hash_to_hex(snapshot_->weights_hash)}}});
}

}  // namespace rlcycle::env
