#pragma once

#include <atomic>
#include <chrono>
#include <cstdint>
#include <functional>
#include <memory>
#include <mutex>
#include <optional>
#include <string>

#include "rlcycle/env/policy.hpp"
#include "rlcycle/env/rollout.hpp"
#include "rlcycle/rl/spaces.hpp"
#include "rlcycle/wire/message.hpp"
#include "rlcycle/wire/socket.hpp"

namespace rlcycle::env {

struct MinionOptions {
  std::string host = "127.0.0.1";
  std::uint16_t port = 0;
  std::string minion_id = "minion";
  std::uint64_t seed = 0;  // used only for tasks that carry no episode seeds
  std::chrono::milliseconds backoff_initial{100};
  std::chrono::milliseconds backoff_max{5000};
  PostprocessHook postprocess;
  // Called for every generate_* task before any work. Returning false makes the
  // minion drop its connection and stop, like a crashed process.
  std::function<bool(const wire::WireMessage&)> on_task;
};

// Generates episodes for a master until told to shut down.
class Minion {
 public:
  explicit Minion(MinionOptions options);
  ~Minion();

  // Serves tasks; reconnects with exponential backoff when the link drops.
  // Returns 0 after a shutdown message or request_stop(), 1 if the master
  // rejects the handshake.
  int run();
  void request_stop();
  // Abrupt disconnect without notifying the master.
  void kill();

  std::string registered_id() const;
  std::size_t episodes_generated() const { return episodes_generated_.load(); }
  std::size_t connections_made() const { return connections_made_.load(); }

 private:
  enum class SessionEnd { kDropped, kShutdown, kRejected, kStopped };

  SessionEnd serve(wire::Connection& conn);
  void handle_task(wire::Connection& conn, const wire::WireMessage& msg);
  void sleep_for(std::chrono::milliseconds d);

  MinionOptions options_;
  std::atomic<bool> stop_{false};
  std::atomic<std::size_t> episodes_generated_{0};
  std::atomic<std::size_t> connections_made_{0};

  mutable std::mutex mutex_;
  std::shared_ptr<wire::Connection> current_;
  std::string registered_id_;

  std::optional<PolicySnapshot> snapshot_;
  rl::SpaceSpec spec_;
  std::chrono::milliseconds heartbeat_interval_{5000};
};

}  // namespace rlcycle::env
