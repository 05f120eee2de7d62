#pragma once

#include <atomic>
#include <condition_variable>
#include <cstdint>
#include <deque>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "rlcycle/env/policy.hpp"
#include "rlcycle/env/rollout.hpp"
#include "rlcycle/rl/experience.hpp"
#include "rlcycle/rl/spaces.hpp"
#include "rlcycle/wire/message.hpp"
#include "rlcycle/wire/sessions.hpp"
#include "rlcycle/wire/socket.hpp"

namespace rlcycle::master {

struct ServerSettings {
  std::string host = "127.0.0.1";
  std::uint16_t port = 0;
  wire::Seconds heartbeat_interval{5.0};
  wire::MonitorSettings monitor;
  wire::Seconds monitor_period{1.0};
  rl::SpaceSpec space;
};

struct EpisodeSpec {
  std::uint64_t id = 0;
  std::uint64_t seed = 0;
};

struct CollectRequest {
  std::uint64_t cycle = 0;
  bool validation = false;
  env::PolicySnapshot snapshot;
  std::vector<EpisodeSpec> episodes;
  int episode_length = 200;
  std::optional<env::InitialConditions> initial;
};

struct ServerCounters {
  std::size_t uploads_accepted = 0;
  std::size_t uploads_rejected = 0;
  std::size_t episodes_requeued = 0;
  std::size_t deaths = 0;  // excludes sessions closed by stop()
};

// Accepts minions, tracks their liveness, and farms out episode generation.
class MinionServer {
 public:
  // Binds immediately; throws wire::PortInUse.
  explicit MinionServer(ServerSettings settings);
  ~MinionServer();
  MinionServer(const MinionServer&) = delete;
  MinionServer& operator=(const MinionServer&) = delete;

  std::uint16_t port() const { return port_; }
  void start();
  // Sends shutdown to every live minion, then closes all connections.
  void stop();

  std::vector<wire::MinionSession> sessions() const;
  std::size_t alive_count() const;
  bool wait_for_minions(std::size_t n, wire::Seconds timeout);
  ServerCounters counters() const;

  // Blocks until every requested episode is uploaded; trajectories come back
  // ordered by episode id. Dead minions' work is requeued, corrupt uploads are
  // discarded and re-requested. nullopt if the server stops meanwhile.
  std::optional<std::vector<rl::Trajectory>> collect(const CollectRequest& request);

 private:
  struct Peer {
    std::shared_ptr<wire::Connection> conn;
    std::thread reader;
  };
  struct Upload {
    std::uint64_t connection_id;
    wire::WireMessage msg;
  };

  void accept_loop();
  void reader_loop(std::uint64_t id, std::shared_ptr<wire::Connection> conn);
  void monitor_loop();
  void handle(std::uint64_t id, wire::Connection& conn, const wire::WireMessage& msg);
  void kill_session(std::uint64_t id, wire::Clock::time_point now);
  wire::MinionSession* find_session(std::uint64_t id);

  ServerSettings settings_;
  wire::Listener listener_;
  std::uint16_t port_ = 0;
  std::atomic<bool> running_{false};

  mutable std::mutex mutex_;
  std::condition_variable cv_;
  std::map<std::uint64_t, Peer> peers_;
  std::vector<wire::MinionSession> sessions_;
  std::deque<Upload> uploads_;
  std::uint64_t next_connection_id_ = 1;
  std::uint64_t next_registration_ = 0;
  ServerCounters counters_;

  std::thread accept_thread_;
  std::thread monitor_thread_;
};

}  // namespace rlcycle::master
