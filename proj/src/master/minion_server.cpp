#include "rlcycle/master/minion_server.hpp"

#include <algorithm>
#include <set>

#include <spdlog/spdlog.h>

#include "rlcycle/errors.hpp"

namespace rlcycle::master {

using wire::Clock;
using wire::MessageType;
using wire::SessionState;
using wire::WireMessage;
using namespace std::chrono_literals;

namespace {

constexpr int kMaxAttemptsPerEpisode = 8;

}  // namespace

MinionServer::MinionServer(ServerSettings settings)
    : settings_(std::move(settings)), listener_(settings_.host, settings_.port) {
  port_ = listener_.port();
}

MinionServer::~MinionServer() { stop(); }

void MinionServer::start() {
  if (running_.exchange(true)) return;
  accept_thread_ = std::thread([this] { accept_loop(); });
  monitor_thread_ = std::thread([this] { monitor_loop(); });
}

void MinionServer::stop() {
  if (!running_.exchange(false)) return;
  {
    std::lock_guard lock(mutex_);
    for (auto& s : sessions_) {
      if (s.state == SessionState::kDead) continue;
      if (auto it = peers_.find(s.connection_id); it != peers_.end()) {
        it->second.conn->send({MessageType::kShutdown, 0, nlohmann::json::object()});
      }
    }
    for (auto& [id, peer] : peers_) peer.conn->shutdown();
  }
  cv_.notify_all();
  if (accept_thread_.joinable()) accept_thread_.join();
  if (monitor_thread_.joinable()) monitor_thread_.join();
  std::map<std::uint64_t, Peer> peers;
  {
    std::lock_guard lock(mutex_);
    peers.swap(peers_);
  }
  for (auto& [id, peer] : peers) {
    if (peer.reader.joinable()) peer.reader.join();
  }
  listener_.close();
}

std::vector<wire::MinionSession> MinionServer::sessions() const {
  std::lock_guard lock(mutex_);
  return sessions_;
}

std::size_t MinionServer::alive_count() const {
  std::lock_guard lock(mutex_);
  return static_cast<std::size_t>(std::count_if(sessions_.begin(), sessions_.end(), [](const auto& s) {
    return s.state != SessionState::kDead;
  }));
}

bool MinionServer::wait_for_minions(std::size_t n, wire::Seconds timeout) {
  std::unique_lock lock(mutex_);
  return cv_.wait_for(lock, timeout, [&] {
    const auto alive = std::count_if(sessions_.begin(), sessions_.end(), [](const auto& s) {
      return s.state != SessionState::kDead;
    });
    return static_cast<std::size_t>(alive) >= n || !running_;
  }) && running_;
}

ServerCounters MinionServer::counters() const {
  std::lock_guard lock(mutex_);
  return counters_;
}

wire::MinionSession* MinionServer::find_session(std::uint64_t id) {
  for (auto& s : sessions_) {
    if (s.connection_id == id) return &s;
  }
  return nullptr;
}

void MinionServer::kill_session(std::uint64_t id, Clock::time_point now) {
  if (auto* s = find_session(id); s != nullptr && s->state != SessionState::kDead) {
    wire::mark_dead(*s, now);
    if (running_) {
      ++counters_.deaths;
      spdlog::warn("minion {} declared dead", s->minion_id);
    }
  }
  if (auto it = peers_.find(id); it != peers_.end()) it->second.conn->shutdown();
  cv_.notify_all();
}

void MinionServer::accept_loop() {
  while (running_) {
    auto sock = listener_.accept(100ms);
    if (!sock) continue;
    std::lock_guard lock(mutex_);
    if (!running_) break;
    const std::uint64_t id = next_connection_id_++;
    auto conn = std::make_shared<wire::Connection>(std::move(*sock));
    Peer& peer = peers_[id];
    peer.conn = conn;
    peer.reader = std::thread([this, id, conn] { reader_loop(id, conn); });
  }
}

void MinionServer::reader_loop(std::uint64_t id, std::shared_ptr<wire::Connection> conn) {
  while (running_) {
    bool closed = false;
    std::optional<WireMessage> msg;
    try {
      msg = conn->receive(200ms, &closed);
    } catch (const wire::UnknownMessageType& e) {
      conn->send(wire::make_error(0, e.what()));
      std::lock_guard lock(mutex_);
      if (auto* s = find_session(id)) s->last_seen = Clock::now();
      continue;
    } catch (const wire::FrameTooLarge& e) {
      spdlog::error("connection {}: {}", id, e.what());
      closed = true;
    } catch (const std::exception& e) {
      conn->send(wire::make_error(0, e.what()));
      continue;
    }
    if (closed) break;
    if (msg) handle(id, *conn, *msg);
  }
  std::lock_guard lock(mutex_);
  kill_session(id, Clock::now());
}

void MinionServer::handle(std::uint64_t id, wire::Connection& conn, const WireMessage& msg) {
  std::lock_guard lock(mutex_);
  const auto now = Clock::now();
  wire::MinionSession* session = find_session(id);
  if (session != nullptr) {
    if (session->state == SessionState::kDead) return;
    session->last_seen = now;
  }

  switch (msg.type) {
    case MessageType::kHello: {
      if (session != nullptr) {
        conn.send(wire::make_error(msg.cycle, "already registered"));
        return;
      }
      const int version = msg.payload.value("protocol_version", -1);
      if (version != wire::kProtocolVersion) {
        conn.send(wire::make_error(
            msg.cycle, "protocol version " + std::to_string(version) + " not supported (need " +
                           std::to_string(wire::kProtocolVersion) + ")"));
        conn.shutdown();
        return;
      }
      std::set<std::string> taken;
      for (const auto& s : sessions_) taken.insert(s.minion_id);
      wire::MinionSession s;
      s.connection_id = id;
      s.registration_order = next_registration_++;
      s.minion_id = wire::unique_minion_id(msg.payload.value("minion_id", std::string()), taken);
      s.last_seen = now;
      sessions_.push_back(s);
      conn.send({MessageType::kHelloAck,
                 msg.cycle,
                 {{"accepted", true},
                  {"minion_id", s.minion_id},
                  {"protocol_version", wire::kProtocolVersion},
                  {"heartbeat_interval", settings_.heartbeat_interval.count()},
                  {"space_spec", rl::to_json(settings_.space)}}});
      spdlog::info("minion {} registered", s.minion_id);
      cv_.notify_all();
      return;
    }
    case MessageType::kHeartbeat:
      return;
    case MessageType::kExperienceUpload:
      if (session == nullptr) {
        conn.send(wire::make_error(msg.cycle, "hello first"));
        return;
      }
      uploads_.push_back({id, msg});
      cv_.notify_all();
      return;
    case MessageType::kError:
      spdlog::warn("minion {} reported: {}", session ? session->minion_id : std::to_string(id),
                   msg.payload.value("reason", std::string("?")));
      return;
    default:
      conn.send(wire::make_error(msg.cycle, "unexpected message '" +
                                                std::string(wire::to_string(msg.type)) + "'"));
      return;
  }
}

void MinionServer::monitor_loop() {
  std::unique_lock lock(mutex_);
  while (running_) {
    const auto now = Clock::now();
    for (std::uint64_t id : wire::monitor(sessions_, now, settings_.monitor)) {
      kill_session(id, now);
    }
    // Next check at the next period or right after the earliest possible
    // timeout, whichever comes first.
    auto wake = now + std::chrono::duration_cast<Clock::duration>(settings_.monitor_period);
    for (const auto& s : sessions_) {
      if (s.state == SessionState::kDead) continue;
      const auto t = s.last_seen +
                     std::chrono::duration_cast<Clock::duration>(settings_.monitor.heartbeat_timeout) +
                     1ms;
      wake = std::min(wake, std::max(t, now + 1ms));
    }
    cv_.wait_until(lock, wake);
  }
}

std::optional<std::vector<rl::Trajectory>> MinionServer::collect(const CollectRequest& req) {
  const nlohmann::json model = env::broadcast_payload(req.snapshot);
  const std::string hash = env::hash_to_hex(req.snapshot.weights_hash);
  const std::size_t total = req.episodes.size();

  std::map<std::uint64_t, EpisodeSpec> pending;  // ordered by id
  std::map<std::uint64_t, int> attempts;
  for (const auto& e : req.episodes) {
    if (!pending.emplace(e.id, e).second) throw ContractError("duplicate episode id");
  }
  std::map<std::uint64_t, rl::Trajectory> received;
  std::map<std::uint64_t, std::vector<EpisodeSpec>> assigned;  // by connection
  std::set<std::uint64_t> has_model;
  bool waiting_logged = false;

  std::unique_lock lock(mutex_);
  auto requeue = [&](const std::vector<EpisodeSpec>& eps) {
    for (const auto& e : eps) {
      if (received.contains(e.id)) continue;
      pending.emplace(e.id, e);
      ++counters_.episodes_requeued;
    }
  };

  for (auto& s : sessions_) {
    if (s.state == SessionState::kDead) continue;
    if (peers_.at(s.connection_id).conn->send({MessageType::kModelBroadcast, req.cycle, model})) {
      has_model.insert(s.connection_id);
    }
  }

  while (received.size() < total) {
    if (!running_) return std::nullopt;

    // Work held by minions that died.
    for (auto it = assigned.begin(); it != assigned.end();) {
      const auto* s = find_session(it->first);
      if (s == nullptr || s->state == SessionState::kDead) {
        requeue(it->second);
        it = assigned.erase(it);
      } else {
        ++it;
      }
    }

    // Uploads.
    while (!uploads_.empty()) {
      Upload up = std::move(uploads_.front());
      uploads_.pop_front();
      auto* s = find_session(up.connection_id);
      auto a = assigned.find(up.connection_id);
      if (s == nullptr || s->state == SessionState::kDead || a == assigned.end() ||
          up.msg.cycle != req.cycle) {
        continue;  // stale
      }
      const auto& p = up.msg.payload;
      const std::string kind = req.validation ? "validation" : "training";
      std::vector<EpisodeSpec> mine = std::move(a->second);
      assigned.erase(a);
      wire::finish_work(*s);
      std::map<std::uint64_t, rl::Trajectory> good;
      std::string problem;
      try {
        if (p.value("kind", std::string()) != kind) throw ContractError("wrong kind");
        if (p.value("weights_hash", std::string()) != hash) {
          throw ContractError("weights hash mismatch");
        }
        const auto& eps = p.at("episodes");
        const auto& ids = p.at("episode_ids");
        if (eps.size() != ids.size()) throw ContractError("episode/id count mismatch");
        for (std::size_t k = 0; k < eps.size(); ++k) {
          const auto eid = ids[k].get<std::uint64_t>();
          const bool expected = std::any_of(mine.begin(), mine.end(),
                                            [&](const EpisodeSpec& e) { return e.id == eid; });
          if (!expected) throw ContractError("unexpected episode id");
          rl::Trajectory t = rl::trajectory_from_json(eps[k], eid);
          rl::validate(t, settings_.space);
          if (t.experiences.size() != static_cast<std::size_t>(req.episode_length) ||
              !t.terminal()) {
            throw ContractError("incomplete episode");
          }
          good.emplace(eid, std::move(t));
        }
      } catch (const std::exception& e) {
        problem = e.what();
      }
      if (!problem.empty()) {
        ++counters_.uploads_rejected;
        spdlog::warn("discarding upload from {}: {}", s->minion_id, problem);
        for (const auto& e : mine) {
          if (++attempts[e.id] >= kMaxAttemptsPerEpisode) {
            throw std::runtime_error("episode " + std::to_string(e.id) +
                                     " failed too many times");
          }
        }
        requeue(mine);
        continue;
      }
      ++counters_.uploads_accepted;
      std::vector<EpisodeSpec> missing;
      for (const auto& e : mine) {
        if (!good.contains(e.id)) missing.push_back(e);
      }
      for (auto& [eid, t] : good) received.emplace(eid, std::move(t));
      requeue(missing);
    }

    // Assignments.
    if (!pending.empty()) {
      std::vector<wire::MinionSession*> idle;
      for (auto& s : sessions_) {
        if (s.state == SessionState::kIdle) idle.push_back(&s);
      }
      std::sort(idle.begin(), idle.end(), [](const auto* a, const auto* b) {
        return a->registration_order < b->registration_order;
      });
      if (req.validation && idle.size() > 1) idle.resize(1);
      const bool any_alive = std::any_of(sessions_.begin(), sessions_.end(), [](const auto& s) {
        return s.state != SessionState::kDead;
      });
      if (!any_alive && !waiting_logged) {
        spdlog::warn("no live minions; waiting for reconnection");
        waiting_logged = true;
      }
      if (any_alive) waiting_logged = false;
      if (!idle.empty()) {
        const auto counts = wire::split_workload(static_cast<int>(pending.size()),
                                                 static_cast<int>(idle.size()));
        for (std::size_t i = 0; i < idle.size() && !pending.empty(); ++i) {
          if (counts[i] == 0) continue;
          wire::MinionSession& s = *idle[i];
          auto& conn = *peers_.at(s.connection_id).conn;
          std::vector<EpisodeSpec> batch;
          for (int k = 0; k < counts[i]; ++k) {
            batch.push_back(pending.begin()->second);
            pending.erase(pending.begin());
          }
          bool ok = true;
          if (!has_model.contains(s.connection_id)) {
            ok = conn.send({MessageType::kModelBroadcast, req.cycle, model});
            if (ok) has_model.insert(s.connection_id);
          }
          nlohmann::json eps = nlohmann::json::array();
          std::vector<std::uint64_t> ids;
          for (const auto& e : batch) {
            eps.push_back({{"id", e.id}, {"seed", e.seed}});
            ids.push_back(e.id);
          }
          nlohmann::json payload{{"num_episodes", batch.size()},
                                 {"episodes", eps},
                                 {"episode_length", req.episode_length},
                                 {"weights_hash", hash}};
          if (req.initial) {
            payload["initial_conditions"] = {{"phi", req.initial->phi},
                                             {"phi_dot", req.initial->phi_dot}};
          }
          const auto type = req.validation ? MessageType::kGenerateValidationData
                                           : MessageType::kGenerateTrainingData;
          wire::begin_work(s, ids, Clock::now());
          assigned[s.connection_id] = batch;
          if (!ok || !conn.send({type, req.cycle, payload})) {
            kill_session(s.connection_id, Clock::now());
          }
        }
      }
    }

    if (received.size() < total) cv_.wait_for(lock, 100ms);
  }

  std::vector<rl::Trajectory> out;
  out.reserve(total);
  for (auto& [id, t] : received) out.push_back(std::move(t));
  return out;
}

}  // namespace rlcycle::master
