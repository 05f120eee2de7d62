#pragma once

#include <chrono>
#include <cstdint>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

namespace rlcycle::wire {

using Clock = std::chrono::steady_clock;
using Seconds = std::chrono::duration<double>;

enum class SessionState { kIdle, kWorking, kDead };

std::string_view to_string(SessionState s);

struct MinionSession {
  std::uint64_t connection_id = 0;
  std::uint64_t registration_order = 0;
  std::string minion_id;
  SessionState state = SessionState::kIdle;
  Clock::time_point last_seen{};
  std::optional<Clock::time_point> work_started;
  std::optional<Clock::time_point> died_at;
  std::vector<std::uint64_t> assigned_episodes;  // ids of the current task
};

// idle -> working. Throws ContractError from any other state.
void begin_work(MinionSession& s, std::vector<std::uint64_t> episodes, Clock::time_point now);
// working -> idle; returns the episodes that were assigned.
std::vector<std::uint64_t> finish_work(MinionSession& s);
// any -> dead; returns the episodes that need to be requeued.
std::vector<std::uint64_t> mark_dead(MinionSession& s, Clock::time_point now);

struct MonitorSettings {
  Seconds heartbeat_timeout{15.0};
  Seconds task_deadline{600.0};
};

// Sessions that are not dead yet but should be: silent for longer than the
// heartbeat timeout, or working for longer than the task deadline.
std::vector<std::uint64_t> monitor(std::span<const MinionSession> sessions,
                                   Clock::time_point now, const MonitorSettings& settings);

// Episode counts per minion in registration order. Counts differ by at most
// one; the first `total % minions` minions take the extra episode.
std::vector<int> split_workload(int total_episodes, int alive_minions);

// `requested` if free, otherwise the first of requested-2, requested-3, ...
std::string unique_minion_id(const std::string& requested, const std::set<std::string>& taken);

}  // namespace rlcycle::wire
