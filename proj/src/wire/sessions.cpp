#include "rlcycle/wire/sessions.hpp"

#include <utility>

#include "rlcycle/errors.hpp"

namespace rlcycle::wire {

std::string_view to_string(SessionState s) {
  switch (s) {
    case SessionState::kIdle: return "idle";
    case SessionState::kWorking: return "working";
    case SessionState::kDead: return "dead";
  }
  return "dead";
}

void begin_work(MinionSession& s, std::vector<std::uint64_t> episodes, Clock::time_point now) {
  if (s.state != SessionState::kIdle) {
    throw ContractError("session " + s.minion_id + " is " + std::string(to_string(s.state)) +
                        ", cannot start work");
  }
  s.state = SessionState::kWorking;
  s.work_started = now;
  s.assigned_episodes = std::move(episodes);
}

std::vector<std::uint64_t> finish_work(MinionSession& s) {
  if (s.state != SessionState::kWorking) {
    throw ContractError("session " + s.minion_id + " is not working");
  }
  s.state = SessionState::kIdle;
  s.work_started.reset();
  return std::exchange(s.assigned_episodes, {});
}

std::vector<std::uint64_t> mark_dead(MinionSession& s, Clock::time_point now) {
  if (s.state == SessionState::kDead) return {};
  s.state = SessionState::kDead;
  s.died_at = now;
  s.work_started.reset();
  return std::exchange(s.assigned_episodes, {});
}

std::vector<std::uint64_t> monitor(std::span<const MinionSession> sessions,
                                   Clock::time_point now, const MonitorSettings& settings) {
  std::vector<std::uint64_t> dead;
  for (const auto& s : sessions) {
    if (s.state == SessionState::kDead) continue;
    const bool silent = Seconds(now - s.last_seen) > settings.heartbeat_timeout;
    const bool overdue = s.state == SessionState::kWorking && s.work_started &&
                         Seconds(now - *s.work_started) > settings.task_deadline;
    if (silent || overdue) dead.push_back(s.connection_id);
  }
  return dead;
}

std::vector<int> split_workload(int total_episodes, int alive_minions) {
  if (total_episodes < 0) throw DomainError("negative episode count");
  if (alive_minions <= 0) throw DomainError("no minions to split work over");
  std::vector<int> counts(static_cast<std::size_t>(alive_minions),
                          total_episodes / alive_minions);
  for (int i = 0; i < total_episodes % alive_minions; ++i) ++counts[static_cast<std::size_t>(i)];
  return counts;
}

std::string unique_minion_id(const std::string& requested, const std::set<std::string>& taken) {
  const std::string base = requested.empty() ? "minion" : requested;
  if (!taken.contains(base)) return base;
  for (int k = 2;; ++k) {
    std::string candidate = base + "-" + std::to_string(k);
    if (!taken.contains(candidate)) return candidate;
  }
}

}  // namespace rlcycle::wire
