#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "rlcycle/master/config.hpp"
#include "rlcycle/nn/network.hpp"
#include "rlcycle/rl/experience.hpp"
#include "rlcycle/rl/spaces.hpp"

namespace rlcycle::master {

struct CycleStats {
  std::uint64_t cycle = 0;
  std::size_t num_experiences = 0;
  std::vector<double> episode_returns;
  double mean_return = 0.0;
  double min_return = 0.0;
  double max_return = 0.0;
  std::size_t gradient_steps = 0;
  double loss = 0.0;
  double kl_or_td = 0.0;  // mean KL (PPO) or mean |TD error| (DDPG)
  double wall_seconds = 0.0;
};

// Fills the return summary from the episodes.
CycleStats summarize_cycle(std::uint64_t cycle, const std::vector<rl::Trajectory>& episodes);

struct TraceRow {
  int time_step = 0;
  double x = 0.0;
  double y = 0.0;
  double phi_dot = 0.0;
  double action = 0.0;  // torque
  double reward = 0.0;
};

// Physical-unit trace of an uploaded (normalised) validation episode.
std::vector<TraceRow> validation_trace(const rl::Trajectory& episode, const rl::SpaceSpec& spec);

// Shortest text that reads back to the same double.
std::string format_number(double x);

// Owns the files of one output directory. Construction truncates the CSVs.
class ResultWriter {
 public:
  explicit ResultWriter(std::filesystem::path dir);

  const std::filesystem::path& dir() const { return dir_; }

  void write_config(const MasterConfig& config) const;
  void append_training(const CycleStats& stats) const;
  void append_validation(std::uint64_t cycle, double episode_return) const;
  void write_trace(std::uint64_t cycle, const std::vector<TraceRow>& rows) const;
  void write_checkpoint(std::uint64_t cycle, const nn::Network& policy) const;
  void write_final(const nn::Network& policy) const;

  std::filesystem::path training_csv() const { return dir_ / "training_returns.csv"; }
  std::filesystem::path validation_csv() const { return dir_ / "validation_returns.csv"; }
  std::filesystem::path stats_csv() const { return dir_ / "training_stats.csv"; }
  std::filesystem::path trace_csv(std::uint64_t cycle) const;
  std::filesystem::path checkpoint(std::uint64_t cycle) const;

 private:
  std::filesystem::path dir_;
};

}  // namespace rlcycle::master
