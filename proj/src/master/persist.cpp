#include "rlcycle/master/persist.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <numeric>

#include "rlcycle/errors.hpp"
#include "rlcycle/nn/manifest.hpp"
#include "rlcycle/rl/returns.hpp"

namespace rlcycle::master {

namespace fs = std::filesystem;

namespace {

std::ofstream open_for(const fs::path& p, std::ios::openmode mode) {
  std::ofstream out(p, mode);
  if (!out) throw std::runtime_error("cannot write " + p.string());
  return out;
}

}  // namespace

CycleStats summarize_cycle(std::uint64_t cycle, const std::vector<rl::Trajectory>& episodes) {
  CycleStats s;
  s.cycle = cycle;
  for (const auto& e : episodes) {
    s.num_experiences += e.experiences.size();
    s.episode_returns.push_back(rl::discounted_return(e, 1.0));
  }
  if (!s.episode_returns.empty()) {
    const auto& r = s.episode_returns;
    s.mean_return = std::accumulate(r.begin(), r.end(), 0.0) / static_cast<double>(r.size());
    s.min_return = *std::min_element(r.begin(), r.end());
    s.max_return = *std::max_element(r.begin(), r.end());
  }
  return s;
}

std::vector<TraceRow> validation_trace(const rl::Trajectory& episode, const rl::SpaceSpec& spec) {
  std::vector<TraceRow> rows;
  rows.reserve(episode.experiences.size());
  int t = 0;
  for (const auto& e : episode.experiences) {
    const auto& ob = spec.observation;
    TraceRow r;
    r.time_step = t++;
    r.x = rl::min_max_denormalize(e.obs.at(0), ob[0].lo, ob[0].hi);
    r.y = rl::min_max_denormalize(e.obs.at(1), ob[1].lo, ob[1].hi);
    r.phi_dot = rl::min_max_denormalize(e.obs.at(2), ob[2].lo, ob[2].hi);
    r.action = rl::denormalize_action(spec, e.action).at(0);
    r.reward = e.reward;
    rows.push_back(r);
  }
  return rows;
}

std::string format_number(double x) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), x);
  return std::string(buf, res.ptr);
}

ResultWriter::ResultWriter(fs::path dir) : dir_(std::move(dir)) {
  fs::create_directories(dir_);
  open_for(training_csv(), std::ios::trunc)
      << "cycle,num_experiences,mean_return,min_return,max_return\n";
  open_for(validation_csv(), std::ios::trunc) << "cycle,return\n";
  open_for(stats_csv(), std::ios::trunc) << "cycle,gradient_steps,loss,kl_or_td,wall_seconds\n";
}

void ResultWriter::write_config(const MasterConfig& config) const {
  open_for(dir_ / "config.json", std::ios::trunc) << to_json(config).dump(2) << "\n";
}

void ResultWriter::append_training(const CycleStats& s) const {
  open_for(training_csv(), std::ios::app)
      << s.cycle << ',' << s.num_experiences << ',' << format_number(s.mean_return) << ','
      << format_number(s.min_return) << ',' << format_number(s.max_return) << '\n';
  open_for(stats_csv(), std::ios::app)
      << s.cycle << ',' << s.gradient_steps << ',' << format_number(s.loss) << ','
      << format_number(s.kl_or_td) << ',' << format_number(s.wall_seconds) << '\n';
}

void ResultWriter::append_validation(std::uint64_t cycle, double episode_return) const {
  open_for(validation_csv(), std::ios::app) << cycle << ',' << format_number(episode_return)
                                            << '\n';
}

fs::path ResultWriter::trace_csv(std::uint64_t cycle) const {
  return dir_ / ("validation_trace_" + std::to_string(cycle) + ".csv");
}

fs::path ResultWriter::checkpoint(std::uint64_t cycle) const {
  return dir_ / ("weights_" + std::to_string(cycle) + ".json");
}

void ResultWriter::write_trace(std::uint64_t cycle, const std::vector<TraceRow>& rows) const {
  auto out = open_for(trace_csv(cycle), std::ios::trunc);
  out << "time_step,x,y,phi_dot,action,reward\n";
  for (const auto& r : rows) {
    out << r.time_step << ',' << format_number(r.x) << ',' << format_number(r.y) << ','
        << format_number(r.phi_dot) << ',' << format_number(r.action) << ','
        << format_number(r.reward) << '\n';
  }
}

void ResultWriter::write_checkpoint(std::uint64_t cycle, const nn::Network& policy) const {
  nn::save_manifest(policy, checkpoint(cycle).string());
}

void ResultWriter::write_final(const nn::Network& policy) const {
  nn::save_manifest(policy, (dir_ / "weights_final.json").string());
}

}  // namespace rlcycle::master
