#pragma once

#include <atomic>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <unistd.h>

#include "rlcycle/env/pendulum.hpp"
#include "rlcycle/master/config.hpp"

namespace rlcycle::tutil {

// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    static std::atomic<int> counter{0};
    path_ = std::filesystem::temp_directory_path() /
            ("rlcycle_" + tag + "_" + std::to_string(::getpid()) + "_" +
             std::to_string(counter++));
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

inline std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Ephemeral port, short heartbeats.
inline master::MasterConfig quick_config(rl::Algorithm alg, const std::filesystem::path& out,
                                         std::uint64_t cycles, std::uint64_t seed = 1) {
  master::MasterConfig c;
  c.algorithm = alg;
  c.space = env::pendulum_space();
  c.total_cycles = cycles;
  c.output_dir = out.string();
  c.port = 0;
  c.seed = seed;
  c.heartbeat_interval = 0.2;
  c.heartbeat_timeout = 2.0;
  c.monitor_period = 0.1;
  return c;
}

}  // namespace rlcycle::tutil
