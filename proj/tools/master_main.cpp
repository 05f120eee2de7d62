// Trains a policy by farming episode generation out to minions.
#include <csignal>
#include <cstdio>
#include <thread>

#include <CLI11.hpp>
#include <spdlog/spdlog.h>

#include "rlcycle/errors.hpp"
#include "rlcycle/master/master.hpp"

namespace {

std::atomic<bool> g_interrupted{false};

void on_signal(int) { g_interrupted = true; }

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Training master"};
  std::string config_path;
  std::optional<std::uint64_t> total_cycles;
  std::optional<std::string> output_dir;
  std::optional<int> local_minions;
  std::optional<int> port;
  std::string log_level = "info";
  app.add_option("--config", config_path, "JSON configuration file")->required();
  app.add_option("--total-cycles", total_cycles, "override total_cycles");
  app.add_option("--output-dir", output_dir, "override output_dir");
  app.add_option("--local-minions", local_minions, "start this many in-process minions");
  app.add_option("--port", port, "override the listening port");
  app.add_option("--log-level", log_level, "trace|debug|info|warn|error");
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }
  spdlog::set_level(spdlog::level::from_str(log_level));

  rlcycle::master::MasterConfig config;
  try {
    config = rlcycle::master::load_master_config(config_path);
    if (total_cycles) config.total_cycles = *total_cycles;
    if (output_dir) config.output_dir = *output_dir;
    if (local_minions) config.local_minions = *local_minions;
    if (port) config.port = *port;
    config.validate();
  } catch (const std::exception& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 2;
  }

  std::unique_ptr<rlcycle::master::Master> master;
  try {
    master = std::make_unique<rlcycle::master::Master>(config);
  } catch (const rlcycle::wire::PortInUse& e) {
    std::fprintf(stderr, "%s\n", e.what());
    return 3;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "startup failed: %s\n", e.what());
    return 1;
  }

  std::signal(SIGINT, on_signal);
  std::signal(SIGTERM, on_signal);
  std::atomic<bool> finished{false};
  std::thread watcher([&] {
    while (!finished) {
      if (g_interrupted) {
        spdlog::warn("interrupted; stopping");
        master->request_stop();
        return;
      }
      std::this_thread::sleep_for(std::chrono::milliseconds(50));
    }
  });

  std::unique_ptr<rlcycle::master::LocalMinions> locals;
  if (config.local_minions > 0 && config.total_cycles > 0) {
    locals = std::make_unique<rlcycle::master::LocalMinions>(master->port(), config.local_minions,
                                                             config.seed);
  }
  int rc = 0;
  try {
    const auto summary = master->run_training();
    spdlog::info("finished {} of {} cycles", summary.cycles_completed, config.total_cycles);
    if (summary.interrupted) rc = 130;
  } catch (const std::exception& e) {
    spdlog::error("training failed: {}", e.what());
    rc = 1;
  }
  finished = true;
  watcher.join();
  locals.reset();
  return rc;
}
