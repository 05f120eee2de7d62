// Generates pendulum episodes for a master.
#include <csignal>
#include <thread>

#include <CLI11.hpp>
#include <spdlog/spdlog.h>

#include "rlcycle/env/minion.hpp"

namespace {

std::atomic<bool> g_interrupted{false};

void on_signal(int) { g_interrupted = true; }

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Episode-generating minion"};
  rlcycle::env::MinionOptions options;
  int port = 5555;
  std::string log_level = "info";
  app.add_option("--master-host", options.host, "master address");
  app.add_option("--master-port", port, "master port")->check(CLI::Range(1, 65535));
  app.add_option("--minion-id", options.minion_id, "requested minion id");
  app.add_option("--seed", options.seed, "fallback seed for tasks without episode seeds");
  app.add_option("--log-level", log_level, "trace|debug|info|warn|error");
  CLI11_PARSE(app, argc, argv);
  options.port = static_cast<std::uint16_t>(port);
  spdlog::set_level(spdlog::level::from_str(log_level));

  rlcycle::env::Minion minion(options);
  std::signal(SIGINT, on_signal);
  std::signal(SIGTERM, on_signal);
  std::atomic<bool> finished{false};
  std::thread watcher([&] {
    while (!finished) {
      if (g_interrupted) {
        minion.request_stop();
        return;
      }
      std::this_thread::sleep_for(std::chrono::milliseconds(50));
    }
  });
  const int rc = minion.run();
  finished = true;
  watcher.join();
  return g_interrupted ? 130 : rc;
}
