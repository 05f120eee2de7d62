// Turns a results directory into plot-ready tables.
#include <cstdio>

#include <CLI11.hpp>

#include "rlcycle/master/export.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Export smoothed returns and validation traces"};
  std::string input;
  std::string output;
  int window = 11;
  app.add_option("--input", input, "results directory")->required()->check(CLI::ExistingDirectory);
  app.add_option("--window", window, "moving-average window (odd)");
  app.add_option("--output", output, "destination (default: <input>/plots)");
  CLI11_PARSE(app, argc, argv);
  if (output.empty()) output = input + "/plots";
  try {
    const auto summary = rlcycle::master::export_plots(input, output, window);
    for (const auto& p : summary.written) std::printf("%s\n", p.string().c_str());
  } catch (const std::exception& e) {
    std::fprintf(stderr, "export failed: %s\n", e.what());
    return 1;
  }
  return 0;
}
