#include "rlcycle/master/export.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "rlcycle/errors.hpp"
#include "rlcycle/master/persist.hpp"
#include "rlcycle/master/smoothing.hpp"

namespace rlcycle::master {

namespace fs = std::filesystem;

std::size_t CsvTable::column(const std::string& name) const {
  const auto it = std::find(header.begin(), header.end(), name);
  if (it == header.end()) throw ParseError("no column '" + name + "'");
  return static_cast<std::size_t>(it - header.begin());
}

std::vector<double> CsvTable::values(const std::string& name) const {
  const std::size_t c = column(name);
  std::vector<double> out;
  out.reserve(rows.size());
  for (const auto& r : rows) out.push_back(r.at(c));
  return out;
}

CsvTable read_csv(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot read " + path.string());
  CsvTable t;
  std::string line;
  if (!std::getline(in, line)) throw ParseError(path.string() + " is empty");
  std::stringstream hs(line);
  for (std::string cell; std::getline(hs, cell, ',');) t.header.push_back(cell);
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<double> row;
    std::stringstream ls(line);
    for (std::string cell; std::getline(ls, cell, ',');) {
      try {
        row.push_back(std::stod(cell));
      } catch (const std::exception&) {
        throw ParseError(path.string() + ": bad number '" + cell + "'");
      }
    }
    if (row.size() != t.header.size()) throw ParseError(path.string() + ": ragged row");
    t.rows.push_back(std::move(row));
  }
  return t;
}

void write_csv(const fs::path& path, const CsvTable& table) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  for (std::size_t i = 0; i < table.header.size(); ++i) {
    out << (i ? "," : "") << table.header[i];
  }
  out << '\n';
  for (const auto& r : table.rows) {
    for (std::size_t i = 0; i < r.size(); ++i) out << (i ? "," : "") << format_number(r[i]);
    out << '\n';
  }
}

namespace {

CsvTable with_smoothed(const CsvTable& src, const std::string& key, const std::string& series,
                       int window) {
  const auto xs = src.values(series);
  const auto smooth = moving_average(xs, window);
  CsvTable out;
  out.header = {key, series, "smoothed_" + series};
  const auto keys = src.values(key);
  for (std::size_t i = 0; i < xs.size(); ++i) out.rows.push_back({keys[i], xs[i], smooth[i]});
  return out;
}

}  // namespace

ExportSummary export_plots(const fs::path& input, const fs::path& output, int window) {
  if (window < 1 || window % 2 == 0) throw DomainError("window must be odd and >= 1");
  if (fs::exists(output) && fs::equivalent(input, output)) {
    throw DomainError("output directory must differ from the input directory");
  }
  fs::create_directories(output);
  ExportSummary summary;

  const fs::path training = input / "training_returns.csv";
  const CsvTable tr = read_csv(training);
  CsvTable tr_out = with_smoothed(tr, "cycle", "mean_return", window);
  tr_out.header.push_back("min_return");
  tr_out.header.push_back("max_return");
  const auto mins = tr.values("min_return");
  const auto maxs = tr.values("max_return");
  for (std::size_t i = 0; i < tr_out.rows.size(); ++i) {
    tr_out.rows[i].push_back(mins[i]);
    tr_out.rows[i].push_back(maxs[i]);
  }
  summary.written.push_back(output / "training_returns_smoothed.csv");
  write_csv(summary.written.back(), tr_out);

  const fs::path validation = input / "validation_returns.csv";
  if (fs::exists(validation)) {
    summary.written.push_back(output / "validation_returns_smoothed.csv");
    write_csv(summary.written.back(),
              with_smoothed(read_csv(validation), "cycle", "return", window));
  }

  std::vector<fs::path> traces;
  for (const auto& entry : fs::directory_iterator(input)) {
    const std::string name = entry.path().filename().string();
    if (name.starts_with("validation_trace_") && entry.path().extension() == ".csv") {
      traces.push_back(entry.path());
    }
  }
  std::sort(traces.begin(), traces.end());
  for (const auto& p : traces) {
    const CsvTable src = read_csv(p);
    CsvTable out;
    out.header = {"time_step", "x", "y", "phi", "phi_dot", "action", "reward"};
    const auto t = src.values("time_step"), x = src.values("x"), y = src.values("y"),
               w = src.values("phi_dot"), a = src.values("action"), r = src.values("reward");
    for (std::size_t i = 0; i < src.rows.size(); ++i) {
      out.rows.push_back({t[i], x[i], y[i], std::atan2(y[i], x[i]), w[i], a[i], r[i]});
    }
    summary.written.push_back(output / ("plot_" + p.filename().string()));
    write_csv(summary.written.back(), out);
  }
  return summary;
}

}  // namespace rlcycle::master
