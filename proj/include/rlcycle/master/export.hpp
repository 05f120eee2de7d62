#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace rlcycle::master {

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;

  std::size_t column(const std::string& name) const;  // throws ParseError
  std::vector<double> values(const std::string& name) const;
};

CsvTable read_csv(const std::filesystem::path& path);
void write_csv(const std::filesystem::path& path, const CsvTable& table);

struct ExportSummary {
  std::vector<std::filesystem::path> written;
};

// Writes plot-ready copies of a results directory into `output`: smoothed
// training and validation returns plus one file per validation trace (with
// the angle added). Source files are only read.
ExportSummary export_plots(const std::filesystem::path& input,
                           const std::filesystem::path& output, int window);

}  // namespace rlcycle::master
