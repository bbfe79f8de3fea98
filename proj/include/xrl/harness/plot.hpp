#pragma once

#include <cstddef>
#include <filesystem>
#include <string>
#include <vector>

#include "xrl/harness/report.hpp"

namespace xrl::harness {

struct PlotFiles {
  std::vector<std::filesystem::path> csv;
  std::vector<std::filesystem::path> svg;
};

// Per task (param, value): `task_NN_<param>_<value>.csv` with columns
// algo,iter,mean,std and a standalone SVG line chart of mean ± std against
// iteration, one line per algorithm. Tasks are numbered in value order.
PlotFiles emit_plot_data(const TransferReport& report, const std::filesystem::path& dir);

struct PlotRow {
  std::string algo;
  std::size_t iteration = 0;
  double mean = 0.0;
  double std = 0.0;
};

std::vector<PlotRow> read_plot_csv(const std::filesystem::path& path);

// The SVG document for one task's rows; exposed for testing.
std::string render_chart(const std::string& title, const std::vector<PlotRow>& rows);

}  // namespace xrl::harness
