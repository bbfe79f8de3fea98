#include "xrl/harness/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>
#include <tuple>

#include "xrl/error.hpp"
#include "xrl/ppo/train_log.hpp"

namespace xrl::harness {

namespace {

constexpr const char* kHeader = "algo,iter,param,value,mean,std,n,base_seed";

bool same_double(double a, double b) {
  return (std::isnan(a) && std::isnan(b)) || a == b;
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::istringstream in(line);
  while (std::getline(in, cell, ',')) cells.push_back(cell);
  if (!line.empty() && line.back() == ',') cells.emplace_back();
  return cells;
}

double parse_cell_real(const std::string& cell, std::size_t line) {
  char* end = nullptr;
  const double v = std::strtod(cell.c_str(), &end);
  if (cell.empty() || end != cell.c_str() + cell.size()) {
    throw UsageError("report line " + std::to_string(line) + ": bad number '" + cell + "'");
  }
  return v;
}

unsigned long long parse_cell_uint(const std::string& cell, std::size_t line) {
  char* end = nullptr;
  const unsigned long long v = std::strtoull(cell.c_str(), &end, 10);
  if (cell.empty() || cell[0] == '-' || end != cell.c_str() + cell.size()) {
    throw UsageError("report line " + std::to_string(line) + ": bad integer '" + cell + "'");
  }
  return v;
}

}  // namespace

bool ReportRow::failed() const { return std::isnan(mean); }

bool ReportRow::operator==(const ReportRow& o) const {
  return algo == o.algo && iteration == o.iteration && param == o.param &&
         same_double(value, o.value) && same_double(mean, o.mean) &&
         same_double(std, o.std) && n == o.n && base_seed == o.base_seed;
}

void sort_report(TransferReport& report) {
  std::stable_sort(report.rows.begin(), report.rows.end(),
                   [](const ReportRow& a, const ReportRow& b) {
                     return std::tie(a.value, a.iteration, a.algo) <
                            std::tie(b.value, b.iteration, b.algo);
                   });
}

void write_report_csv(std::ostream& out, const TransferReport& report) {
  out << kHeader << '\n';
  for (const auto& r : report.rows) {
    out << r.algo << ',' << r.iteration << ',' << r.param << ','
        << ppo::format_double(r.value) << ',' << ppo::format_double(r.mean) << ','
        << ppo::format_double(r.std) << ',' << r.n << ',' << r.base_seed << '\n';
  }
}

void write_report_csv(const std::filesystem::path& path, const TransferReport& report) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError(path.string(), "cannot open report for writing");
  write_report_csv(out, report);
  out.flush();
  if (!out) throw IoError(path.string(), "write failed");
}

TransferReport read_report_csv(std::istream& in) {
  TransferReport report;
  std::string line;
  if (!std::getline(in, line) || line != kHeader) {
    throw UsageError("report header must be '" + std::string(kHeader) + "'");
  }
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto cells = split_csv(line);
    if (cells.size() != 8) {
      throw UsageError("report line " + std::to_string(line_no) + ": expected 8 columns");
    }
    ReportRow r;
    r.algo = cells[0];
    r.iteration = parse_cell_uint(cells[1], line_no);
    r.param = cells[2];
    r.value = parse_cell_real(cells[3], line_no);
    r.mean = parse_cell_real(cells[4], line_no);
    r.std = parse_cell_real(cells[5], line_no);
    r.n = parse_cell_uint(cells[6], line_no);
    r.base_seed = parse_cell_uint(cells[7], line_no);
    report.rows.push_back(std::move(r));
  }
  return report;
}

TransferReport read_report_csv(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError(path.string(), "cannot open report");
  try {
    return read_report_csv(in);
  } catch (const UsageError& err) {
    throw IoError(path.string(), err.what());
  }
}

std::vector<BestRow> best_iteration_table(const TransferReport& report) {
  if (report.rows.empty()) throw UsageError("best_iteration_table needs a non-empty report");
  using Key = std::tuple<std::string, std::string, double>;
  std::map<Key, BestRow> best;
  for (const auto& r : report.rows) {
    if (r.failed()) continue;
    const Key key{r.algo, r.param, r.value};
    auto it = best.find(key);
    const bool better = it == best.end() || r.mean > it->second.mean ||
                        (r.mean == it->second.mean && r.iteration < it->second.iteration);
    if (better) best[key] = BestRow{r.algo, r.param, r.value, r.iteration, r.mean, r.std};
  }
  std::vector<BestRow> rows;
  rows.reserve(best.size());
  for (auto& [key, row] : best) rows.push_back(std::move(row));
  return rows;
}

double success_threshold(double reference_return, double fraction) {
  return reference_return - (1.0 - fraction) * std::abs(reference_return);
}

std::optional<ValueRange> extrapolation_range(const std::vector<BestRow>& rows,
                                              double threshold, double source_value) {
  if (rows.empty()) return std::nullopt;
  std::vector<BestRow> sorted = rows;
  std::sort(sorted.begin(), sorted.end(),
            [](const BestRow& a, const BestRow& b) { return a.value < b.value; });
  std::size_t anchor = 0;
  for (std::size_t i = 1; i < sorted.size(); ++i) {
    if (std::abs(sorted[i].value - source_value) <
        std::abs(sorted[anchor].value - source_value)) {
      anchor = i;
    }
  }
  auto solved = [&](std::size_t i) { return sorted[i].mean >= threshold; };
  if (!solved(anchor)) return std::nullopt;
  std::size_t lo = anchor, hi = anchor;
  while (lo > 0 && solved(lo - 1)) --lo;
  while (hi + 1 < sorted.size() && solved(hi + 1)) ++hi;
  return ValueRange{sorted[lo].value, sorted[hi].value};
}

bool strictly_contains(const std::optional<ValueRange>& outer,
                       const std::optional<ValueRange>& inner) {
  if (!outer) return false;
  if (!inner) return true;
  return outer->lo <= inner->lo && outer->hi >= inner->hi && !(*outer == *inner);
}

}  // namespace xrl::harness
