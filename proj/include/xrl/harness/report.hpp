#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace xrl::harness {

struct ReportRow {
  std::string algo;
  std::size_t iteration = 0;
  std::string param;
  double value = 0.0;
  double mean = 0.0;  // NaN for a failed row
  double std = 0.0;   // NaN for a failed row
  std::size_t n = 0;
  std::uint64_t base_seed = 0;

  bool failed() const;
  bool operator==(const ReportRow& other) const;
};

struct TransferReport {
  std::vector<ReportRow> rows;
};

// Orders rows by (task value, iteration, algo).
void sort_report(TransferReport& report);

// CSV with header exactly `algo,iter,param,value,mean,std,n,base_seed`;
// reals printed with 17 significant digits, failed cells as `nan`.
void write_report_csv(std::ostream& out, const TransferReport& report);
void write_report_csv(const std::filesystem::path& path, const TransferReport& report);
TransferReport read_report_csv(std::istream& in);
TransferReport read_report_csv(const std::filesystem::path& path);

struct BestRow {
  std::string algo;
  std::string param;
  double value = 0.0;
  std::size_t iteration = 0;
  double mean = 0.0;
  double std = 0.0;
};

// Per (algo, param, value) group the row with the largest mean; ties go to
// the earliest iteration. Failed rows are ignored; groups with no valid row
// are omitted. Output is ordered by (algo, value).
std::vector<BestRow> best_iteration_table(const TransferReport& report);

struct ValueRange {
  double lo = 0.0;
  double hi = 0.0;
  bool operator==(const ValueRange&) const = default;
};

// Success threshold `fraction` of a reference return, valid for either sign:
// ref - (1 - fraction) * |ref|.
double success_threshold(double reference_return, double fraction = 0.9);

// Contiguous run (in value order) of solved tasks, mean >= threshold, that
// contains the grid value closest to `source_value`. Empty when that task
// itself is unsolved. `rows` must belong to one algo.
std::optional<ValueRange> extrapolation_range(const std::vector<BestRow>& rows,
                                              double threshold, double source_value);

// `outer` covers `inner` and is larger; an empty inner range is strictly
// contained in any non-empty outer range.
bool strictly_contains(const std::optional<ValueRange>& outer,
                       const std::optional<ValueRange>& inner);

}  // namespace xrl::harness
