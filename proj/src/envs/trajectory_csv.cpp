#include "xrl/envs/trajectory_csv.hpp"

#include <cstdio>
#include <fstream>

#include "xrl/error.hpp"

namespace xrl::envs {

namespace {

std::string fmt_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

void write_trajectory_csv(std::ostream& out, const std::vector<StepRecord>& records) {
  const StepRecord empty;
  const StepRecord& shape = records.empty() ? empty : records.front();
  out << "step";
  for (std::size_t i = 0; i < shape.state.size(); ++i) out << ",s" << i;
  for (std::size_t i = 0; i < shape.action_pro.size(); ++i) out << ",pro" << i;
  for (std::size_t i = 0; i < shape.action_adv.size(); ++i) out << ",adv" << i;
  out << ",reward_pro,reward_adv,terminated,truncated\n";
  for (const auto& r : records) {
    if (r.state.size() != shape.state.size() ||
        r.action_pro.size() != shape.action_pro.size() ||
        r.action_adv.size() != shape.action_adv.size()) {
      throw UsageError("trajectory records have inconsistent widths");
    }
    out << r.step;
    for (double v : r.state) out << ',' << fmt_double(v);
    for (double v : r.action_pro) out << ',' << fmt_double(v);
    for (double v : r.action_adv) out << ',' << fmt_double(v);
    out << ',' << fmt_double(r.reward_pro) << ',' << fmt_double(r.reward_adv) << ','
        << (r.terminated ? 1 : 0) << ',' << (r.truncated ? 1 : 0) << '\n';
  }
}

void write_trajectory_csv(const std::filesystem::path& path,
                          const std::vector<StepRecord>& records) {
  std::ofstream out(path);
  if (!out) throw IoError(path.string(), "cannot open for writing");
  write_trajectory_csv(out, records);
  if (!out) throw IoError(path.string(), "write failed");
}

}  // namespace xrl::envs
