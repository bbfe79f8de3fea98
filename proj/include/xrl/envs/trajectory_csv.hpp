#pragma once

#include <filesystem>
#include <ostream>
#include <vector>

namespace xrl::envs {

struct StepRecord {
  std::size_t step = 0;
  std::vector<double> state;
  std::vector<double> action_pro;
  std::vector<double> action_adv;
  double reward_pro = 0.0;
  double reward_adv = 0.0;
  bool terminated = false;
  bool truncated = false;
};

// Columns: step, s0..sN, pro0..proN, adv0..advN, reward_pro, reward_adv,
// terminated, truncated. Widths are taken from the first record.
void write_trajectory_csv(std::ostream& out, const std::vector<StepRecord>& records);
void write_trajectory_csv(const std::filesystem::path& path,
                          const std::vector<StepRecord>& records);

}  // namespace xrl::envs
