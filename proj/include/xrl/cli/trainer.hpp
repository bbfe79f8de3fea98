#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <vector>

#include "xrl/cli/run_config.hpp"

namespace xrl::cli {

struct TrainSummary {
  std::size_t iterations = 0;          // updates completed
  std::vector<double> source_returns;  // mean training return per rollout
};

// Trains on the source task, writing under `out`:
//   config.cfg         resolved configuration (the echo)
//   train_log.csv      one row per iteration
//   buffer/            protagonist policy buffer
//   adversary/         adversary snapshots (adversarial algorithms only)
// Snapshot k holds the policy after k updates; its source return is the mean
// return of the rollout collected with it. A numerical failure keeps
// everything written so far and rethrows.
TrainSummary train_run(const RunConfig& config, const std::filesystem::path& out,
                       std::ostream* progress = nullptr);

}  // namespace xrl::cli
