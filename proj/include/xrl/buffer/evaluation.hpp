#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "xrl/buffer/policy_buffer.hpp"
#include "xrl/envs/dynamics.hpp"

namespace xrl::buffer {

inline constexpr std::size_t kDefaultEvalEpisodes = 32;

struct EvalResult {
  double mean_return = 0.0;
  double std_return = 0.0;  // population standard deviation
};

// Runs the mean action (no sampling, no adversary) for `n_episodes` episodes
// seeded base_seed, base_seed + 1, ... and summarizes the undiscounted returns.
EvalResult evaluate_policy(const nnet::GaussianPolicy& policy,
                           const envs::TaskSpec& task, std::size_t n_episodes,
                           std::uint64_t base_seed);

inline EvalResult evaluate_snapshot(const PolicySnapshot& snapshot,
                                    const envs::TaskSpec& task,
                                    std::size_t n_episodes, std::uint64_t base_seed) {
  return evaluate_policy(snapshot.policy, task, n_episodes, base_seed);
}

// Validation tasks lying between the source and the target task.
struct ProxyTaskSet {
  std::vector<envs::TaskSpec> tasks;
  std::size_t episodes_per_task = kDefaultEvalEpisodes;
};

// Checks non-emptiness and that every numeric parameter of every proxy task
// lies between the source and target values (inclusive).
void validate_proxy(const ProxyTaskSet& proxy, const envs::TaskSpec& source,
                    const envs::TaskSpec& target);

struct Selection {
  std::size_t index = 0;  // position in the buffer
  std::size_t iteration = 0;
  double score = 0.0;
  std::vector<double> scores;  // per snapshot, buffer order
};

// Argmax over snapshots of the unweighted mean (over proxy tasks) of the mean
// evaluation return; ties go to the earliest iteration.
Selection select_policy(const PolicyBuffer& buffer, const ProxyTaskSet& proxy,
                        std::uint64_t base_seed, std::size_t workers = 1);

// The argmax rule on precomputed scores (buffer order = iteration order).
std::size_t argmax_earliest(const std::vector<double>& scores);

}  // namespace xrl::buffer
