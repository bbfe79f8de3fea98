#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "xrl/buffer/evaluation.hpp"
#include "xrl/buffer/policy_buffer.hpp"
#include "xrl/harness/grid.hpp"
#include "xrl/harness/report.hpp"

namespace xrl::harness {

struct BufferSource {
  std::filesystem::path dir;
  std::string label;  // empty: the algorithm recorded in the manifest
};

struct SweepSpec {
  std::vector<BufferSource> buffers;
  TaskParam param = TaskParam::kGravity;
  std::vector<double> values;
  // Grid base; defaults to the source task of the first buffer.
  std::optional<envs::TaskSpec> base_task;
  std::size_t n_episodes = buffer::kDefaultEvalEpisodes;
  std::uint64_t base_seed = 0;
  std::size_t workers = 1;
};

// Every snapshot of every buffer evaluated zero-shot on every grid task with
// the same evaluation seeds. A snapshot that cannot be read yields failed
// (NaN) rows and the sweep carries on. Rows sorted by (value, iter, algo).
TransferReport run_sweep(const SweepSpec& spec);

// In-memory variant over already loaded buffers.
struct LabeledBuffer {
  std::string label;
  const buffer::PolicyBuffer* buffer = nullptr;
};

TransferReport run_sweep(const std::vector<LabeledBuffer>& buffers, TaskParam param,
                         const std::vector<double>& values, const envs::TaskSpec& base,
                         std::size_t n_episodes, std::uint64_t base_seed,
                         std::size_t workers = 1);

}  // namespace xrl::harness
