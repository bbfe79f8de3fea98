#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "xrl/envs/dynamics.hpp"
#include "xrl/nnet/gaussian_policy.hpp"

namespace xrl::buffer {

struct PolicySnapshot {
  std::size_t iteration = 0;
  nnet::GaussianPolicy policy;
  std::string config_digest;
  // Mean training-episode return on the source task when captured.
  double source_return = 0.0;
};

// Where a buffer came from.
struct Provenance {
  envs::TaskSpec source_task;
  std::string algorithm = "ppo";
  std::string config_digest;
};

// Snapshots taken every `snapshot_interval` iterations, starting at 0. A
// final snapshot at an off-interval iteration may close the buffer.
//
// On disk (when bound to a directory):
//   <dir>/manifest.txt            provenance, interval, one line per snapshot
//   <dir>/snapshot_000010.xrlp    one model file per snapshot
// Each record() writes its snapshot and rewrites the manifest immediately.
class PolicyBuffer {
 public:
  explicit PolicyBuffer(std::size_t snapshot_interval, Provenance provenance = {});

  // Binds a fresh buffer to `dir`, creating it. Existing snapshot files and
  // manifest in `dir` are replaced.
  static PolicyBuffer create(const std::filesystem::path& dir,
                             std::size_t snapshot_interval, Provenance provenance);
  static PolicyBuffer load(const std::filesystem::path& dir);

  // Appends a snapshot. Requires iteration == 0 for the first record and
  // last + interval afterwards; `final` allows any later iteration and closes
  // the buffer.
  void record(std::size_t iteration, const nnet::GaussianPolicy& policy,
              double source_return, bool final = false);

  const std::vector<PolicySnapshot>& snapshots() const { return snapshots_; }
  std::size_t size() const { return snapshots_.size(); }
  bool empty() const { return snapshots_.empty(); }
  std::size_t snapshot_interval() const { return interval_; }
  const Provenance& provenance() const { return provenance_; }
  const std::optional<std::filesystem::path>& directory() const { return dir_; }
  bool closed() const { return closed_; }

  static std::string snapshot_file_name(std::size_t iteration);

 private:
  void write_manifest() const;

  std::size_t interval_;
  Provenance provenance_;
  std::vector<PolicySnapshot> snapshots_;
  std::optional<std::filesystem::path> dir_;
  bool closed_ = false;
};

// Loads a single snapshot file.
PolicySnapshot load_snapshot(const std::filesystem::path& file);

// Manifest contents without touching the snapshot files.
struct BufferManifest {
  std::size_t snapshot_interval = 0;
  Provenance provenance;
  bool closed = false;
  std::vector<std::pair<std::size_t, std::filesystem::path>> files;  // (iteration, path)
};

// Both accept a training run directory holding `buffer/` as well.
BufferManifest read_manifest(const std::filesystem::path& dir);
std::filesystem::path resolve_buffer_dir(const std::filesystem::path& dir);

}  // namespace xrl::buffer
