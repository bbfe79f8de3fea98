#include "xrl/harness/sweep.hpp"

#include <limits>

#include "xrl/envs/environment.hpp"
#include "xrl/error.hpp"
#include "xrl/parallel.hpp"

namespace xrl::harness {

namespace {

// One snapshot to evaluate: either already in memory or a file to load.
struct SnapshotJob {
  std::string label;
  std::size_t iteration = 0;
  const buffer::PolicySnapshot* snapshot = nullptr;
  std::filesystem::path file;
};

TransferReport evaluate_jobs(const std::vector<SnapshotJob>& jobs, TaskParam param,
                             const std::vector<double>& values,
                             const envs::TaskSpec& base, std::size_t n_episodes,
                             std::uint64_t base_seed, std::size_t workers) {
  if (n_episodes < 1) throw UsageError("sweep needs at least one episode per task");
  const auto grid = build_grid(base, param, values);
  for (const auto& task : grid) {
    if (task.env_id != grid.front().env_id) throw UsageError("grid mixes environments");
  }

  TransferReport report;
  report.rows.resize(jobs.size() * grid.size());
  const double nan = std::numeric_limits<double>::quiet_NaN();
  parallel_for(jobs.size(), workers, [&](std::size_t j) {
    const SnapshotJob& job = jobs[j];
    std::optional<buffer::PolicySnapshot> loaded;
    const buffer::PolicySnapshot* snap = job.snapshot;
    if (!snap) {
      try {
        loaded = buffer::load_snapshot(job.file);
        if (loaded->iteration == job.iteration) snap = &*loaded;
      } catch (const IoError&) {
      } catch (const UsageError&) {
      }
    }
    bool usable = snap != nullptr;
    if (usable) {
      // An obs/action shape mismatch with the env makes the snapshot unusable.
      const auto env = envs::make_env(grid.front());
      usable = snap->policy.obs_dim() == env->observation_dim() &&
               snap->policy.action_dim() == env->action_dim();
    }
    for (std::size_t t = 0; t < grid.size(); ++t) {
      ReportRow& row = report.rows[j * grid.size() + t];
      row.algo = job.label;
      row.iteration = job.iteration;
      row.param = std::string(to_string(param));
      row.value = values[t];
      row.n = n_episodes;
      row.base_seed = base_seed;
      row.mean = nan;
      row.std = nan;
      if (!usable) continue;
      try {
        const auto r = buffer::evaluate_snapshot(*snap, grid[t], n_episodes, base_seed);
        row.mean = r.mean_return;
        row.std = r.std_return;
      } catch (const NumericalError&) {
      }
    }
  });
  sort_report(report);
  return report;
}

}  // namespace

TransferReport run_sweep(const SweepSpec& spec) {
  if (spec.buffers.empty()) throw UsageError("sweep needs at least one buffer");
  std::vector<SnapshotJob> jobs;
  std::optional<envs::TaskSpec> base = spec.base_task;
  for (const auto& src : spec.buffers) {
    const auto manifest = buffer::read_manifest(src.dir);
    if (!base) base = manifest.provenance.source_task;
    if (manifest.provenance.source_task.env_id != base->env_id) {
      throw UsageError("buffer " + src.dir.string() + " was trained on a different environment");
    }
    const std::string label = src.label.empty() ? manifest.provenance.algorithm : src.label;
    for (const auto& [iteration, file] : manifest.files) {
      jobs.push_back(SnapshotJob{label, iteration, nullptr, file});
    }
  }
  return evaluate_jobs(jobs, spec.param, spec.values, *base, spec.n_episodes,
                       spec.base_seed, spec.workers);
}

TransferReport run_sweep(const std::vector<LabeledBuffer>& buffers, TaskParam param,
                         const std::vector<double>& values, const envs::TaskSpec& base,
                         std::size_t n_episodes, std::uint64_t base_seed,
                         std::size_t workers) {
  std::vector<SnapshotJob> jobs;
  for (const auto& b : buffers) {
    if (!b.buffer) throw UsageError("null buffer in sweep");
    for (const auto& s : b.buffer->snapshots()) {
      jobs.push_back(SnapshotJob{b.label, s.iteration, &s, {}});
    }
  }
  return evaluate_jobs(jobs, param, values, base, n_episodes, base_seed, workers);
}

}  // namespace xrl::harness
