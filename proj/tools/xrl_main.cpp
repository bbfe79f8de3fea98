// Command-line entry point: train, eval, sweep, select, plot.
//
// Exit codes: 0 success, 1 usage error, 2 numerical failure, 3 IO failure.

#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "xrl/buffer/evaluation.hpp"
#include "xrl/buffer/policy_buffer.hpp"
#include "xrl/cli/config_grammar.hpp"
#include "xrl/cli/run_config.hpp"
#include "xrl/cli/trainer.hpp"
#include "xrl/error.hpp"
#include "xrl/harness/grid.hpp"
#include "xrl/harness/plot.hpp"
#include "xrl/harness/report.hpp"
#include "xrl/harness/sweep.hpp"
#include "xrl/nnet/serialize.hpp"
#include "xrl/parallel.hpp"
#include "xrl/ppo/train_log.hpp"

namespace fs = std::filesystem;
using namespace xrl;

namespace {

constexpr int kOk = 0, kUsage = 1, kNumerical = 2, kIo = 3;

struct TrainArgs {
  std::string config, out;
  std::optional<std::uint64_t> seed;
  bool quiet = false;
};

struct EvalArgs {
  std::string snapshot, buffer, task, param;
  std::optional<std::size_t> iter;
  std::optional<double> value;
  std::size_t episodes = buffer::kDefaultEvalEpisodes;
  std::uint64_t base_seed = 0;
};

struct SweepArgs {
  std::vector<std::string> buffers, labels;
  std::string param, values, out;
  std::size_t episodes = buffer::kDefaultEvalEpisodes;
  std::uint64_t base_seed = 0;
  std::size_t workers = default_workers();
};

struct SelectArgs {
  std::string buffer, proxy;
  std::uint64_t base_seed = 0;
  std::size_t workers = default_workers();
};

struct PlotArgs {
  std::string report, out;
};

std::string ensure_option(const std::string& value, const char* flag) {
  if (value.empty()) throw UsageError(std::string("missing ") + flag);
  return value;
}

int run_train(const TrainArgs& a) {
  cli::RunConfig config = cli::parse_config(
      a.config.empty() ? std::string() : nnet::read_file(a.config));
  if (a.seed) config.master_seed = *a.seed;
  if (!a.out.empty()) config.output_dir = a.out;
  if (config.output_dir.empty()) throw UsageError("no output directory (--out or run.out)");
  const auto summary =
      cli::train_run(config, config.output_dir, a.quiet ? nullptr : &std::cerr);
  std::cout << "trained " << summary.iterations << " iterations into "
            << config.output_dir << '\n';
  return kOk;
}

// Source task of a buffer, optionally one parameter moved.
envs::TaskSpec eval_task(const EvalArgs& a, const std::optional<envs::TaskSpec>& buffer_task) {
  envs::TaskSpec task;
  if (!a.task.empty()) {
    task = cli::task_from_entries(cli::parse_entries(nnet::read_file(a.task)));
  } else if (buffer_task) {
    task = *buffer_task;
  } else {
    throw UsageError("--task is required with --snapshot");
  }
  if (a.value.has_value() != !a.param.empty()) {
    throw UsageError("--param and --value go together");
  }
  if (a.value) task = harness::build_grid(task, a.param, {*a.value}).front();
  return task;
}

int run_eval(const EvalArgs& a) {
  if (a.snapshot.empty() == a.buffer.empty()) {
    throw UsageError("give exactly one of --snapshot or --buffer");
  }
  buffer::PolicySnapshot snap;
  std::optional<envs::TaskSpec> source;
  if (!a.snapshot.empty()) {
    snap = buffer::load_snapshot(a.snapshot);
  } else {
    const auto manifest = buffer::read_manifest(a.buffer);
    if (manifest.files.empty()) throw UsageError("buffer holds no snapshots");
    source = manifest.provenance.source_task;
    fs::path file = manifest.files.back().second;
    if (a.iter) {
      file.clear();
      for (const auto& [iteration, path] : manifest.files) {
        if (iteration == *a.iter) file = path;
      }
      if (file.empty()) throw UsageError("no snapshot at iteration " + std::to_string(*a.iter));
    }
    snap = buffer::load_snapshot(file);
  }
  const envs::TaskSpec task = eval_task(a, source);
  const auto r = buffer::evaluate_snapshot(snap, task, a.episodes, a.base_seed);
  std::cout << "iter " << snap.iteration << " mean " << ppo::format_double(r.mean_return)
            << " std " << ppo::format_double(r.std_return) << " n " << a.episodes << '\n';
  return kOk;
}

int run_sweep(const SweepArgs& a) {
  if (a.buffers.empty()) throw UsageError("at least one --buffer required");
  if (!a.labels.empty() && a.labels.size() != a.buffers.size()) {
    throw UsageError("--label must be given once per --buffer or not at all");
  }
  harness::SweepSpec spec;
  for (std::size_t i = 0; i < a.buffers.size(); ++i) {
    spec.buffers.push_back({a.buffers[i], a.labels.empty() ? "" : a.labels[i]});
  }
  spec.param = harness::parse_task_param(ensure_option(a.param, "--param"));
  spec.values = cli::parse_real_list(ensure_option(a.values, "--values"));
  if (spec.values.empty()) throw UsageError("--values is empty");
  spec.n_episodes = a.episodes;
  spec.base_seed = a.base_seed;
  spec.workers = a.workers;
  const fs::path out = a.out.empty() ? fs::path(a.buffers.front()) / "sweep" : fs::path(a.out);

  const harness::TransferReport report = harness::run_sweep(spec);
  std::error_code ec;
  fs::create_directories(out, ec);
  if (ec) throw IoError(out.string(), "cannot create sweep directory: " + ec.message());
  harness::write_report_csv(out / "report.csv", report);
  const auto files = harness::emit_plot_data(report, out / "plots");
  std::size_t failed = 0;
  for (const auto& row : report.rows) failed += row.failed() ? 1 : 0;
  if (failed) std::cerr << failed << " rows failed (unreadable snapshots)\n";
  std::cout << "report " << (out / "report.csv").string() << " rows " << report.rows.size()
            << " tasks " << files.csv.size() << '\n';
  return kOk;
}

// Proxy file: proxy.param, proxy.values, optional proxy.episodes and
// proxy.target; proxy tasks derive from the buffer's source task.
buffer::ProxyTaskSet read_proxy(const fs::path& path, const envs::TaskSpec& source) {
  std::string param;
  std::vector<double> values;
  std::optional<double> target;
  buffer::ProxyTaskSet proxy;
  for (const auto& e : cli::parse_entries(nnet::read_file(path))) {
    if (e.key == "proxy.param") {
      param = e.value;
    } else if (e.key == "proxy.values") {
      try {
        values = cli::parse_real_list(e.value);
      } catch (const UsageError& err) {
        cli::config_error(e, err.what());
      }
    } else if (e.key == "proxy.episodes") {
      proxy.episodes_per_task = cli::parse_count(e);
    } else if (e.key == "proxy.target") {
      target = cli::parse_real(e);
    } else {
      cli::config_error(e, "unknown key");
    }
  }
  if (param.empty() || values.empty()) {
    throw UsageError(path.string() + ": proxy.param and proxy.values are required");
  }
  proxy.tasks = harness::build_grid(source, param, values);
  if (target) {
    buffer::validate_proxy(proxy, source, harness::build_grid(source, param, {*target}).front());
  }
  return proxy;
}

int run_select(const SelectArgs& a) {
  const auto buf = buffer::PolicyBuffer::load(ensure_option(a.buffer, "--buffer"));
  const auto proxy =
      read_proxy(ensure_option(a.proxy, "--proxy"), buf.provenance().source_task);
  const auto sel = buffer::select_policy(buf, proxy, a.base_seed, a.workers);
  std::cerr << "score " << ppo::format_double(sel.score) << '\n';
  std::cout << sel.iteration << '\n';
  return kOk;
}

int run_plot(const PlotArgs& a) {
  const auto report = harness::read_report_csv(fs::path(ensure_option(a.report, "--report")));
  const auto files = harness::emit_plot_data(report, ensure_option(a.out, "--out"));
  std::cout << "wrote " << files.csv.size() << " tasks\n";
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Transfer reinforcement learning: train, evaluate and sweep policy buffers"};
  app.require_subcommand(1);

  TrainArgs train;
  auto* train_cmd = app.add_subcommand("train", "train on the source task");
  train_cmd->add_option("--config", train.config, "run configuration file");
  train_cmd->add_option("--out", train.out, "output directory (overrides run.out)");
  train_cmd->add_option("--seed", train.seed, "master seed (overrides run.seed)");
  train_cmd->add_flag("--quiet", train.quiet, "no per-iteration progress");

  EvalArgs eval;
  auto* eval_cmd = app.add_subcommand("eval", "evaluate one snapshot on one task");
  eval_cmd->add_option("--snapshot", eval.snapshot, "snapshot file");
  eval_cmd->add_option("--buffer", eval.buffer, "buffer directory");
  eval_cmd->add_option("--iter", eval.iter, "snapshot iteration (default: last)");
  eval_cmd->add_option("--task", eval.task, "task file (task.* keys)");
  eval_cmd->add_option("--param", eval.param, "task parameter to change");
  eval_cmd->add_option("--value", eval.value, "value for --param");
  eval_cmd->add_option("--episodes", eval.episodes, "evaluation episodes");
  eval_cmd->add_option("--base-seed", eval.base_seed, "evaluation base seed");

  SweepArgs sweep;
  auto* sweep_cmd = app.add_subcommand("sweep", "evaluate whole buffers over a task grid");
  sweep_cmd->add_option("--buffer", sweep.buffers, "buffer directory (repeatable)");
  sweep_cmd->add_option("--label", sweep.labels, "algorithm label per buffer");
  sweep_cmd->add_option("--param", sweep.param, "gravity, body_mass, aux_mass, friction, length");
  sweep_cmd->add_option("--values", sweep.values, "comma-separated values");
  sweep_cmd->add_option("--episodes", sweep.episodes, "episodes per evaluation");
  sweep_cmd->add_option("--base-seed", sweep.base_seed, "evaluation base seed");
  sweep_cmd->add_option("--out", sweep.out, "output directory (default <buffer>/sweep)");
  sweep_cmd->add_option("--workers", sweep.workers, "evaluation threads");

  SelectArgs select;
  auto* select_cmd = app.add_subcommand("select", "pick a snapshot on proxy tasks");
  select_cmd->add_option("--buffer", select.buffer, "buffer directory");
  select_cmd->add_option("--proxy", select.proxy, "proxy task file");
  select_cmd->add_option("--base-seed", select.base_seed, "evaluation base seed");
  select_cmd->add_option("--workers", select.workers, "evaluation threads");

  PlotArgs plot;
  auto* plot_cmd = app.add_subcommand("plot", "re-emit charts from a report");
  plot_cmd->add_option("--report", plot.report, "report CSV");
  plot_cmd->add_option("--out", plot.out, "output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsage;
  }

  try {
    if (*train_cmd) return run_train(train);
    if (*eval_cmd) return run_eval(eval);
    if (*sweep_cmd) return run_sweep(sweep);
    if (*select_cmd) return run_select(select);
    if (*plot_cmd) return run_plot(plot);
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return kNumerical;
  } catch (const IoError& e) {
    std::cerr << "io error: " << e.what() << '\n';
    return kIo;
  } catch (const fs::filesystem_error& e) {
    std::cerr << "io error: " << e.what() << '\n';
    return kIo;
  }
  return kUsage;
}
