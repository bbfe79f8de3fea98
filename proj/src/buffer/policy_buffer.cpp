#include "xrl/buffer/policy_buffer.hpp"

#include <cstdio>
#include <sstream>

#include "xrl/cli/config_grammar.hpp"
#include "xrl/error.hpp"
#include "xrl/nnet/serialize.hpp"

namespace xrl::buffer {

namespace fs = std::filesystem;

namespace {

constexpr const char* kManifest = "manifest.txt";

nnet::Metadata snapshot_metadata(const PolicySnapshot& s) {
  return {{"iteration", std::to_string(s.iteration)},
          {"config_digest", s.config_digest.empty() ? "-" : s.config_digest},
          {"source_return", cli::format_real(s.source_return)}};
}

}  // namespace

PolicyBuffer::PolicyBuffer(std::size_t snapshot_interval, Provenance provenance)
    : interval_(snapshot_interval), provenance_(std::move(provenance)) {
  if (interval_ < 1) throw UsageError("snapshot interval must be >= 1");
}

std::string PolicyBuffer::snapshot_file_name(std::size_t iteration) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "snapshot_%06zu.xrlp", iteration);
  return buf;
}

PolicyBuffer PolicyBuffer::create(const fs::path& dir, std::size_t snapshot_interval,
                                  Provenance provenance) {
  PolicyBuffer buffer(snapshot_interval, std::move(provenance));
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError(dir.string(), "cannot create buffer directory: " + ec.message());
  for (const auto& entry : fs::directory_iterator(dir)) {
    const std::string name = entry.path().filename().string();
    if (name == kManifest || (name.starts_with("snapshot_") && name.ends_with(".xrlp"))) {
      fs::remove(entry.path(), ec);
      if (ec) throw IoError(entry.path().string(), "cannot remove stale file");
    }
  }
  buffer.dir_ = dir;
  buffer.write_manifest();
  return buffer;
}

void PolicyBuffer::record(std::size_t iteration, const nnet::GaussianPolicy& policy,
                          double source_return, bool final) {
  if (closed_) throw UsageError("buffer already holds its final snapshot");
  if (snapshots_.empty()) {
    if (iteration != 0) {
      throw UsageError("first snapshot must be iteration 0, got " +
                       std::to_string(iteration));
    }
  } else {
    const std::size_t last = snapshots_.back().iteration;
    const bool on_schedule = iteration == last + interval_;
    const bool valid_final = final && iteration > last && iteration < last + interval_;
    if (!on_schedule && !valid_final) {
      throw UsageError("snapshot iteration " + std::to_string(iteration) +
                       " out of order (last " + std::to_string(last) + ", interval " +
                       std::to_string(interval_) + ")");
    }
  }
  policy.validate();
  if (!policy.mean_net.params.allFinite()) {
    throw UsageError("snapshot parameters must be finite");
  }
  PolicySnapshot snap{iteration, policy, provenance_.config_digest, source_return};
  if (dir_) {
    nnet::save_policy(*dir_ / snapshot_file_name(iteration), policy,
                      snapshot_metadata(snap));
  }
  snapshots_.push_back(std::move(snap));
  if (final) closed_ = true;
  if (dir_) write_manifest();
}

void PolicyBuffer::write_manifest() const {
  std::ostringstream out;
  out << "# policy buffer manifest\n";
  out << "buffer.interval = " << interval_ << '\n';
  out << "buffer.algo = " << provenance_.algorithm << '\n';
  out << "buffer.digest = " << (provenance_.config_digest.empty() ? "-" : provenance_.config_digest)
      << '\n';
  out << "buffer.closed = " << (closed_ ? "true" : "false") << '\n';
  out << cli::task_to_config(provenance_.source_task);
  for (const auto& s : snapshots_) {
    out << "snapshot." << s.iteration << " = " << snapshot_file_name(s.iteration) << '\n';
  }
  nnet::write_file_atomic(*dir_ / kManifest, out.str());
}

PolicySnapshot load_snapshot(const fs::path& file) {
  nnet::Metadata meta;
  PolicySnapshot snap;
  snap.policy = nnet::load_policy(file, &meta);
  try {
    snap.iteration = static_cast<std::size_t>(std::stoull(meta.at("iteration")));
    snap.config_digest = meta.at("config_digest");
    if (snap.config_digest == "-") snap.config_digest.clear();
    snap.source_return = std::stod(meta.at("source_return"));
  } catch (const std::exception&) {
    throw IoError(file.string(), "snapshot metadata incomplete");
  }
  return snap;
}

fs::path resolve_buffer_dir(const fs::path& dir) {
  if (!fs::exists(dir / kManifest) && fs::exists(dir / "buffer" / kManifest)) {
    return dir / "buffer";
  }
  return dir;
}

BufferManifest read_manifest(const fs::path& run_or_buffer_dir) {
  const fs::path dir = resolve_buffer_dir(run_or_buffer_dir);
  const fs::path path = dir / kManifest;
  const std::string text = nnet::read_file(path);
  BufferManifest manifest;
  std::vector<cli::ConfigEntry> task_entries;
  try {
    for (const auto& e : cli::parse_entries(text)) {
      if (e.key == "buffer.interval") {
        manifest.snapshot_interval = cli::parse_count(e);
      } else if (e.key == "buffer.algo") {
        manifest.provenance.algorithm = e.value;
      } else if (e.key == "buffer.digest") {
        manifest.provenance.config_digest = e.value == "-" ? "" : e.value;
      } else if (e.key == "buffer.closed") {
        manifest.closed = cli::parse_flag(e);
      } else if (cli::is_task_key(e.key)) {
        task_entries.push_back(e);
      } else if (e.key.starts_with("snapshot.")) {
        cli::ConfigEntry iter_entry = e;
        iter_entry.value = e.key.substr(9);
        manifest.files.emplace_back(cli::parse_count(iter_entry), dir / e.value);
      } else {
        cli::config_error(e, "unknown manifest key " + e.key);
      }
    }
    manifest.provenance.source_task = cli::task_from_entries(task_entries);
  } catch (const UsageError& err) {
    throw IoError(path.string(), err.what());
  }
  return manifest;
}

PolicyBuffer PolicyBuffer::load(const fs::path& run_or_buffer_dir) {
  const fs::path dir = resolve_buffer_dir(run_or_buffer_dir);
  BufferManifest manifest = read_manifest(dir);
  PolicyBuffer buffer(manifest.snapshot_interval, std::move(manifest.provenance));
  for (const auto& [iteration, file] : manifest.files) {
    PolicySnapshot snap = load_snapshot(file);
    if (snap.iteration != iteration) {
      throw IoError(file.string(), "iteration does not match manifest");
    }
    buffer.snapshots_.push_back(std::move(snap));
  }
  buffer.closed_ = manifest.closed;
  buffer.dir_ = dir;
  return buffer;
}

}  // namespace xrl::buffer
