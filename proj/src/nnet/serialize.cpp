#include "xrl/nnet/serialize.hpp"

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <sstream>

#include "xrl/error.hpp"

namespace xrl::nnet {

namespace {

void append_le(std::string& out, double v) {
  std::uint64_t bits = std::bit_cast<std::uint64_t>(v);
  for (int i = 0; i < 8; ++i) {
    out.push_back(static_cast<char>((bits >> (8 * i)) & 0xffU));
  }
}

double read_le(const char* p) {
  std::uint64_t bits = 0;
  for (int i = 0; i < 8; ++i) {
    bits |= static_cast<std::uint64_t>(static_cast<unsigned char>(p[i])) << (8 * i);
  }
  return std::bit_cast<double>(bits);
}

[[noreturn]] void malformed(const std::string& why) {
  throw UsageError("malformed model data: " + why);
}

}  // namespace

std::string encode_model(const SerializedModel& model) {
  const MlpSpec& spec = model.network.spec;
  spec.validate();
  if (static_cast<std::size_t>(model.network.params.size()) !=
      spec.parameter_count()) {
    throw UsageError("network parameters do not match spec");
  }
  std::ostringstream header;
  header << kModelMagic << '\n';
  header << "input_dim " << spec.input_dim << '\n';
  header << "hidden";
  for (std::size_t h : spec.hidden_sizes) header << ' ' << h;
  header << '\n';
  header << "output_dim " << spec.output_dim << '\n';
  header << "action_dim " << model.log_std.size() << '\n';
  for (const auto& [key, value] : model.metadata) {
    if (key.empty() || key.find_first_of(" \n") != std::string::npos ||
        value.find('\n') != std::string::npos) {
      throw UsageError("metadata entry '" + key + "' is not a single token/line");
    }
    header << "meta " << key << ' ' << value << '\n';
  }
  const auto count = model.network.params.size() + model.log_std.size();
  header << "count " << count << '\n';
  header << "end\n";

  std::string out = header.str();
  out.reserve(out.size() + 8 * static_cast<std::size_t>(count));
  for (double v : model.network.params) append_le(out, v);
  for (double v : model.log_std) append_le(out, v);
  return out;
}

SerializedModel decode_model(std::string_view bytes) {
  std::size_t pos = 0;
  auto next_line = [&]() -> std::string {
    const std::size_t nl = bytes.find('\n', pos);
    if (nl == std::string_view::npos) malformed("truncated header");
    std::string line(bytes.substr(pos, nl - pos));
    pos = nl + 1;
    return line;
  };
  if (next_line() != kModelMagic) malformed("bad magic");

  SerializedModel model;
  MlpSpec& spec = model.network.spec;
  spec.hidden_sizes.clear();
  std::size_t action_dim = 0;
  std::size_t count = 0;
  bool have_count = false;
  for (;;) {
    const std::string line = next_line();
    if (line == "end") break;
    std::istringstream in(line);
    std::string key;
    in >> key;
    if (key == "input_dim") {
      in >> spec.input_dim;
    } else if (key == "hidden") {
      std::size_t h = 0;
      while (in >> h) spec.hidden_sizes.push_back(h);
      in.clear();
    } else if (key == "output_dim") {
      in >> spec.output_dim;
    } else if (key == "action_dim") {
      in >> action_dim;
    } else if (key == "meta") {
      std::string meta_key;
      in >> meta_key;
      std::string value;
      std::getline(in >> std::ws, value);
      model.metadata[meta_key] = value;
    } else if (key == "count") {
      in >> count;
      have_count = true;
    } else {
      malformed("unknown header key '" + key + "'");
    }
    if (in.fail()) malformed("bad header line '" + line + "'");
  }
  if (!have_count) malformed("missing count");
  spec.validate();
  const std::size_t n_params = spec.parameter_count();
  if (count != n_params + action_dim) malformed("count does not match dims");
  if (bytes.size() - pos != 8 * count) malformed("payload size mismatch");

  const char* p = bytes.data() + pos;
  model.network.params.resize(static_cast<Eigen::Index>(n_params));
  for (std::size_t i = 0; i < n_params; ++i, p += 8) {
    model.network.params[static_cast<Eigen::Index>(i)] = read_le(p);
  }
  model.log_std.resize(static_cast<Eigen::Index>(action_dim));
  for (std::size_t i = 0; i < action_dim; ++i, p += 8) {
    model.log_std[static_cast<Eigen::Index>(i)] = read_le(p);
  }
  if (!model.network.params.allFinite() || !model.log_std.allFinite()) {
    malformed("non-finite parameters");
  }
  return model;
}

std::string encode_policy(const GaussianPolicy& policy, const Metadata& metadata) {
  policy.validate();
  return encode_model({policy.mean_net, policy.log_std, metadata});
}

GaussianPolicy decode_policy(std::string_view bytes, Metadata* metadata) {
  SerializedModel model = decode_model(bytes);
  if (static_cast<std::size_t>(model.log_std.size()) !=
      model.network.spec.output_dim) {
    malformed("action_dim does not match network output");
  }
  if (metadata != nullptr) *metadata = std::move(model.metadata);
  return GaussianPolicy{std::move(model.network), std::move(model.log_std)};
}

void write_file_atomic(const std::filesystem::path& path, std::string_view bytes) {
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError(tmp.string(), "cannot open for writing");
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    out.flush();
    if (!out) throw IoError(tmp.string(), "write failed");
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw IoError(path.string(), "rename failed: " + ec.message());
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError(path.string(), "cannot open for reading");
  std::ostringstream ss;
  ss << in.rdbuf();
  if (in.bad()) throw IoError(path.string(), "read failed");
  return ss.str();
}

void save_policy(const std::filesystem::path& path, const GaussianPolicy& policy,
                 const Metadata& metadata) {
  write_file_atomic(path, encode_policy(policy, metadata));
}

GaussianPolicy load_policy(const std::filesystem::path& path, Metadata* metadata) {
  const std::string bytes = read_file(path);
  try {
    return decode_policy(bytes, metadata);
  } catch (const UsageError& err) {
    throw IoError(path.string(), err.what());
  }
}

}  // namespace xrl::nnet
