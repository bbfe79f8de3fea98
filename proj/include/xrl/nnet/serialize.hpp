#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <string_view>

#include "xrl/nnet/gaussian_policy.hpp"
#include "xrl/nnet/mlp.hpp"

namespace xrl::nnet {

// Free-form key/value metadata stored in the text header. Keys are single
// tokens; values are a single line.
using Metadata = std::map<std::string, std::string>;

// Binary layout:
//   "XRLP1\n"
//   "input_dim <n>\n" "hidden <h1> <h2> ...\n" "output_dim <n>\n"
//   "action_dim <n>\n"        (log_std entries; 0 for a bare network)
//   "meta <key> <value>\n" ... (optional)
//   "count <n>\n" "end\n"
//   <n little-endian IEEE-754 doubles: network parameters, then log_std>
inline constexpr std::string_view kModelMagic = "XRLP1";

struct SerializedModel {
  Mlp network;
  Eigen::VectorXd log_std;  // empty for a bare network
  Metadata metadata;
};

std::string encode_model(const SerializedModel& model);
SerializedModel decode_model(std::string_view bytes);

std::string encode_policy(const GaussianPolicy& policy,
                          const Metadata& metadata = {});
GaussianPolicy decode_policy(std::string_view bytes, Metadata* metadata = nullptr);

// File helpers. Writes go through a temporary file and a rename so a crash
// never leaves a truncated model behind.
void write_file_atomic(const std::filesystem::path& path, std::string_view bytes);
std::string read_file(const std::filesystem::path& path);

void save_policy(const std::filesystem::path& path, const GaussianPolicy& policy,
                 const Metadata& metadata = {});
GaussianPolicy load_policy(const std::filesystem::path& path,
                           Metadata* metadata = nullptr);

}  // namespace xrl::nnet
