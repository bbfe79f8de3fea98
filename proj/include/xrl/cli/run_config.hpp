#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

#include "xrl/adversarial/rarl.hpp"
#include "xrl/envs/dynamics.hpp"
#include "xrl/ppo/config.hpp"

namespace xrl::cli {

// ppo, sc-ppo, esc-ppo, rarl, sc-rarl, acc-rarl, e-rarl, esc-rarl, eacc-rarl.
bool is_known_algorithm(std::string_view algo);
bool is_adversarial_algorithm(std::string_view algo);

struct RunConfig {
  std::string algorithm = "ppo";
  ppo::TrainConfig train;
  std::optional<adversarial::AdvConfig> adv;  // present iff adversarial
  envs::TaskSpec task = envs::TaskSpec::defaults(envs::EnvId::kPendulum);
  std::string output_dir;  // run.out; not part of the echo
  std::uint64_t master_seed = 0;

  void validate() const;
};

// Defaults for `algo` before any explicit key is applied.
RunConfig algorithm_defaults(std::string_view algo);

// Sections: run.{algo,seed,out}, ppo.*, adv.*, task.*. `run.algo` selects the
// defaults and is applied first wherever it appears; `task.env` likewise
// precedes the other task keys. Unknown keys, bad values and `adv.*` keys
// under a non-adversarial algorithm are errors naming the line.
RunConfig parse_config(std::string_view text);

// Fully resolved config in the same grammar, every default spelled out.
// parse_config(echo_config(c)) reproduces c except for output_dir.
std::string echo_config(const RunConfig& config);

// Digest of the echo; identifies a configuration in snapshots.
std::string config_digest(const RunConfig& config);

}  // namespace xrl::cli
