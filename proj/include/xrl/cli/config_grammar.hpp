#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "xrl/envs/dynamics.hpp"

namespace xrl::cli {

// One `section.key = value` assignment and the 1-based line it came from.
struct ConfigEntry {
  std::string key;
  std::string value;
  std::size_t line = 0;
};

// Line-oriented grammar: `section.key = value`, `#` starts a comment, blank
// lines ignored, exactly one dot in the key. Throws UsageError naming the line.
std::vector<ConfigEntry> parse_entries(std::string_view text);

double parse_real(const ConfigEntry& e);
std::size_t parse_count(const ConfigEntry& e);
std::uint64_t parse_u64(const ConfigEntry& e);
bool parse_flag(const ConfigEntry& e);
std::vector<double> parse_real_list(std::string_view text);

[[noreturn]] void config_error(const ConfigEntry& e, const std::string& why);

// TaskSpec <-> `task.*` entries. Gravity is written in m/s^2
// (`task.gravity_ms2`) so the round trip is exact; `task.gravity` accepts a
// multiple of Earth gravity.
std::string task_to_config(const envs::TaskSpec& task);
bool is_task_key(std::string_view key);
// Applies one `task.*` entry. `env` entries must be applied first.
void apply_task_entry(envs::TaskSpec& task, const ConfigEntry& e);
envs::TaskSpec task_from_entries(const std::vector<ConfigEntry>& entries);

std::string format_real(double v);

// FNV-1a 64-bit digest, 16 hex digits.
std::string content_digest(std::string_view text);

}  // namespace xrl::cli
