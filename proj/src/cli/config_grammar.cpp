#include "xrl/cli/config_grammar.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <sstream>

#include "xrl/error.hpp"

namespace xrl::cli {

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

}  // namespace

void config_error(const ConfigEntry& e, const std::string& why) {
  throw UsageError("config line " + std::to_string(e.line) + " (" + e.key + "): " + why);
}

std::vector<ConfigEntry> parse_entries(std::string_view text) {
  std::vector<ConfigEntry> out;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t nl = text.find('\n', pos);
    if (nl == std::string_view::npos) nl = text.size();
    std::string_view line = text.substr(pos, nl - pos);
    pos = nl + 1;
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) {
      line = line.substr(0, hash);
    }
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw UsageError("config line " + std::to_string(line_no) +
                       ": expected 'section.key = value'");
    }
    ConfigEntry e{std::string(trim(line.substr(0, eq))),
                  std::string(trim(line.substr(eq + 1))), line_no};
    const auto dot = e.key.find('.');
    if (dot == std::string::npos || dot == 0 || dot + 1 == e.key.size() ||
        e.key.find('.', dot + 1) != std::string::npos) {
      config_error(e, "key must have the form section.key");
    }
    if (e.value.empty()) config_error(e, "missing value");
    out.push_back(std::move(e));
  }
  return out;
}

double parse_real(const ConfigEntry& e) {
  const char* begin = e.value.c_str();
  char* end = nullptr;
  const double v = std::strtod(begin, &end);
  if (end == begin || *end != '\0' || !std::isfinite(v)) {
    config_error(e, "expected a finite real number, got '" + e.value + "'");
  }
  return v;
}

std::uint64_t parse_u64(const ConfigEntry& e) {
  std::uint64_t v = 0;
  const char* first = e.value.data();
  const char* last = first + e.value.size();
  auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || ptr != last) {
    config_error(e, "expected a non-negative integer, got '" + e.value + "'");
  }
  return v;
}

std::size_t parse_count(const ConfigEntry& e) {
  return static_cast<std::size_t>(parse_u64(e));
}

bool parse_flag(const ConfigEntry& e) {
  if (e.value == "true" || e.value == "1" || e.value == "yes") return true;
  if (e.value == "false" || e.value == "0" || e.value == "no") return false;
  config_error(e, "expected true/false, got '" + e.value + "'");
}

std::vector<double> parse_real_list(std::string_view text) {
  std::vector<double> out;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t comma = text.find(',', pos);
    if (comma == std::string_view::npos) comma = text.size();
    const std::string item(trim(text.substr(pos, comma - pos)));
    pos = comma + 1;
    if (item.empty()) {
      if (comma == text.size() && out.empty()) break;
      throw UsageError("empty element in list '" + std::string(text) + "'");
    }
    char* end = nullptr;
    const double v = std::strtod(item.c_str(), &end);
    if (*end != '\0' || !std::isfinite(v)) {
      throw UsageError("bad number '" + item + "' in list");
    }
    out.push_back(v);
  }
  return out;
}

std::string format_real(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string task_to_config(const envs::TaskSpec& task) {
  std::ostringstream out;
  const auto& p = task.params;
  out << "task.env = " << envs::to_string(task.env_id) << '\n';
  out << "task.gravity_ms2 = " << format_real(p.gravity) << '\n';
  out << "task.body_mass = " << format_real(p.body_mass) << '\n';
  out << "task.aux_mass = " << format_real(p.aux_mass) << '\n';
  out << "task.length = " << format_real(p.length) << '\n';
  out << "task.friction = " << format_real(p.friction) << '\n';
  out << "task.adversary_scale = " << format_real(p.adversary_scale) << '\n';
  out << "task.horizon = " << task.horizon << '\n';
  out << "task.seed = " << task.seed << '\n';
  return out.str();
}

bool is_task_key(std::string_view key) { return key.starts_with("task."); }

void apply_task_entry(envs::TaskSpec& task, const ConfigEntry& e) {
  const std::string_view name = std::string_view(e.key).substr(5);
  auto& p = task.params;
  if (name == "env") {
    try {
      task = envs::TaskSpec::defaults(envs::parse_env_id(e.value));
    } catch (const UsageError& err) {
      config_error(e, err.what());
    }
  } else if (name == "gravity") {
    p.gravity = envs::gravity_from_multiplier(parse_real(e));
  } else if (name == "gravity_ms2") {
    p.gravity = parse_real(e);
  } else if (name == "body_mass") {
    p.body_mass = parse_real(e);
  } else if (name == "aux_mass") {
    p.aux_mass = parse_real(e);
  } else if (name == "length") {
    p.length = parse_real(e);
  } else if (name == "friction") {
    p.friction = parse_real(e);
  } else if (name == "adversary_scale") {
    p.adversary_scale = parse_real(e);
  } else if (name == "horizon") {
    task.horizon = parse_count(e);
  } else if (name == "seed") {
    task.seed = parse_u64(e);
  } else {
    config_error(e, "unknown key");
  }
}

envs::TaskSpec task_from_entries(const std::vector<ConfigEntry>& entries) {
  envs::TaskSpec task = envs::TaskSpec::defaults(envs::EnvId::kPendulum);
  for (const auto& e : entries) {
    if (e.key == "task.env") apply_task_entry(task, e);
  }
  for (const auto& e : entries) {
    if (is_task_key(e.key) && e.key != "task.env") apply_task_entry(task, e);
  }
  try {
    task.validate();
  } catch (const UsageError& err) {
    throw UsageError(std::string("invalid task: ") + err.what());
  }
  return task;
}

std::string content_digest(std::string_view text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace xrl::cli
