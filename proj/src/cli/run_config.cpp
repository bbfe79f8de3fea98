#include "xrl/cli/run_config.hpp"

#include <array>
#include <sstream>

#include "xrl/cli/config_grammar.hpp"
#include "xrl/error.hpp"

namespace xrl::cli {

namespace {

constexpr std::array<std::string_view, 9> kAlgorithms = {
    "ppo", "sc-ppo", "esc-ppo", "rarl", "sc-rarl", "acc-rarl", "e-rarl", "esc-rarl", "eacc-rarl"};

std::vector<std::size_t> parse_hidden(const ConfigEntry& e) {
  std::vector<std::size_t> sizes;
  try {
    for (double v : parse_real_list(e.value)) {
      if (v < 1 || v != static_cast<double>(static_cast<std::size_t>(v))) {
        config_error(e, "hidden sizes must be positive integers");
      }
      sizes.push_back(static_cast<std::size_t>(v));
    }
  } catch (const UsageError& err) {
    if (std::string_view(err.what()).starts_with("config line")) throw;
    config_error(e, err.what());
  }
  if (sizes.empty()) config_error(e, "at least one hidden layer required");
  return sizes;
}

template <typename Parse>
auto parse_enum(const ConfigEntry& e, Parse parse) {
  try {
    return parse(e.value);
  } catch (const UsageError& err) {
    config_error(e, err.what());
  }
}

void apply_ppo(ppo::TrainConfig& t, const ConfigEntry& e) {
  const std::string_view k = std::string_view(e.key).substr(4);
  if (k == "clip") t.clip = parse_real(e);
  else if (k == "step_size") t.step_size = parse_real(e);
  else if (k == "minibatch") t.minibatch = parse_count(e);
  else if (k == "epochs") t.epochs = parse_count(e);
  else if (k == "horizon") t.horizon = parse_count(e);
  else if (k == "gamma") t.gamma = parse_real(e);
  else if (k == "lambda") t.lambda = parse_real(e);
  else if (k == "value_coef") t.value_coef = parse_real(e);
  else if (k == "entropy_coef") t.entropy_coef = parse_real(e);
  else if (k == "lr_schedule") t.lr_schedule = parse_enum(e, ppo::parse_schedule);
  else if (k == "clip_schedule") t.clip_schedule = parse_enum(e, ppo::parse_schedule);
  else if (k == "iterations") t.total_iterations = parse_count(e);
  else if (k == "snapshot_interval") t.snapshot_interval = parse_count(e);
  else if (k == "hidden") t.hidden_sizes = parse_hidden(e);
  else config_error(e, "unknown key");
}

void apply_adv(adversarial::AdvConfig& a, const ConfigEntry& e) {
  const std::string_view k = std::string_view(e.key).substr(4);
  if (k == "critic_mode") a.critic_mode = parse_enum(e, adversarial::parse_critic_mode);
  else if (k == "beta_pro") a.beta_pro = parse_real(e);
  else if (k == "beta_adv") a.beta_adv = parse_real(e);
  else if (k == "curriculum") a.curriculum_enabled = parse_flag(e);
  else if (k == "chi") a.curriculum_chi = parse_real(e);
  else if (k == "protagonist_updates") a.protagonist_updates = parse_count(e);
  else if (k == "adversary_updates") a.adversary_updates = parse_count(e);
  else if (k == "ring_capacity") a.ring_capacity = parse_count(e);
  else config_error(e, "unknown key");
}

// Attributes a validation failure to the last line that touched the section.
void validate_section(const std::vector<ConfigEntry>& entries, std::string_view section,
                      const auto& check) {
  try {
    check();
  } catch (const UsageError& err) {
    for (auto it = entries.rbegin(); it != entries.rend(); ++it) {
      if (it->key.starts_with(section)) config_error(*it, err.what());
    }
    throw UsageError(std::string("invalid defaults: ") + err.what());
  }
}

}  // namespace

bool is_known_algorithm(std::string_view algo) {
  for (auto a : kAlgorithms) {
    if (a == algo) return true;
  }
  return false;
}

bool is_adversarial_algorithm(std::string_view algo) {
  return is_known_algorithm(algo) && algo.ends_with("rarl");
}

void RunConfig::validate() const {
  if (!is_known_algorithm(algorithm)) throw UsageError("unknown algorithm '" + algorithm + "'");
  if (is_adversarial_algorithm(algorithm) != adv.has_value()) {
    throw UsageError("adversarial settings must be present exactly for adversarial algorithms");
  }
  train.validate();
  if (adv) adv->validate();
  task.validate();
}

RunConfig algorithm_defaults(std::string_view algo) {
  if (!is_known_algorithm(algo)) {
    throw UsageError("unknown algorithm '" + std::string(algo) + "'");
  }
  RunConfig c;
  c.algorithm = std::string(algo);
  if (algo == "sc-ppo" || algo == "esc-ppo") {
    c.train.clip = 0.05;
    c.train.minibatch = 2048;
    if (algo == "esc-ppo") c.train.entropy_coef = 0.01;
  } else if (is_adversarial_algorithm(algo)) {
    c.train.clip = 0.3;
    c.train.minibatch = 512;
    adversarial::AdvConfig a;
    const bool entropy = algo.starts_with("e");
    const std::string_view base = entropy ? algo.substr(1) : algo;
    if (base == "sc-rarl") a.critic_mode = adversarial::CriticMode::kShared;
    else if (base == "acc-rarl") a.critic_mode = adversarial::CriticMode::kAcc;
    else a.critic_mode = adversarial::CriticMode::kSeparate;
    // "e-rarl" strips to "-rarl".
    if (entropy) a.beta_pro = a.beta_adv = 0.01;
    c.adv = a;
  }
  return c;
}

RunConfig parse_config(std::string_view text) {
  const std::vector<ConfigEntry> entries = parse_entries(text);
  std::string algo = "ppo";
  for (const auto& e : entries) {
    if (e.key == "run.algo") {
      if (!is_known_algorithm(e.value)) config_error(e, "unknown algorithm '" + e.value + "'");
      algo = e.value;
    }
  }
  RunConfig c = algorithm_defaults(algo);
  std::vector<ConfigEntry> task_entries;
  for (const auto& e : entries) {
    if (e.key == "run.algo") continue;
    if (e.key == "run.seed") {
      c.master_seed = parse_u64(e);
    } else if (e.key == "run.out") {
      c.output_dir = e.value;
    } else if (e.key.starts_with("ppo.")) {
      apply_ppo(c.train, e);
    } else if (e.key.starts_with("adv.")) {
      if (!c.adv) config_error(e, "adversarial key with non-adversarial algorithm " + algo);
      apply_adv(*c.adv, e);
    } else if (is_task_key(e.key)) {
      task_entries.push_back(e);
    } else {
      config_error(e, "unknown key");
    }
  }
  for (const auto& e : task_entries) {
    if (e.key == "task.env") apply_task_entry(c.task, e);
  }
  for (const auto& e : task_entries) {
    if (e.key != "task.env") apply_task_entry(c.task, e);
  }
  validate_section(entries, "ppo.", [&] { c.train.validate(); });
  if (c.adv) validate_section(entries, "adv.", [&] { c.adv->validate(); });
  validate_section(entries, "task.", [&] { c.task.validate(); });
  return c;
}

std::string echo_config(const RunConfig& c) {
  std::ostringstream out;
  const auto& t = c.train;
  out << "# resolved configuration\n";
  out << "run.algo = " << c.algorithm << '\n';
  out << "run.seed = " << c.master_seed << '\n';
  out << "ppo.clip = " << format_real(t.clip) << '\n';
  out << "ppo.step_size = " << format_real(t.step_size) << '\n';
  out << "ppo.minibatch = " << t.minibatch << '\n';
  out << "ppo.epochs = " << t.epochs << '\n';
  out << "ppo.horizon = " << t.horizon << '\n';
  out << "ppo.gamma = " << format_real(t.gamma) << '\n';
  out << "ppo.lambda = " << format_real(t.lambda) << '\n';
  out << "ppo.value_coef = " << format_real(t.value_coef) << '\n';
  out << "ppo.entropy_coef = " << format_real(t.entropy_coef) << '\n';
  out << "ppo.lr_schedule = " << ppo::to_string(t.lr_schedule) << '\n';
  out << "ppo.clip_schedule = " << ppo::to_string(t.clip_schedule) << '\n';
  out << "ppo.iterations = " << t.total_iterations << '\n';
  out << "ppo.snapshot_interval = " << t.snapshot_interval << '\n';
  out << "ppo.hidden = ";
  for (std::size_t i = 0; i < t.hidden_sizes.size(); ++i) {
    out << (i ? "," : "") << t.hidden_sizes[i];
  }
  out << '\n';
  if (c.adv) {
    const auto& a = *c.adv;
    out << "adv.critic_mode = " << adversarial::to_string(a.critic_mode) << '\n';
    out << "adv.beta_pro = " << format_real(a.beta_pro) << '\n';
    out << "adv.beta_adv = " << format_real(a.beta_adv) << '\n';
    out << "adv.curriculum = " << (a.curriculum_enabled ? "true" : "false") << '\n';
    out << "adv.chi = " << format_real(a.curriculum_chi) << '\n';
    out << "adv.protagonist_updates = " << a.protagonist_updates << '\n';
    out << "adv.adversary_updates = " << a.adversary_updates << '\n';
    out << "adv.ring_capacity = " << a.ring_capacity << '\n';
  }
  out << task_to_config(c.task);
  return out.str();
}

std::string config_digest(const RunConfig& config) {
  return content_digest(echo_config(config));
}

}  // namespace xrl::cli
