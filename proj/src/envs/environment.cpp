#include "xrl/envs/environment.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "xrl/envs/models.hpp"
#include "xrl/error.hpp"

namespace xrl::envs {

namespace {

std::vector<double> clamp_action(std::span<const double> action,
                                 std::size_t dim, const char* who) {
  std::vector<double> out(dim, 0.0);
  if (action.empty()) return out;
  if (action.size() != dim) {
    throw UsageError(std::string(who) + " action has " +
                     std::to_string(action.size()) + " components, expected " +
                     std::to_string(dim));
  }
  for (std::size_t i = 0; i < dim; ++i) {
    if (std::isnan(action[i])) {
      throw UsageError(std::string(who) + " action component is NaN");
    }
    out[i] = std::clamp(action[i], -1.0, 1.0);
  }
  return out;
}

}  // namespace

Environment::Environment(TaskSpec spec) : spec_(std::move(spec)) {
  spec_.validate();
}

std::vector<double> Environment::reset(std::uint64_t episode_seed) {
  Rng rng(episode_seed);
  draw_initial_state(rng);
  active_ = true;
  elapsed_ = 0;
  return observe();
}

void Environment::set_state(std::span<const double> state) {
  assign_state(state);
  active_ = true;
  elapsed_ = 0;
}

StepResult Environment::step(std::span<const double> action_pro,
                             std::span<const double> action_adv) {
  if (!active_) throw UsageError("step() called before reset() or after episode end");
  if (action_pro.size() != action_dim()) {
    throw UsageError("protagonist action has " + std::to_string(action_pro.size()) +
                     " components, expected " + std::to_string(action_dim()));
  }
  const std::vector<double> pro = clamp_action(action_pro, action_dim(), "protagonist");
  const std::vector<double> adv = clamp_action(action_adv, adversary_dim(), "adversary");

  const Transition tr = advance(pro, adv);
  ++elapsed_;

  StepResult out;
  const std::vector<double> s = state();
  out.crashed = !std::all_of(s.begin(), s.end(), [](double v) { return std::isfinite(v); });
  out.reward_protagonist = out.crashed || !std::isfinite(tr.reward) ? 0.0 : tr.reward;
  out.reward_adversary = -out.reward_protagonist;
  out.terminated = tr.terminated || out.crashed;
  out.truncated = !out.terminated && elapsed_ >= spec_.horizon;
  out.observation = observe();
  if (out.crashed) {
    std::fill(out.observation.begin(), out.observation.end(), 0.0);
  }
  if (out.terminated || out.truncated) active_ = false;
  return out;
}

std::unique_ptr<Environment> make_env(const TaskSpec& spec) {
  switch (spec.env_id) {
    case EnvId::kPendulum: return std::make_unique<Pendulum>(spec);
    case EnvId::kCartPole: return std::make_unique<CartPole>(spec);
    case EnvId::kPogoHopper: return std::make_unique<PogoHopper>(spec);
  }
  throw UsageError("unknown environment id");
}

double wrap_angle(double theta) {
  constexpr double kPi = std::numbers::pi;
  double wrapped = std::remainder(theta, 2.0 * kPi);
  if (wrapped <= -kPi) wrapped += 2.0 * kPi;
  return wrapped;
}

}  // namespace xrl::envs
