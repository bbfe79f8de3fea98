#include "xrl/envs/models.hpp"

#include <cmath>
#include <numbers>

#include "xrl/error.hpp"

namespace xrl::envs {

Pendulum::Pendulum(TaskSpec spec) : Environment(std::move(spec)) {}

double Pendulum::mechanical_energy() const {
  const auto& p = params();
  const double inertia = p.body_mass * p.length * p.length / 3.0;
  return 0.5 * inertia * theta_dot_ * theta_dot_ +
         0.5 * p.body_mass * p.gravity * p.length * std::cos(theta_);
}

void Pendulum::draw_initial_state(Rng& rng) {
  std::uniform_real_distribution<double> angle(-std::numbers::pi, std::numbers::pi);
  std::uniform_real_distribution<double> rate(-1.0, 1.0);
  theta_ = angle(rng);
  theta_dot_ = rate(rng);
}

void Pendulum::assign_state(std::span<const double> state) {
  if (state.size() != 2) throw UsageError("pendulum state is (theta, theta_dot)");
  theta_ = state[0];
  theta_dot_ = state[1];
}

Environment::Transition Pendulum::advance(std::span<const double> action_pro,
                                          std::span<const double> action_adv) {
  const auto& p = params();
  const double u_pro = kMaxTorque * action_pro[0];
  const double u = u_pro + kMaxTorque * p.adversary_scale * action_adv[0];

  const double wrapped = wrap_angle(theta_);
  const double cost =
      wrapped * wrapped + 0.1 * theta_dot_ * theta_dot_ + 0.001 * u_pro * u_pro;

  const double accel = 1.5 * p.gravity / p.length * std::sin(theta_) -
                       p.friction * theta_dot_ +
                       3.0 / (p.body_mass * p.length * p.length) * u;
  theta_dot_ += kDt * accel;
  theta_ += kDt * theta_dot_;
  return {-cost, false};
}

std::vector<double> Pendulum::observe() const {
  return {std::cos(theta_), std::sin(theta_), theta_dot_};
}

}  // namespace xrl::envs
