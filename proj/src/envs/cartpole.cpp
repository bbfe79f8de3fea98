#include "xrl/envs/models.hpp"

#include <cmath>

#include "xrl/error.hpp"

namespace xrl::envs {

namespace {

double sign(double v) { return static_cast<double>((v > 0.0) - (v < 0.0)); }

}  // namespace

CartPole::CartPole(TaskSpec spec) : Environment(std::move(spec)) {}

void CartPole::draw_initial_state(Rng& rng) {
  std::uniform_real_distribution<double> u(-0.05, 0.05);
  x_ = u(rng);
  x_dot_ = u(rng);
  theta_ = u(rng);
  theta_dot_ = u(rng);
}

void CartPole::assign_state(std::span<const double> state) {
  if (state.size() != 4) throw UsageError("cartpole state is (x, x_dot, theta, theta_dot)");
  x_ = state[0];
  x_dot_ = state[1];
  theta_ = state[2];
  theta_dot_ = state[3];
}

Environment::Transition CartPole::advance(std::span<const double> action_pro,
                                          std::span<const double> action_adv) {
  const auto& p = params();
  const double m_cart = p.body_mass;
  const double m_pole = p.aux_mass;
  const double half_len = p.length;
  const double total = m_cart + m_pole;

  const double push = kForceLimit * action_pro[0];
  const double tip_force = kForceLimit * p.adversary_scale * action_adv[0];
  const double track_friction = p.friction * total * p.gravity * sign(x_dot_);

  const double s = std::sin(theta_);
  const double c = std::cos(theta_);
  // Lagrange equations in (x, theta) with a horizontal force at the tip:
  //   [ M          m l c     ] [x'']   [ F + Ft - f + m l s theta'^2 ]
  //   [ m l c   4/3 m l^2    ] [th''] = [ m g l s + 2 l Ft c         ]
  const double a11 = total;
  const double a12 = m_pole * half_len * c;
  const double a22 = 4.0 / 3.0 * m_pole * half_len * half_len;
  const double b1 = push + tip_force - track_friction +
                    m_pole * half_len * s * theta_dot_ * theta_dot_;
  const double b2 = m_pole * p.gravity * half_len * s + 2.0 * half_len * tip_force * c;
  const double det = a11 * a22 - a12 * a12;
  const double x_acc = (b1 * a22 - a12 * b2) / det;
  const double theta_acc = (a11 * b2 - a12 * b1) / det;

  x_dot_ += kDt * x_acc;
  theta_dot_ += kDt * theta_acc;
  x_ += kDt * x_dot_;
  theta_ += kDt * theta_dot_;

  const bool failed = std::abs(theta_) > kThetaLimit || std::abs(x_) > kXLimit;
  const double reward = (failed ? 0.0 : 1.0) - 0.001 * action_pro[0] * action_pro[0];
  return {reward, failed};
}

}  // namespace xrl::envs
