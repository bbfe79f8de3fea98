#pragma once

#include <span>
#include <vector>

#include "xrl/envs/environment.hpp"

namespace xrl::envs {

// Swing-up pendulum, theta = 0 upright.
//   theta'' = (3g / 2l) sin(theta) - b theta' + (3 / m l^2) u
//   u = 2 a_pro + 2 * adversary_scale * a_adv
// Observation (cos theta, sin theta, theta'). dt = 0.05, no termination.
class Pendulum final : public Environment {
 public:
  static constexpr double kDt = 0.05;
  static constexpr double kMaxTorque = 2.0;

  explicit Pendulum(TaskSpec spec);

  std::size_t observation_dim() const override { return 3; }
  std::size_t action_dim() const override { return 1; }
  std::size_t adversary_dim() const override { return 1; }
  std::vector<double> state() const override { return {theta_, theta_dot_}; }

  // Kinetic plus potential energy (rod about its pivot).
  double mechanical_energy() const;

 protected:
  void draw_initial_state(Rng& rng) override;
  void assign_state(std::span<const double> state) override;
  Transition advance(std::span<const double> action_pro,
                     std::span<const double> action_adv) override;
  std::vector<double> observe() const override;

 private:
  double theta_ = 0.0;
  double theta_dot_ = 0.0;
};

// Cart-pole with a continuous push on the cart and an adversarial horizontal
// force at the pole tip. State (x, x', theta, theta'); dt = 0.02.
class CartPole final : public Environment {
 public:
  static constexpr double kDt = 0.02;
  static constexpr double kForceLimit = 10.0;
  static constexpr double kThetaLimit = 0.2095;
  static constexpr double kXLimit = 2.4;

  explicit CartPole(TaskSpec spec);

  std::size_t observation_dim() const override { return 4; }
  std::size_t action_dim() const override { return 1; }
  std::size_t adversary_dim() const override { return 1; }
  std::vector<double> state() const override { return {x_, x_dot_, theta_, theta_dot_}; }

 protected:
  void draw_initial_state(Rng& rng) override;
  void assign_state(std::span<const double> state) override;
  Transition advance(std::span<const double> action_pro,
                     std::span<const double> action_adv) override;
  std::vector<double> observe() const override { return state(); }

 private:
  double x_ = 0.0;
  double x_dot_ = 0.0;
  double theta_ = 0.0;
  double theta_dot_ = 0.0;
};

// Ground reaction during one integration substep of the hopper.
struct ContactForce {
  double normal = 0.0;
  double tangential = 0.0;
};

// Point-mass hopper on a massless vertical spring leg.
// State (x, z, x', z'); observation (z, x', z'). Actions: a1 leg thrust,
// a2 tangential drive; adversary: planar force (a3, a4).
class PogoHopper final : public Environment {
 public:
  static constexpr double kDt = 0.01;
  static constexpr int kActionRepeat = 5;
  static constexpr double kStiffness = 300.0;
  static constexpr double kForceLimit = 15.0;
  static constexpr double kFallHeight = 0.2;

  explicit PogoHopper(TaskSpec spec);

  std::size_t observation_dim() const override { return 3; }
  std::size_t action_dim() const override { return 2; }
  std::size_t adversary_dim() const override { return 2; }
  std::vector<double> state() const override { return {x_, z_, x_dot_, z_dot_}; }

  // Contact forces of every substep of the most recent step.
  const std::vector<ContactForce>& contact_log() const { return contacts_; }

 protected:
  void draw_initial_state(Rng& rng) override;
  void assign_state(std::span<const double> state) override;
  Transition advance(std::span<const double> action_pro,
                     std::span<const double> action_adv) override;
  std::vector<double> observe() const override { return {z_, x_dot_, z_dot_}; }

 private:
  double x_ = 0.0;
  double z_ = 0.0;
  double x_dot_ = 0.0;
  double z_dot_ = 0.0;
  std::vector<ContactForce> contacts_;
};

// Hopper reward: forward velocity - 0.001 |a|^2 + 1 if alive.
double reward_pogo(double forward_velocity, std::span<const double> action,
                   bool alive);

}  // namespace xrl::envs
