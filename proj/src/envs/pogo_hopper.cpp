#include "xrl/envs/models.hpp"

#include <algorithm>
#include <cmath>

#include "xrl/error.hpp"

namespace xrl::envs {

PogoHopper::PogoHopper(TaskSpec spec) : Environment(std::move(spec)) {
  contacts_.reserve(kActionRepeat);
}

void PogoHopper::draw_initial_state(Rng& /*rng*/) {
  x_ = 0.0;
  z_ = params().length;
  x_dot_ = 0.0;
  z_dot_ = 0.0;
  contacts_.clear();
}

void PogoHopper::assign_state(std::span<const double> state) {
  if (state.size() != 4) throw UsageError("pogo_hopper state is (x, z, x_dot, z_dot)");
  x_ = state[0];
  z_ = state[1];
  x_dot_ = state[2];
  z_dot_ = state[3];
  contacts_.clear();
}

Environment::Transition PogoHopper::advance(std::span<const double> action_pro,
                                            std::span<const double> action_adv) {
  const auto& p = params();
  const double mass = p.body_mass;
  const double rest = p.length;
  const double thrust = kForceLimit * action_pro[0];
  const double drive = kForceLimit * action_pro[1];
  const double adv_scale = kForceLimit * p.adversary_scale;
  const double push_x = adv_scale * action_adv[0];
  const double push_z = adv_scale * action_adv[1];

  contacts_.clear();
  const double x_start = x_;
  int substeps = 0;
  bool fallen = false;
  while (substeps < kActionRepeat) {
    double fx = push_x;
    double fz = push_z - mass * p.gravity;
    if (z_ <= rest) {
      // The ground can only push.
      const double normal = std::max(0.0, kStiffness * (rest - z_) + thrust);
      const double limit = p.friction * normal;
      const double tangential = std::clamp(drive, -limit, limit);
      fx += tangential;
      fz += normal;
      contacts_.push_back({normal, tangential});
    } else {
      contacts_.push_back({0.0, 0.0});
    }
    x_dot_ += kDt * fx / mass;
    z_dot_ += kDt * fz / mass;
    x_ += kDt * x_dot_;
    z_ += kDt * z_dot_;
    ++substeps;
    if (z_ < kFallHeight || !std::isfinite(z_)) {
      fallen = true;
      break;
    }
  }
  const double forward_velocity = (x_ - x_start) / (kDt * substeps);
  return {reward_pogo(forward_velocity, action_pro, !fallen), fallen};
}

double reward_pogo(double forward_velocity, std::span<const double> action,
                   bool alive) {
  double control = 0.0;
  for (double a : action) control += a * a;
  return forward_velocity - 0.001 * control + (alive ? 1.0 : 0.0);
}

}  // namespace xrl::envs
