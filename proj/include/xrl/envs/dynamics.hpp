#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>

namespace xrl::envs {

inline constexpr double kEarthGravity = 9.81;

enum class EnvId { kPendulum, kCartPole, kPogoHopper };

std::string_view to_string(EnvId id);
EnvId parse_env_id(std::string_view name);

// Physical parameters of a task. Field meaning per environment:
//   pendulum:    body_mass = rod mass, length = rod length, friction = joint damping
//   cartpole:    body_mass = cart, aux_mass = pole, length = pole half-length,
//                friction = Coulomb coefficient of the track
//   pogo_hopper: body_mass = point body, length = leg rest length,
//                friction = ground friction coefficient (aux_mass unused)
struct DynamicsParams {
  double gravity = kEarthGravity;
  double body_mass = 1.0;
  double aux_mass = 0.1;
  double length = 1.0;
  double friction = 0.0;
  double adversary_scale = 0.5;

  void validate() const;
  bool operator==(const DynamicsParams&) const = default;
};

struct TaskSpec {
  EnvId env_id = EnvId::kPendulum;
  DynamicsParams params;
  std::size_t horizon = 200;
  std::uint64_t seed = 0;

  void validate() const;
  bool operator==(const TaskSpec&) const = default;

  static TaskSpec defaults(EnvId id);
};

DynamicsParams default_params(EnvId id);
std::size_t default_horizon(EnvId id);

// Gravity in m/s^2 for a multiple of Earth gravity.
inline double gravity_from_multiplier(double multiplier) {
  return kEarthGravity * multiplier;
}

}  // namespace xrl::envs
