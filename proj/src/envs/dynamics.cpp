#include "xrl/envs/dynamics.hpp"

#include <cmath>

#include "xrl/error.hpp"

namespace xrl::envs {

std::string_view to_string(EnvId id) {
  switch (id) {
    case EnvId::kPendulum: return "pendulum";
    case EnvId::kCartPole: return "cartpole";
    case EnvId::kPogoHopper: return "pogo_hopper";
  }
  return "unknown";
}

EnvId parse_env_id(std::string_view name) {
  if (name == "pendulum") return EnvId::kPendulum;
  if (name == "cartpole") return EnvId::kCartPole;
  if (name == "pogo_hopper") return EnvId::kPogoHopper;
  throw UsageError("unknown environment '" + std::string(name) + "'");
}

void DynamicsParams::validate() const {
  auto finite = [](double v) { return std::isfinite(v); };
  if (!finite(gravity) || gravity <= 0.0) throw UsageError("gravity must be > 0");
  if (!finite(body_mass) || body_mass <= 0.0 || !finite(aux_mass) ||
      aux_mass <= 0.0) {
    throw UsageError("masses must be > 0");
  }
  if (!finite(length) || length <= 0.0) throw UsageError("length must be > 0");
  if (!finite(friction) || friction < 0.0) throw UsageError("friction must be >= 0");
  if (!finite(adversary_scale) || adversary_scale < 0.0 || adversary_scale > 1.0) {
    throw UsageError("adversary_scale must lie in [0, 1]");
  }
}

void TaskSpec::validate() const {
  params.validate();
  if (horizon < 1) throw UsageError("horizon must be >= 1");
}

DynamicsParams default_params(EnvId id) {
  DynamicsParams p;
  switch (id) {
    case EnvId::kPendulum:
      p.body_mass = 1.0;
      p.aux_mass = 1.0;
      p.length = 1.0;
      p.friction = 0.0;
      p.adversary_scale = 0.5;
      break;
    case EnvId::kCartPole:
      p.body_mass = 1.0;
      p.aux_mass = 0.1;
      p.length = 0.5;
      p.friction = 0.0005;
      p.adversary_scale = 0.1;
      break;
    case EnvId::kPogoHopper:
      p.body_mass = 3.5;
      p.aux_mass = 0.1;
      p.length = 0.5;
      p.friction = 1.0;
      p.adversary_scale = 0.5;
      break;
  }
  return p;
}

std::size_t default_horizon(EnvId id) {
  switch (id) {
    case EnvId::kPendulum: return 200;
    case EnvId::kCartPole: return 500;
    case EnvId::kPogoHopper: return 200;
  }
  return 200;
}

TaskSpec TaskSpec::defaults(EnvId id) {
  TaskSpec spec;
  spec.env_id = id;
  spec.params = default_params(id);
  spec.horizon = default_horizon(id);
  return spec;
}

}  // namespace xrl::envs
