#include "xrl/harness/grid.hpp"

#include "xrl/error.hpp"

namespace xrl::harness {

std::string_view to_string(TaskParam p) {
  switch (p) {
    case TaskParam::kGravity: return "gravity";
    case TaskParam::kBodyMass: return "body_mass";
    case TaskParam::kAuxMass: return "aux_mass";
    case TaskParam::kFriction: return "friction";
    case TaskParam::kLength: return "length";
  }
  return "unknown";
}

TaskParam parse_task_param(std::string_view name) {
  for (TaskParam p : {TaskParam::kGravity, TaskParam::kBodyMass, TaskParam::kAuxMass,
                      TaskParam::kFriction, TaskParam::kLength}) {
    if (name == to_string(p)) return p;
  }
  throw UsageError("unknown task parameter '" + std::string(name) +
                   "' (expected gravity, body_mass, aux_mass, friction or length)");
}

double task_param_value(const envs::TaskSpec& task, TaskParam param) {
  const auto& p = task.params;
  switch (param) {
    case TaskParam::kGravity: return p.gravity / envs::kEarthGravity;
    case TaskParam::kBodyMass: return p.body_mass;
    case TaskParam::kAuxMass: return p.aux_mass;
    case TaskParam::kFriction: return p.friction;
    case TaskParam::kLength: return p.length;
  }
  return 0.0;
}

void set_task_param(envs::TaskSpec& task, TaskParam param, double value) {
  auto& p = task.params;
  switch (param) {
    case TaskParam::kGravity: p.gravity = envs::gravity_from_multiplier(value); break;
    case TaskParam::kBodyMass: p.body_mass = value; break;
    case TaskParam::kAuxMass: p.aux_mass = value; break;
    case TaskParam::kFriction: p.friction = value; break;
    case TaskParam::kLength: p.length = value; break;
  }
}

std::vector<envs::TaskSpec> build_grid(const envs::TaskSpec& base, TaskParam param,
                                       const std::vector<double>& values) {
  if (values.empty()) throw UsageError("grid needs at least one value");
  std::vector<envs::TaskSpec> grid;
  grid.reserve(values.size());
  for (double v : values) {
    envs::TaskSpec task = base;
    set_task_param(task, param, v);
    task.validate();
    grid.push_back(std::move(task));
  }
  return grid;
}

std::vector<envs::TaskSpec> build_grid(const envs::TaskSpec& base,
                                       std::string_view param,
                                       const std::vector<double>& values) {
  return build_grid(base, parse_task_param(param), values);
}

}  // namespace xrl::harness
