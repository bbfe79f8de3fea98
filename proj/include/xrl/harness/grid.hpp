#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "xrl/envs/dynamics.hpp"

namespace xrl::harness {

// Task parameters a grid may vary. Gravity values are multiples of Earth
// gravity; the rest are raw DynamicsParams values.
enum class TaskParam { kGravity, kBodyMass, kAuxMass, kFriction, kLength };

std::string_view to_string(TaskParam p);
TaskParam parse_task_param(std::string_view name);

// Value of `param` in grid units (gravity as a multiplier).
double task_param_value(const envs::TaskSpec& task, TaskParam param);
void set_task_param(envs::TaskSpec& task, TaskParam param, double value);

// One task per value, everything else copied from `base`.
std::vector<envs::TaskSpec> build_grid(const envs::TaskSpec& base, TaskParam param,
                                       const std::vector<double>& values);
std::vector<envs::TaskSpec> build_grid(const envs::TaskSpec& base,
                                       std::string_view param,
                                       const std::vector<double>& values);

}  // namespace xrl::harness
