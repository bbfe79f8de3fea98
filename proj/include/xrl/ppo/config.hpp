#pragma once

#include <cstddef>
#include <string_view>
#include <vector>

namespace xrl::ppo {

enum class Schedule { kConstant, kLinear };

std::string_view to_string(Schedule s);
Schedule parse_schedule(std::string_view name);

// Source-task optimization hyperparameters.
struct TrainConfig {
  double clip = 0.2;
  double step_size = 3e-4;
  std::size_t minibatch = 64;
  std::size_t epochs = 10;
  std::size_t horizon = 2048;
  double gamma = 0.99;
  double lambda = 0.95;
  double value_coef = 0.5;
  double entropy_coef = 0.0;
  Schedule lr_schedule = Schedule::kConstant;
  Schedule clip_schedule = Schedule::kConstant;
  std::size_t total_iterations = 300;
  std::size_t snapshot_interval = 10;
  std::vector<std::size_t> hidden_sizes = {64, 64};

  void validate() const;
};

// constant -> 1, linear -> 1 - iter / total.
double schedule_factor(Schedule kind, std::size_t iter, std::size_t total);

}  // namespace xrl::ppo
