#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <span>
#include <vector>

#include "xrl/envs/dynamics.hpp"
#include "xrl/seeding.hpp"

namespace xrl::envs {

struct StepResult {
  std::vector<double> observation;
  double reward_protagonist = 0.0;
  // Always exactly -reward_protagonist.
  double reward_adversary = 0.0;
  bool terminated = false;
  bool truncated = false;
  // Integration produced a non-finite state; implies terminated.
  bool crashed = false;
};

// Two-player continuous-control environment. Protagonist and adversary
// actions are clamped to [-1, 1] per component before use. An empty
// adversary action means "no disturbance".
class Environment {
 public:
  explicit Environment(TaskSpec spec);
  virtual ~Environment() = default;

  const TaskSpec& spec() const { return spec_; }
  const DynamicsParams& params() const { return spec_.params; }

  virtual std::size_t observation_dim() const = 0;
  virtual std::size_t action_dim() const = 0;
  virtual std::size_t adversary_dim() const = 0;

  // Draws the initial state from `episode_seed` alone.
  std::vector<double> reset(std::uint64_t episode_seed);
  StepResult step(std::span<const double> action_pro,
                  std::span<const double> action_adv = {});

  bool needs_reset() const { return !active_; }
  std::size_t elapsed_steps() const { return elapsed_; }

  // Raw physical state, for tests and trajectory dumps.
  virtual std::vector<double> state() const = 0;
  // Overwrites the physical state and marks the episode active.
  void set_state(std::span<const double> state);

 protected:
  struct Transition {
    double reward = 0.0;
    bool terminated = false;
  };

  virtual void draw_initial_state(Rng& rng) = 0;
  virtual void assign_state(std::span<const double> state) = 0;
  virtual Transition advance(std::span<const double> action_pro,
                             std::span<const double> action_adv) = 0;
  virtual std::vector<double> observe() const = 0;

 private:
  TaskSpec spec_;
  bool active_ = false;
  std::size_t elapsed_ = 0;
};

std::unique_ptr<Environment> make_env(const TaskSpec& spec);

// Angle wrapped into (-pi, pi].
double wrap_angle(double theta);

}  // namespace xrl::envs
