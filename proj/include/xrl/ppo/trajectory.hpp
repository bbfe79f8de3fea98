#pragma once

#include <cstddef>
#include <vector>

#include <Eigen/Dense>

#include "xrl/envs/environment.hpp"
#include "xrl/nnet/gaussian_policy.hpp"
#include "xrl/seeding.hpp"

namespace xrl::ppo {

// One rollout, one column (or entry) per environment step. Rewards are the
// protagonist's environment rewards; the adversary's are their negation.
struct Trajectory {
  Eigen::MatrixXd observations;       // s_t
  Eigen::MatrixXd next_observations;  // true successor of s_t (final obs at episode end)
  Eigen::MatrixXd actions;            // protagonist, as sampled (before clamping)
  Eigen::MatrixXd adversary_actions;  // all zeros when no adversary acted
  Eigen::VectorXd rewards;
  Eigen::VectorXd log_probs;            // protagonist
  Eigen::VectorXd adversary_log_probs;  // adversary (zeros if absent)
  Eigen::VectorXd value_estimates;      // V(s_t) of the attached critic
  std::vector<bool> done_flags;         // episode ended at t (terminated or truncated)
  std::vector<bool> terminated;         // episode ended by failure/crash at t
  double bootstrap_value = 0.0;         // V(s_T) for the unfinished tail
  std::vector<double> episode_returns;  // undiscounted returns of finished episodes

  std::size_t size() const { return static_cast<std::size_t>(rewards.size()); }
  // Mean of finished-episode returns; the partial return if none finished.
  double mean_episode_return() const;
};

// Runs H steps, resetting on episode end with per-episode seeds drawn from
// `rng`. The protagonist samples from `policy`. When `adversary` is given it
// samples its actions from `adversary_rng` (or `rng` if null); otherwise the
// adversary action is zero.
Trajectory collect_rollout(envs::Environment& env,
                           const nnet::GaussianPolicy& policy,
                           const nnet::GaussianPolicy* adversary, std::size_t horizon,
                           Rng& rng, Rng* adversary_rng = nullptr);

// Same, then fills value_estimates / bootstrap_value from `critic`.
Trajectory collect_rollout(envs::Environment& env,
                           const nnet::GaussianPolicy& policy,
                           const nnet::Mlp& critic,
                           const nnet::GaussianPolicy* adversary, std::size_t horizon,
                           Rng& rng, Rng* adversary_rng = nullptr);

// V(s_t) and V(s_{t+1}) for every step under `critic`.
struct CriticValues {
  Eigen::VectorXd values;
  Eigen::VectorXd next_values;
};
CriticValues evaluate_critic(const nnet::Mlp& critic, const Trajectory& traj);

void attach_values(Trajectory& traj, const nnet::Mlp& critic);

}  // namespace xrl::ppo
