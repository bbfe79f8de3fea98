#pragma once

#include <cstddef>

#include <Eigen/Dense>

#include "xrl/error.hpp"
#include "xrl/nnet/adam.hpp"
#include "xrl/nnet/gaussian_policy.hpp"
#include "xrl/ppo/config.hpp"
#include "xrl/ppo/trajectory.hpp"
#include "xrl/seeding.hpp"

namespace xrl::ppo {

// min(ratio * A, clip(ratio, 1 - eps, 1 + eps) * A).
double clipped_surrogate(double ratio, double advantage, double epsilon);

struct UpdateStats {
  double surrogate = 0.0;
  double value_loss = 0.0;
  double entropy = 0.0;
  // Share of sample evaluations whose ratio left [1 - eps, 1 + eps].
  double clip_fraction = 0.0;
  double grad_norm = 0.0;
  double lr_factor = 1.0;
  double clip_used = 0.0;
  std::size_t minibatch_steps = 0;
};

// Raised when the objective turns non-finite mid-update. Carries the
// statistics accumulated before the failure; the learner is left untouched.
class UpdateFailure : public NumericalError {
 public:
  UpdateFailure(const NumericalError& cause, UpdateStats partial)
      : NumericalError(cause.stage(), cause.what()), partial_(partial) {}
  const UpdateStats& partial_stats() const { return partial_; }

 private:
  UpdateStats partial_;
};

// Actor, critic and their optimizer states.
struct Learner {
  nnet::GaussianPolicy policy;
  nnet::Mlp critic;
  nnet::AdamState actor_opt;
  nnet::AdamState critic_opt;

  static Learner create(std::size_t obs_dim, std::size_t action_dim,
                        const std::vector<std::size_t>& hidden, Rng& rng);
};

struct UpdateBatch {
  Eigen::MatrixXd observations;
  Eigen::MatrixXd actions;
  Eigen::VectorXd old_log_probs;
  Eigen::VectorXd advantages;  // raw; normalized inside ppo_update
  Eigen::VectorXd returns;     // critic regression targets
};

// Zero mean, unit (population) variance. Leaves a constant vector centered.
void normalize_advantages(Eigen::VectorXd& advantages);

// Standard GAE batch for the protagonist of `traj` under `critic`.
UpdateBatch make_update_batch(const Trajectory& traj, const nnet::Mlp& critic,
                              double gamma, double lambda);

// `epochs` passes of shuffled minibatches maximizing
//   surrogate - c1 * (V - R)^2 + entropy_coef * H.
// Step size and clip are scaled by their schedule factors at `iter`.
// When `critic` is null only the actor is updated. On failure throws
// UpdateFailure and leaves every argument unchanged.
UpdateStats ppo_update(nnet::GaussianPolicy& policy, nnet::AdamState& actor_opt,
                       nnet::Mlp* critic, nnet::AdamState* critic_opt,
                       const UpdateBatch& batch, const TrainConfig& config,
                       double entropy_coef, std::size_t iter, Rng& shuffle_rng);

inline UpdateStats ppo_update(Learner& learner, const UpdateBatch& batch,
                              const TrainConfig& config, std::size_t iter,
                              Rng& shuffle_rng) {
  return ppo_update(learner.policy, learner.actor_opt, &learner.critic,
                    &learner.critic_opt, batch, config, config.entropy_coef, iter,
                    shuffle_rng);
}

}  // namespace xrl::ppo
