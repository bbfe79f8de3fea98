#pragma once

#include <functional>

#include "xrl/nnet/gaussian_policy.hpp"
#include "xrl/nnet/mlp.hpp"

namespace xrl::nnet {

struct LossAndGradient {
  double loss = 0.0;
  ParameterVector gradient;
};

// A scalar objective over a flat parameter vector with its exact gradient.
using DifferentiableLoss =
    std::function<LossAndGradient(const ParameterVector&)>;

// Samples for a policy-gradient step, one column per sample.
struct PolicyBatch {
  Matrix observations;
  Matrix actions;
  Eigen::VectorXd old_log_probs;
  Eigen::VectorXd advantages;

  Eigen::Index size() const { return observations.cols(); }
};

struct SurrogateDiagnostics {
  double surrogate = 0.0;  // mean clipped surrogate
  double entropy = 0.0;
  double clip_fraction = 0.0;
  Eigen::VectorXd ratios;
  // True where the clipped branch is strictly smaller, so the sample carries
  // no gradient.
  std::vector<bool> discarded;
};

// Loss minimized for the actor:
//   -mean_t min(r_t A_t, clip(r_t, 1-eps, 1+eps) A_t) - entropy_coef * H.
// Gradient is w.r.t. GaussianPolicy::flat(). At min() ties the unclipped
// branch carries the gradient.
LossAndGradient clipped_surrogate_loss(const GaussianPolicy& policy,
                                       const PolicyBatch& batch, double epsilon,
                                       double entropy_coef,
                                       SurrogateDiagnostics* diagnostics = nullptr);

struct ValueBatch {
  Matrix observations;
  Eigen::VectorXd targets;
};

// coef * mean_t (V(s_t) - target_t)^2, gradient w.r.t. the critic parameters.
LossAndGradient value_loss(const Mlp& critic, const ValueBatch& batch,
                           double coef);

// 0.5 * |params|^2.
LossAndGradient half_squared_norm(const ParameterVector& params);

// Evaluates `loss` at `params`; throws NumericalError naming `stage` if the
// value or any gradient entry is not finite.
LossAndGradient loss_gradient(const DifferentiableLoss& loss,
                              const ParameterVector& params);

}  // namespace xrl::nnet
