#include "xrl/nnet/losses.hpp"

#include <algorithm>
#include <cmath>

#include "xrl/error.hpp"

namespace xrl::nnet {

namespace {

void require_finite(const Matrix& m, const char* stage) {
  if (!m.allFinite()) throw NumericalError(stage, "non-finite intermediate");
}

void require_finite(double v, const char* stage) {
  if (!std::isfinite(v)) throw NumericalError(stage, "non-finite value");
}

}  // namespace

LossAndGradient clipped_surrogate_loss(const GaussianPolicy& policy,
                                       const PolicyBatch& batch, double epsilon,
                                       double entropy_coef,
                                       SurrogateDiagnostics* diagnostics) {
  const Eigen::Index n = batch.size();
  const auto act_dim = static_cast<Eigen::Index>(policy.action_dim());
  if (n == 0) throw UsageError("empty policy batch");
  if (batch.actions.rows() != act_dim || batch.actions.cols() != n ||
      batch.old_log_probs.size() != n || batch.advantages.size() != n) {
    throw UsageError("policy batch arrays are not aligned");
  }

  ForwardCache cache;
  const Matrix mean =
      mlp_forward_batch(policy.mean_net.spec, policy.mean_net.params,
                        batch.observations, &cache);
  require_finite(mean, "policy_forward");

  const Eigen::ArrayXd inv_std = (-policy.log_std.array()).exp();
  // z = (a - mu) / sigma, one column per sample.
  const Matrix z =
      ((batch.actions - mean).array().colwise() * inv_std).matrix();
  const Eigen::VectorXd log_probs =
      (-0.5 * z.array().square()).colwise().sum().transpose() -
      Eigen::VectorXd::Constant(n, policy.log_std.sum() + act_dim * kLogSqrtTwoPi)
          .array();
  require_finite(log_probs, "log_prob");

  const Eigen::VectorXd ratios = (log_probs - batch.old_log_probs).array().exp();
  require_finite(ratios, "ratio");

  const double lo = 1.0 - epsilon;
  const double hi = 1.0 + epsilon;
  const double inv_n = 1.0 / static_cast<double>(n);
  Eigen::VectorXd coef(n);  // dLoss/dlogp per sample
  double surrogate = 0.0;
  std::size_t clipped = 0;
  std::vector<bool> discarded(static_cast<std::size_t>(n), false);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double r = ratios[i];
    const double adv = batch.advantages[i];
    const double unclipped = r * adv;
    const double clipped_term = std::clamp(r, lo, hi) * adv;
    if (clipped_term < unclipped) {
      surrogate += clipped_term;
      coef[i] = 0.0;
      discarded[static_cast<std::size_t>(i)] = true;
    } else {
      surrogate += unclipped;
      coef[i] = -unclipped * inv_n;
    }
    if (r < lo || r > hi) ++clipped;
  }
  surrogate *= inv_n;
  require_finite(surrogate, "surrogate");

  const double entropy = gaussian_entropy(policy.log_std);
  LossAndGradient out;
  out.loss = -surrogate - entropy_coef * entropy;

  // dlogp/dmu = z / sigma ; dlogp/dlog_std = z^2 - 1.
  const Matrix grad_mean =
      (z.array().colwise() * inv_std).rowwise() * coef.transpose().array();
  const ParameterVector grad_net =
      mlp_backward(policy.mean_net.spec, policy.mean_net.params, cache, grad_mean);
  const Eigen::VectorXd grad_log_std =
      ((z.array().square() - 1.0).rowwise() * coef.transpose().array())
          .rowwise()
          .sum()
          .matrix() -
      Eigen::VectorXd::Constant(act_dim, entropy_coef);

  out.gradient.resize(static_cast<Eigen::Index>(policy.flat_size()));
  out.gradient << grad_net, grad_log_std;
  require_finite(out.gradient, "policy_gradient");

  if (diagnostics != nullptr) {
    diagnostics->surrogate = surrogate;
    diagnostics->entropy = entropy;
    diagnostics->clip_fraction =
        static_cast<double>(clipped) / static_cast<double>(n);
    diagnostics->ratios = ratios;
    diagnostics->discarded = std::move(discarded);
  }
  return out;
}

LossAndGradient value_loss(const Mlp& critic, const ValueBatch& batch,
                           double coef) {
  const Eigen::Index n = batch.observations.cols();
  if (n == 0) throw UsageError("empty value batch");
  if (batch.targets.size() != n) throw UsageError("value targets misaligned");
  ForwardCache cache;
  const Matrix values =
      mlp_forward_batch(critic.spec, critic.params, batch.observations, &cache);
  require_finite(values, "value_forward");
  const Eigen::RowVectorXd err = values.row(0) - batch.targets.transpose();
  LossAndGradient out;
  out.loss = coef * err.squaredNorm() / static_cast<double>(n);
  require_finite(out.loss, "value_loss");
  const Matrix grad_out = (2.0 * coef / static_cast<double>(n)) * err;
  out.gradient = mlp_backward(critic.spec, critic.params, cache, grad_out);
  require_finite(out.gradient, "value_gradient");
  return out;
}

LossAndGradient half_squared_norm(const ParameterVector& params) {
  return {0.5 * params.squaredNorm(), params};
}

LossAndGradient loss_gradient(const DifferentiableLoss& loss,
                              const ParameterVector& params) {
  LossAndGradient out = loss(params);
  require_finite(out.loss, "loss");
  if (out.gradient.size() != params.size()) {
    throw UsageError("gradient length differs from parameter length");
  }
  require_finite(out.gradient, "gradient");
  return out;
}

}  // namespace xrl::nnet
