#pragma once

#include <span>
#include <vector>

#include <Eigen/Dense>

namespace xrl::ppo {

struct AdvantageEstimate {
  Eigen::VectorXd advantages;
  Eigen::VectorXd returns;  // advantages + values
};

// GAE over one rollout. done_flags[t] marks the last step of an episode; such
// steps neither bootstrap nor carry advantage across the boundary. The value
// after the final step is `bootstrap_value` (ignored if that step is done).
AdvantageEstimate compute_gae(std::span<const double> rewards,
                              std::span<const double> values,
                              const std::vector<bool>& done_flags,
                              double bootstrap_value, double gamma,
                              double lambda);

// General form: next_values[t] = V(s_{t+1}) of the true successor state.
// `terminated` suppresses bootstrapping, `boundary` (terminated or truncated)
// stops the lambda-accumulation.
AdvantageEstimate compute_gae(std::span<const double> rewards,
                              std::span<const double> values,
                              std::span<const double> next_values,
                              const std::vector<bool>& terminated,
                              const std::vector<bool>& boundary, double gamma,
                              double lambda);

// Exponentially weighted sums A_t = sum_l (gamma lambda)^l delta_{t+l},
// truncated at episode boundaries.
Eigen::VectorXd accumulate_residuals(std::span<const double> deltas,
                                     const std::vector<bool>& boundary,
                                     double gamma, double lambda);

}  // namespace xrl::ppo
