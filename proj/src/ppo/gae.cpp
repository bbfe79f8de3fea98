#include "xrl/ppo/gae.hpp"

#include "xrl/error.hpp"

namespace xrl::ppo {

AdvantageEstimate compute_gae(std::span<const double> rewards,
                              std::span<const double> values,
                              const std::vector<bool>& done_flags,
                              double bootstrap_value, double gamma,
                              double lambda) {
  const std::size_t n = rewards.size();
  if (values.size() != n || done_flags.size() != n) {
    throw UsageError("compute_gae: rewards, values and done flags differ in length");
  }
  std::vector<double> next(n);
  for (std::size_t t = 0; t < n; ++t) {
    next[t] = t + 1 < n ? values[t + 1] : bootstrap_value;
  }
  return compute_gae(rewards, values, next, done_flags, done_flags, gamma, lambda);
}

AdvantageEstimate compute_gae(std::span<const double> rewards,
                              std::span<const double> values,
                              std::span<const double> next_values,
                              const std::vector<bool>& terminated,
                              const std::vector<bool>& boundary, double gamma,
                              double lambda) {
  const std::size_t n = rewards.size();
  if (values.size() != n || next_values.size() != n || terminated.size() != n ||
      boundary.size() != n) {
    throw UsageError("compute_gae: input arrays differ in length");
  }
  std::vector<double> deltas(n);
  for (std::size_t t = 0; t < n; ++t) {
    const double bootstrap = terminated[t] ? 0.0 : gamma * next_values[t];
    deltas[t] = rewards[t] + bootstrap - values[t];
  }
  AdvantageEstimate out;
  out.advantages = accumulate_residuals(deltas, boundary, gamma, lambda);
  out.returns = out.advantages +
                Eigen::Map<const Eigen::VectorXd>(values.data(),
                                                  static_cast<Eigen::Index>(n));
  return out;
}

Eigen::VectorXd accumulate_residuals(std::span<const double> deltas,
                                     const std::vector<bool>& boundary,
                                     double gamma, double lambda) {
  const std::size_t n = deltas.size();
  if (boundary.size() != n) throw UsageError("residuals and boundary flags differ in length");
  Eigen::VectorXd adv(static_cast<Eigen::Index>(n));
  double running = 0.0;
  for (std::size_t t = n; t-- > 0;) {
    if (boundary[t]) running = 0.0;
    running = deltas[t] + gamma * lambda * running;
    adv[static_cast<Eigen::Index>(t)] = running;
  }
  return adv;
}

}  // namespace xrl::ppo
