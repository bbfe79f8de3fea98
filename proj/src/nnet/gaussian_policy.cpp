#include "xrl/nnet/gaussian_policy.hpp"

#include <cmath>
#include <random>
#include <string>

#include "xrl/error.hpp"

namespace xrl::nnet {

void GaussianPolicy::validate() const {
  mean_net.spec.validate();
  if (static_cast<std::size_t>(mean_net.params.size()) !=
      mean_net.spec.parameter_count()) {
    throw UsageError("policy parameters do not match network spec");
  }
  if (static_cast<std::size_t>(log_std.size()) != action_dim()) {
    throw UsageError("log_std has " + std::to_string(log_std.size()) +
                     " entries, action dimension is " +
                     std::to_string(action_dim()));
  }
  if (!log_std.allFinite()) throw UsageError("log_std must be finite");
}

std::size_t GaussianPolicy::flat_size() const {
  return static_cast<std::size_t>(mean_net.params.size() + log_std.size());
}

ParameterVector GaussianPolicy::flat() const {
  ParameterVector out(flat_size());
  out << mean_net.params, log_std;
  return out;
}

void GaussianPolicy::set_flat(const ParameterVector& flat) {
  if (static_cast<std::size_t>(flat.size()) != flat_size()) {
    throw UsageError("flat policy vector has wrong length");
  }
  mean_net.params = flat.head(mean_net.params.size());
  log_std = flat.tail(log_std.size());
}

Eigen::VectorXd GaussianPolicy::mean(std::span<const double> obs) const {
  return mlp_forward(mean_net.spec, mean_net.params, obs);
}

GaussianPolicy GaussianPolicy::create(std::size_t obs_dim,
                                      std::size_t action_dim,
                                      const std::vector<std::size_t>& hidden,
                                      Rng& rng, double output_gain,
                                      double initial_log_std) {
  MlpSpec spec{obs_dim, hidden, action_dim, Activation::kTanh};
  spec.validate();
  GaussianPolicy policy;
  policy.mean_net = Mlp{spec, init_parameters(spec, output_gain, rng)};
  policy.log_std = Eigen::VectorXd::Constant(action_dim, initial_log_std);
  return policy;
}

double gaussian_log_prob(const Eigen::Ref<const Eigen::VectorXd>& mean,
                         const Eigen::Ref<const Eigen::VectorXd>& log_std,
                         std::span<const double> action) {
  if (action.size() != static_cast<std::size_t>(mean.size()) ||
      log_std.size() != mean.size()) {
    throw UsageError("action has " + std::to_string(action.size()) +
                     " entries, policy expects " + std::to_string(mean.size()));
  }
  double total = 0.0;
  for (Eigen::Index i = 0; i < mean.size(); ++i) {
    const double z = (action[i] - mean[i]) * std::exp(-log_std[i]);
    total += -0.5 * z * z - log_std[i] - kLogSqrtTwoPi;
  }
  return total;
}

double gaussian_log_prob(const GaussianPolicy& policy,
                         std::span<const double> obs,
                         std::span<const double> action) {
  return gaussian_log_prob(policy.mean(obs), policy.log_std, action);
}

double gaussian_entropy(const Eigen::Ref<const Eigen::VectorXd>& log_std) {
  // 0.5 * log(2 pi e sigma^2) per dimension.
  return (log_std.array() + (kLogSqrtTwoPi + 0.5)).sum();
}

double gaussian_entropy(const GaussianPolicy& policy) {
  return gaussian_entropy(policy.log_std);
}

ActionSample sample_action(const GaussianPolicy& policy,
                           std::span<const double> obs, Rng& rng) {
  ActionSample out;
  const Eigen::VectorXd mu = policy.mean(obs);
  std::normal_distribution<double> normal(0.0, 1.0);
  out.action.resize(mu.size());
  for (Eigen::Index i = 0; i < mu.size(); ++i) {
    out.action[i] = mu[i] + std::exp(policy.log_std[i]) * normal(rng);
  }
  out.log_prob = gaussian_log_prob(
      mu, policy.log_std,
      std::span<const double>(out.action.data(), out.action.size()));
  return out;
}

double value_of(const Mlp& critic, std::span<const double> obs) {
  return mlp_forward(critic.spec, critic.params, obs)[0];
}

Mlp make_critic(std::size_t obs_dim, const std::vector<std::size_t>& hidden,
                Rng& rng) {
  MlpSpec spec{obs_dim, hidden, 1, Activation::kTanh};
  spec.validate();
  return Mlp{spec, init_parameters(spec, 1.0, rng)};
}

}  // namespace xrl::nnet
