#pragma once

#include <cstddef>
#include <span>

#include <Eigen/Dense>

#include "xrl/nnet/mlp.hpp"
#include "xrl/seeding.hpp"

namespace xrl::nnet {

// Diagonal Gaussian with a state-independent learned log standard deviation.
struct GaussianPolicy {
  Mlp mean_net;
  Eigen::VectorXd log_std;

  std::size_t obs_dim() const { return mean_net.spec.input_dim; }
  std::size_t action_dim() const { return mean_net.spec.output_dim; }

  void validate() const;

  // Trainable parameters concatenated: mean network, then log_std.
  std::size_t flat_size() const;
  ParameterVector flat() const;
  void set_flat(const ParameterVector& flat);

  Eigen::VectorXd mean(std::span<const double> obs) const;

  static GaussianPolicy create(std::size_t obs_dim, std::size_t action_dim,
                               const std::vector<std::size_t>& hidden,
                               Rng& rng, double output_gain = 0.01,
                               double initial_log_std = 0.0);
};

inline constexpr double kLogSqrtTwoPi = 0.91893853320467274178;

// Log density of `action` under N(mean, diag(exp(log_std))^2).
double gaussian_log_prob(const Eigen::Ref<const Eigen::VectorXd>& mean,
                         const Eigen::Ref<const Eigen::VectorXd>& log_std,
                         std::span<const double> action);
double gaussian_log_prob(const GaussianPolicy& policy,
                         std::span<const double> obs,
                         std::span<const double> action);

double gaussian_entropy(const Eigen::Ref<const Eigen::VectorXd>& log_std);
double gaussian_entropy(const GaussianPolicy& policy);

struct ActionSample {
  Eigen::VectorXd action;
  double log_prob = 0.0;
};

ActionSample sample_action(const GaussianPolicy& policy,
                           std::span<const double> obs, Rng& rng);

// Critic helper: scalar value of a single observation.
double value_of(const Mlp& critic, std::span<const double> obs);

Mlp make_critic(std::size_t obs_dim, const std::vector<std::size_t>& hidden,
                Rng& rng);

}  // namespace xrl::nnet
