#include "xrl/ppo/trajectory.hpp"

#include <span>

#include "xrl/error.hpp"

namespace xrl::ppo {

namespace {

std::span<const double> as_span(const Eigen::VectorXd& v) {
  return {v.data(), static_cast<std::size_t>(v.size())};
}

}  // namespace

double Trajectory::mean_episode_return() const {
  if (!episode_returns.empty()) {
    double sum = 0.0;
    for (double r : episode_returns) sum += r;
    return sum / static_cast<double>(episode_returns.size());
  }
  return rewards.sum();
}

Trajectory collect_rollout(envs::Environment& env,
                           const nnet::GaussianPolicy& policy,
                           const nnet::GaussianPolicy* adversary, std::size_t horizon,
                           Rng& rng, Rng* adversary_rng) {
  if (horizon < 1) throw UsageError("rollout length must be >= 1");
  const auto obs_dim = static_cast<Eigen::Index>(env.observation_dim());
  const auto act_dim = static_cast<Eigen::Index>(env.action_dim());
  const auto adv_dim = static_cast<Eigen::Index>(env.adversary_dim());
  if (policy.obs_dim() != env.observation_dim() ||
      policy.action_dim() != env.action_dim()) {
    throw UsageError("policy dimensions do not match the environment");
  }
  if (adversary != nullptr && (adversary->obs_dim() != env.observation_dim() ||
                               adversary->action_dim() != env.adversary_dim())) {
    throw UsageError("adversary dimensions do not match the environment");
  }
  Rng& adv_rng = adversary_rng != nullptr ? *adversary_rng : rng;
  const auto n = static_cast<Eigen::Index>(horizon);

  Trajectory traj;
  traj.observations.resize(obs_dim, n);
  traj.next_observations.resize(obs_dim, n);
  traj.actions.resize(act_dim, n);
  traj.adversary_actions = Eigen::MatrixXd::Zero(adv_dim, n);
  traj.rewards.resize(n);
  traj.log_probs.resize(n);
  traj.adversary_log_probs = Eigen::VectorXd::Zero(n);
  traj.done_flags.assign(horizon, false);
  traj.terminated.assign(horizon, false);

  std::vector<double> obs = env.reset(training_episode_seed(rng()));
  double episode_return = 0.0;
  for (Eigen::Index t = 0; t < n; ++t) {
    traj.observations.col(t) = Eigen::Map<const Eigen::VectorXd>(obs.data(), obs_dim);
    const nnet::ActionSample pro = nnet::sample_action(policy, obs, rng);
    traj.actions.col(t) = pro.action;
    traj.log_probs[t] = pro.log_prob;

    envs::StepResult step;
    if (adversary != nullptr) {
      const nnet::ActionSample adv = nnet::sample_action(*adversary, obs, adv_rng);
      traj.adversary_actions.col(t) = adv.action;
      traj.adversary_log_probs[t] = adv.log_prob;
      step = env.step(as_span(pro.action), as_span(adv.action));
    } else {
      step = env.step(as_span(pro.action));
    }

    traj.rewards[t] = step.reward_protagonist;
    traj.next_observations.col(t) =
        Eigen::Map<const Eigen::VectorXd>(step.observation.data(), obs_dim);
    episode_return += step.reward_protagonist;
    const bool done = step.terminated || step.truncated;
    traj.done_flags[static_cast<std::size_t>(t)] = done;
    traj.terminated[static_cast<std::size_t>(t)] = step.terminated;
    if (done) {
      traj.episode_returns.push_back(episode_return);
      episode_return = 0.0;
      if (t + 1 < n) obs = env.reset(training_episode_seed(rng()));
    } else {
      obs = std::move(step.observation);
    }
  }
  return traj;
}

Trajectory collect_rollout(envs::Environment& env,
                           const nnet::GaussianPolicy& policy,
                           const nnet::Mlp& critic,
                           const nnet::GaussianPolicy* adversary, std::size_t horizon,
                           Rng& rng, Rng* adversary_rng) {
  Trajectory traj = collect_rollout(env, policy, adversary, horizon, rng, adversary_rng);
  attach_values(traj, critic);
  return traj;
}

CriticValues evaluate_critic(const nnet::Mlp& critic, const Trajectory& traj) {
  CriticValues out;
  out.values = nnet::mlp_forward_batch(critic.spec, critic.params, traj.observations)
                   .row(0)
                   .transpose();
  out.next_values =
      nnet::mlp_forward_batch(critic.spec, critic.params, traj.next_observations)
          .row(0)
          .transpose();
  return out;
}

void attach_values(Trajectory& traj, const nnet::Mlp& critic) {
  CriticValues v = evaluate_critic(critic, traj);
  traj.value_estimates = std::move(v.values);
  const auto last = static_cast<Eigen::Index>(traj.size()) - 1;
  traj.bootstrap_value = v.next_values[last];
}

}  // namespace xrl::ppo
