#include "xrl/ppo/ppo.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "xrl/nnet/losses.hpp"
#include "xrl/ppo/gae.hpp"

namespace xrl::ppo {

std::string_view to_string(Schedule s) {
  return s == Schedule::kLinear ? "linear" : "constant";
}

Schedule parse_schedule(std::string_view name) {
  if (name == "constant") return Schedule::kConstant;
  if (name == "linear") return Schedule::kLinear;
  throw UsageError("unknown schedule '" + std::string(name) + "'");
}

void TrainConfig::validate() const {
  if (!(clip > 0.0 && clip < 1.0)) throw UsageError("clip must lie in (0, 1)");
  if (!(step_size > 0.0) || !std::isfinite(step_size)) {
    throw UsageError("step size must be > 0");
  }
  if (!(gamma > 0.0 && gamma <= 1.0)) throw UsageError("gamma must lie in (0, 1]");
  if (!(lambda >= 0.0 && lambda <= 1.0)) throw UsageError("lambda must lie in [0, 1]");
  if (minibatch < 1 || epochs < 1 || horizon < 1 || total_iterations < 1 ||
      snapshot_interval < 1) {
    throw UsageError("counts must be >= 1");
  }
  if (minibatch > horizon) throw UsageError("minibatch must not exceed horizon");
  if (!(value_coef >= 0.0) || !(entropy_coef >= 0.0)) {
    throw UsageError("loss coefficients must be >= 0");
  }
  if (hidden_sizes.empty()) throw UsageError("at least one hidden layer required");
}

double schedule_factor(Schedule kind, std::size_t iter, std::size_t total) {
  if (iter > total) throw UsageError("schedule iteration exceeds total");
  if (kind == Schedule::kConstant) return 1.0;
  return 1.0 - static_cast<double>(iter) / static_cast<double>(total);
}

double clipped_surrogate(double ratio, double advantage, double epsilon) {
  return std::min(ratio * advantage,
                  std::clamp(ratio, 1.0 - epsilon, 1.0 + epsilon) * advantage);
}

Learner Learner::create(std::size_t obs_dim, std::size_t action_dim,
                        const std::vector<std::size_t>& hidden, Rng& rng) {
  Learner l;
  l.policy = nnet::GaussianPolicy::create(obs_dim, action_dim, hidden, rng);
  l.critic = nnet::make_critic(obs_dim, hidden, rng);
  l.actor_opt = nnet::AdamState::zeros(static_cast<Eigen::Index>(l.policy.flat_size()));
  l.critic_opt = nnet::AdamState::zeros(l.critic.params.size());
  return l;
}

void normalize_advantages(Eigen::VectorXd& advantages) {
  if (advantages.size() == 0) return;
  const double mean = advantages.mean();
  advantages.array() -= mean;
  const double std = std::sqrt(advantages.squaredNorm() /
                               static_cast<double>(advantages.size()));
  if (std > 0.0) advantages /= std;
}

UpdateBatch make_update_batch(const Trajectory& traj, const nnet::Mlp& critic,
                              double gamma, double lambda) {
  const CriticValues v = evaluate_critic(critic, traj);
  const auto span = [](const Eigen::VectorXd& x) {
    return std::span<const double>(x.data(), static_cast<std::size_t>(x.size()));
  };
  AdvantageEstimate est = compute_gae(span(traj.rewards), span(v.values),
                                      span(v.next_values), traj.terminated,
                                      traj.done_flags, gamma, lambda);
  return {traj.observations, traj.actions, traj.log_probs, std::move(est.advantages),
          std::move(est.returns)};
}

UpdateStats ppo_update(nnet::GaussianPolicy& policy, nnet::AdamState& actor_opt,
                       nnet::Mlp* critic, nnet::AdamState* critic_opt,
                       const UpdateBatch& batch, const TrainConfig& config,
                       double entropy_coef, std::size_t iter, Rng& shuffle_rng) {
  config.validate();
  const Eigen::Index n = batch.observations.cols();
  if (n == 0) throw UsageError("empty update batch");
  if (batch.actions.cols() != n || batch.old_log_probs.size() != n ||
      batch.advantages.size() != n || batch.returns.size() != n) {
    throw UsageError("update batch arrays are not aligned");
  }
  if ((critic == nullptr) != (critic_opt == nullptr)) {
    throw UsageError("critic and critic optimizer must be given together");
  }

  UpdateStats stats;
  stats.lr_factor =
      schedule_factor(config.lr_schedule, iter, config.total_iterations);
  const double clip_factor =
      schedule_factor(config.clip_schedule, iter, config.total_iterations);
  const double step_size = config.step_size * stats.lr_factor;
  stats.clip_used = config.clip * clip_factor;

  Eigen::VectorXd advantages = batch.advantages;
  normalize_advantages(advantages);

  // Work on copies so a failure leaves the caller's learner untouched.
  nnet::GaussianPolicy work_policy = policy;
  nnet::AdamState work_actor_opt = actor_opt;
  nnet::Mlp work_critic = critic != nullptr ? *critic : nnet::Mlp{};
  nnet::AdamState work_critic_opt = critic_opt != nullptr ? *critic_opt : nnet::AdamState{};
  nnet::ParameterVector flat = work_policy.flat();

  const auto b = static_cast<Eigen::Index>(std::min<std::size_t>(config.minibatch,
                                                                  static_cast<std::size_t>(n)));
  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Eigen::Index{0});

  double clip_weighted = 0.0;
  double sample_count = 0.0;
  try {
    for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
      std::shuffle(order.begin(), order.end(), shuffle_rng);
      for (Eigen::Index start = 0; start < n; start += b) {
        const Eigen::Index m = std::min(b, n - start);
        nnet::PolicyBatch pb;
        pb.observations.resize(batch.observations.rows(), m);
        pb.actions.resize(batch.actions.rows(), m);
        pb.old_log_probs.resize(m);
        pb.advantages.resize(m);
        nnet::ValueBatch vb;
        vb.observations.resize(batch.observations.rows(), m);
        vb.targets.resize(m);
        for (Eigen::Index j = 0; j < m; ++j) {
          const Eigen::Index src = order[static_cast<std::size_t>(start + j)];
          pb.observations.col(j) = batch.observations.col(src);
          pb.actions.col(j) = batch.actions.col(src);
          pb.old_log_probs[j] = batch.old_log_probs[src];
          pb.advantages[j] = advantages[src];
          vb.targets[j] = batch.returns[src];
        }
        vb.observations = pb.observations;

        nnet::SurrogateDiagnostics diag;
        const nnet::LossAndGradient actor = nnet::clipped_surrogate_loss(
            work_policy, pb, stats.clip_used, entropy_coef, &diag);
        nnet::adam_step(flat, actor.gradient, work_actor_opt, step_size);
        work_policy.set_flat(flat);

        stats.surrogate += diag.surrogate;
        stats.entropy += diag.entropy;
        stats.grad_norm += actor.gradient.norm();
        clip_weighted += diag.clip_fraction * static_cast<double>(m);
        sample_count += static_cast<double>(m);

        if (critic != nullptr) {
          const nnet::LossAndGradient value =
              nnet::value_loss(work_critic, vb, config.value_coef);
          nnet::adam_step(work_critic.params, value.gradient, work_critic_opt,
                          step_size);
          stats.value_loss += value.loss;
        }
        ++stats.minibatch_steps;
      }
    }
    if (!flat.allFinite() || (critic != nullptr && !work_critic.params.allFinite())) {
      throw NumericalError("adam_step", "parameters became non-finite");
    }
  } catch (const NumericalError& err) {
    UpdateStats partial = stats;
    if (partial.minibatch_steps > 0) {
      const auto k = static_cast<double>(partial.minibatch_steps);
      partial.surrogate /= k;
      partial.value_loss /= k;
      partial.entropy /= k;
      partial.grad_norm /= k;
    }
    throw UpdateFailure(err, partial);
  }

  const auto k = static_cast<double>(stats.minibatch_steps);
  stats.surrogate /= k;
  stats.value_loss /= k;
  stats.entropy /= k;
  stats.grad_norm /= k;
  stats.clip_fraction = clip_weighted / sample_count;

  policy = std::move(work_policy);
  actor_opt = std::move(work_actor_opt);
  if (critic != nullptr) {
    *critic = std::move(work_critic);
    *critic_opt = std::move(work_critic_opt);
  }
  return stats;
}

}  // namespace xrl::ppo
