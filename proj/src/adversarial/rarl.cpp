#include "xrl/adversarial/rarl.hpp"

#include <cmath>
#include <string>

#include "xrl/error.hpp"
#include "xrl/ppo/gae.hpp"

namespace xrl::adversarial {

namespace {

std::span<const double> as_span(const Eigen::VectorXd& v) {
  return {v.data(), static_cast<std::size_t>(v.size())};
}

// Advantages and own-critic returns for one agent.
struct Estimates {
  Eigen::VectorXd advantages;
  Eigen::VectorXd returns;
};

Estimates own_gae(const ppo::Trajectory& traj, const Eigen::VectorXd& rewards,
                  const Eigen::VectorXd& values, const Eigen::VectorXd& next_values,
                  const ppo::TrainConfig& cfg) {
  ppo::AdvantageEstimate est =
      ppo::compute_gae(as_span(rewards), as_span(values), as_span(next_values),
                       traj.terminated, traj.done_flags, cfg.gamma, cfg.lambda);
  return {std::move(est.advantages), std::move(est.returns)};
}

// Averaged-critic advantages for the protagonist (sign = +1) or the
// adversary (sign = -1).
Eigen::VectorXd acc_advantages(const ppo::Trajectory& traj,
                               const ppo::CriticValues& pro,
                               const ppo::CriticValues& adv,
                               const ppo::TrainConfig& cfg, double sign) {
  const std::size_t n = traj.size();
  std::vector<double> deltas(n);
  for (std::size_t t = 0; t < n; ++t) {
    const auto i = static_cast<Eigen::Index>(t);
    const AccResidual r =
        acc_residual(pro.values[i], adv.values[i], traj.rewards[i], cfg.gamma,
                     pro.next_values[i], adv.next_values[i], traj.terminated[t]);
    deltas[t] = sign > 0 ? r.protagonist : r.adversary;
  }
  return ppo::accumulate_residuals(deltas, traj.done_flags, cfg.gamma, cfg.lambda);
}

}  // namespace

std::string_view to_string(CriticMode mode) {
  switch (mode) {
    case CriticMode::kSeparate: return "separate";
    case CriticMode::kShared: return "shared";
    case CriticMode::kAcc: return "acc";
  }
  return "unknown";
}

CriticMode parse_critic_mode(std::string_view name) {
  if (name == "separate") return CriticMode::kSeparate;
  if (name == "shared") return CriticMode::kShared;
  if (name == "acc") return CriticMode::kAcc;
  throw UsageError("unknown critic mode '" + std::string(name) + "'");
}

void AdvConfig::validate() const {
  if (!(curriculum_chi > 0.0 && curriculum_chi <= 1.0)) {
    throw UsageError("curriculum chi must lie in (0, 1]");
  }
  if (!(beta_pro >= 0.0) || !(beta_adv >= 0.0)) {
    throw UsageError("entropy coefficients must be >= 0");
  }
  if (protagonist_updates < 1 || adversary_updates < 1) {
    throw UsageError("alternation counts must be >= 1");
  }
  if (ring_capacity < 1) throw UsageError("adversary ring capacity must be >= 1");
}

AgentPair AgentPair::create(std::size_t obs_dim, std::size_t action_dim,
                            std::size_t adversary_dim,
                            const std::vector<std::size_t>& hidden, CriticMode mode,
                            Rng& protagonist_rng, Rng& adversary_rng) {
  AgentPair pair;
  pair.critic_mode = mode;
  pair.protagonist = ppo::Learner::create(obs_dim, action_dim, hidden, protagonist_rng);
  pair.adversary =
      nnet::GaussianPolicy::create(obs_dim, adversary_dim, hidden, adversary_rng);
  pair.adversary_actor_opt =
      nnet::AdamState::zeros(static_cast<Eigen::Index>(pair.adversary.flat_size()));
  if (mode != CriticMode::kShared) {
    pair.adversary_critic = nnet::make_critic(obs_dim, hidden, adversary_rng);
    pair.adversary_critic_opt =
        nnet::AdamState::zeros(pair.adversary_critic->params.size());
  }
  return pair;
}

Eigen::VectorXd adversary_return(const Eigen::VectorXd& protagonist_rewards) {
  return -protagonist_rewards;
}

AccResidual acc_residual(double v_pro, double v_adv, double reward, double gamma,
                         double v_pro_next, double v_adv_next, bool done) {
  const double continuation = done ? 0.0 : gamma * (v_pro_next - v_adv_next) / 2.0;
  const double pro = (-v_pro + v_adv) / 2.0 + reward + continuation;
  return {pro, -pro};
}

double entropy_augmented_objective(double base_objective,
                                   const nnet::GaussianPolicy& policy, double beta) {
  if (!(beta >= 0.0)) throw UsageError("entropy coefficient must be >= 0");
  return base_objective + beta * nnet::gaussian_entropy(policy);
}

std::size_t curriculum_sample(std::size_t buffer_size, double chi, Rng& rng) {
  if (buffer_size == 0) throw UsageError("curriculum_sample: no adversary snapshots yet");
  if (!(chi > 0.0 && chi <= 1.0)) throw UsageError("curriculum chi must lie in (0, 1]");
  const double v = static_cast<double>(buffer_size);
  // Guard against products such as 0.3 * 10 = 3.0000000000000004.
  auto lo = static_cast<std::size_t>(std::ceil(chi * v - 1e-9));
  lo = std::clamp<std::size_t>(lo, 1, buffer_size);
  std::uniform_int_distribution<std::size_t> pick(lo, buffer_size);
  return pick(rng);
}

void AdversaryRing::push(const nnet::GaussianPolicy& policy) {
  policies_.push_back(policy);
  while (policies_.size() > capacity_) policies_.pop_front();
}

const nnet::GaussianPolicy& AdversaryRing::at(std::size_t index) const {
  if (index < 1 || index > policies_.size()) {
    throw UsageError("adversary ring index out of range");
  }
  return policies_[index - 1];
}

IterationResult rarl_train_iteration(AgentPair& pair, envs::Environment& env,
                                     const ppo::TrainConfig& config,
                                     const AdvConfig& adv_config,
                                     AdversaryRing& ring, std::uint64_t master_seed,
                                     std::size_t iter) {
  config.validate();
  adv_config.validate();
  if (pair.critic_mode != adv_config.critic_mode) {
    throw UsageError("agent pair critic mode differs from configuration");
  }
  if ((pair.critic_mode == CriticMode::kShared) == pair.adversary_critic.has_value()) {
    throw UsageError("shared mode requires exactly one critic");
  }

  AgentPair work = pair;
  IterationResult result;
  const ppo::TrainConfig& cfg = config;

  for (std::size_t k = 0; k < adv_config.protagonist_updates; ++k) {
    const std::uint64_t index = iter * adv_config.protagonist_updates + k;
    Rng rollout_rng(derive_seed(master_seed, streams::kProtagonistRollout, index));
    Rng adversary_rng(derive_seed(master_seed, streams::kAdversaryActions, 2 * index));
    Rng shuffle_rng(derive_seed(master_seed, streams::kProtagonistUpdate, index));

    const nnet::GaussianPolicy* opponent = &work.adversary;
    result.opponent_index = 0;
    if (adv_config.curriculum_enabled && !ring.empty()) {
      Rng curriculum_rng(derive_seed(master_seed, streams::kCurriculum, index));
      result.opponent_index =
          curriculum_sample(ring.size(), adv_config.curriculum_chi, curriculum_rng);
      opponent = &ring.at(result.opponent_index);
    }

    const ppo::Trajectory traj = ppo::collect_rollout(
        env, work.protagonist.policy, opponent, cfg.horizon, rollout_rng, &adversary_rng);
    result.protagonist_return = traj.mean_episode_return();

    const ppo::CriticValues pro_values = ppo::evaluate_critic(work.protagonist.critic, traj);
    Estimates own = own_gae(traj, traj.rewards, pro_values.values,
                            pro_values.next_values, cfg);
    ppo::UpdateBatch batch{traj.observations, traj.actions, traj.log_probs,
                           std::move(own.advantages), std::move(own.returns)};
    if (work.critic_mode == CriticMode::kAcc) {
      const ppo::CriticValues adv_values = ppo::evaluate_critic(*work.adversary_critic, traj);
      batch.advantages = acc_advantages(traj, pro_values, adv_values, cfg, +1.0);
    }
    result.protagonist = ppo::ppo_update(
        work.protagonist.policy, work.protagonist.actor_opt, &work.protagonist.critic,
        &work.protagonist.critic_opt, batch, cfg, adv_config.beta_pro, iter, shuffle_rng);
  }

  for (std::size_t k = 0; k < adv_config.adversary_updates; ++k) {
    const std::uint64_t index = iter * adv_config.adversary_updates + k;
    Rng rollout_rng(derive_seed(master_seed, streams::kAdversaryRollout, index));
    Rng adversary_rng(derive_seed(master_seed, streams::kAdversaryActions, 2 * index + 1));
    Rng shuffle_rng(derive_seed(master_seed, streams::kAdversaryUpdate, index));

    const ppo::Trajectory traj = ppo::collect_rollout(
        env, work.protagonist.policy, &work.adversary, cfg.horizon, rollout_rng,
        &adversary_rng);
    const Eigen::VectorXd rewards = adversary_return(traj.rewards);
    result.adversary_return = -traj.mean_episode_return();

    ppo::UpdateBatch batch;
    batch.observations = traj.observations;
    batch.actions = traj.adversary_actions;
    batch.old_log_probs = traj.adversary_log_probs;
    nnet::Mlp* critic = nullptr;
    nnet::AdamState* critic_opt = nullptr;

    const ppo::CriticValues pro_values = ppo::evaluate_critic(work.protagonist.critic, traj);
    if (work.critic_mode == CriticMode::kShared) {
      Estimates est = own_gae(traj, rewards, -pro_values.values,
                              -pro_values.next_values, cfg);
      batch.advantages = std::move(est.advantages);
      batch.returns = std::move(est.returns);
    } else {
      const ppo::CriticValues adv_values = ppo::evaluate_critic(*work.adversary_critic, traj);
      Estimates est = own_gae(traj, rewards, adv_values.values, adv_values.next_values, cfg);
      batch.advantages = std::move(est.advantages);
      batch.returns = std::move(est.returns);
      if (work.critic_mode == CriticMode::kAcc) {
        batch.advantages = acc_advantages(traj, pro_values, adv_values, cfg, -1.0);
      }
      critic = &*work.adversary_critic;
      critic_opt = &*work.adversary_critic_opt;
    }
    result.adversary = ppo::ppo_update(work.adversary, work.adversary_actor_opt, critic,
                                       critic_opt, batch, cfg, adv_config.beta_adv, iter,
                                       shuffle_rng);
  }

  // Nothing below can fail numerically; commit.
  ring.push(work.adversary);
  pair = std::move(work);
  return result;
}

}  // namespace xrl::adversarial
