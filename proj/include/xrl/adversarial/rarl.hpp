#pragma once

#include <cstddef>
#include <cstdint>
#include <deque>
#include <optional>
#include <span>
#include <string_view>

#include "xrl/envs/environment.hpp"
#include "xrl/nnet/gaussian_policy.hpp"
#include "xrl/ppo/ppo.hpp"

namespace xrl::adversarial {

// separate: each agent has its own critic regressed on its own returns.
// shared:   one critic regressed on protagonist returns; the adversary uses
//           its negation and never updates it.
// acc:      both critics kept; advantages come from the averaged residual.
enum class CriticMode { kSeparate, kShared, kAcc };

std::string_view to_string(CriticMode mode);
CriticMode parse_critic_mode(std::string_view name);

struct AdvConfig {
  CriticMode critic_mode = CriticMode::kSeparate;
  double beta_pro = 0.0;
  double beta_adv = 0.0;
  double curriculum_chi = 0.5;
  bool curriculum_enabled = false;
  std::size_t protagonist_updates = 1;
  std::size_t adversary_updates = 1;
  std::size_t ring_capacity = 200;

  void validate() const;
};

struct AgentPair {
  CriticMode critic_mode = CriticMode::kSeparate;
  // In shared mode protagonist.critic is the single shared critic.
  ppo::Learner protagonist;
  nnet::GaussianPolicy adversary;
  nnet::AdamState adversary_actor_opt;
  std::optional<nnet::Mlp> adversary_critic;
  std::optional<nnet::AdamState> adversary_critic_opt;

  std::size_t critic_count() const { return adversary_critic ? 2 : 1; }

  // The protagonist is drawn from `protagonist_rng` exactly as a plain
  // PPO learner would be; the adversary from `adversary_rng`.
  static AgentPair create(std::size_t obs_dim, std::size_t action_dim,
                          std::size_t adversary_dim,
                          const std::vector<std::size_t>& hidden, CriticMode mode,
                          Rng& protagonist_rng, Rng& adversary_rng);
};

// Adversary rewards: elementwise negation of the protagonist's.
Eigen::VectorXd adversary_return(const Eigen::VectorXd& protagonist_rewards);

struct AccResidual {
  double protagonist = 0.0;
  double adversary = 0.0;
};

// delta_pro = (-V_pro(s) + V_adv(s)) / 2 + r + gamma (1 - done)(V_pro(s') - V_adv(s')) / 2
// delta_adv = -delta_pro
AccResidual acc_residual(double v_pro, double v_adv, double reward, double gamma,
                         double v_pro_next, double v_adv_next, bool done);

// base + beta * entropy(policy).
double entropy_augmented_objective(double base_objective,
                                   const nnet::GaussianPolicy& policy, double beta);

// Index in [ceil(chi * v), v] (1-based, inclusive), uniformly.
std::size_t curriculum_sample(std::size_t buffer_size, double chi, Rng& rng);

// Most recent adversary policies, oldest first, bounded capacity.
class AdversaryRing {
 public:
  explicit AdversaryRing(std::size_t capacity = 200) : capacity_(capacity) {}

  void push(const nnet::GaussianPolicy& policy);
  std::size_t size() const { return policies_.size(); }
  bool empty() const { return policies_.empty(); }
  // 1-based: at(size()) is the newest snapshot.
  const nnet::GaussianPolicy& at(std::size_t index) const;

 private:
  std::size_t capacity_;
  std::deque<nnet::GaussianPolicy> policies_;
};

struct IterationResult {
  ppo::UpdateStats protagonist;
  ppo::UpdateStats adversary;
  double protagonist_return = 0.0;
  double adversary_return = 0.0;
  // Ring index of the opponent used in the protagonist phase; 0 = live adversary.
  std::size_t opponent_index = 0;
};

// One alternating iteration: protagonist rollout + update against the live or
// curriculum-sampled adversary, then adversary rollout + update on negated
// rewards, then the adversary is pushed into `ring`. Random streams are
// derived from (master_seed, iter). Throws ppo::UpdateFailure on numerical
// failure, in which case `pair` and `ring` are unchanged.
IterationResult rarl_train_iteration(AgentPair& pair, envs::Environment& env,
                                     const ppo::TrainConfig& config,
                                     const AdvConfig& adv_config,
                                     AdversaryRing& ring, std::uint64_t master_seed,
                                     std::size_t iter);

}  // namespace xrl::adversarial
