#include "xrl/cli/trainer.hpp"

#include <ostream>

#include "xrl/adversarial/rarl.hpp"
#include "xrl/cli/config_grammar.hpp"
#include "xrl/buffer/policy_buffer.hpp"
#include "xrl/envs/environment.hpp"
#include "xrl/nnet/serialize.hpp"
#include "xrl/ppo/ppo.hpp"
#include "xrl/ppo/train_log.hpp"

namespace xrl::cli {

namespace fs = std::filesystem;

namespace {

bool snapshot_due(std::size_t iter, const ppo::TrainConfig& t) {
  return iter % t.snapshot_interval == 0 || iter == t.total_iterations;
}

bool is_final(std::size_t iter, const ppo::TrainConfig& t) {
  return iter == t.total_iterations && iter % t.snapshot_interval != 0;
}

void report(std::ostream* progress, std::size_t iter, double ret) {
  if (progress) *progress << "iter " << iter << " return " << ppo::format_double(ret) << '\n';
}

TrainSummary train_ppo(const RunConfig& c, envs::Environment& env, const fs::path& out,
                       const buffer::Provenance& prov, std::ostream* progress) {
  const auto& t = c.train;
  Rng init_rng(derive_seed(c.master_seed, streams::kInit, 0));
  ppo::Learner learner =
      ppo::Learner::create(env.observation_dim(), env.action_dim(), t.hidden_sizes, init_rng);
  auto buf = buffer::PolicyBuffer::create(out / "buffer", t.snapshot_interval, prov);
  ppo::TrainLog log(out / "train_log.csv", ppo::ppo_log_columns());

  TrainSummary summary;
  for (std::size_t iter = 0; iter <= t.total_iterations; ++iter) {
    Rng rollout_rng(derive_seed(c.master_seed, streams::kProtagonistRollout, iter));
    const ppo::Trajectory traj =
        ppo::collect_rollout(env, learner.policy, nullptr, t.horizon, rollout_rng);
    const double ret = traj.mean_episode_return();
    summary.source_returns.push_back(ret);
    if (snapshot_due(iter, t)) buf.record(iter, learner.policy, ret, is_final(iter, t));
    if (iter == t.total_iterations) break;

    Rng shuffle_rng(derive_seed(c.master_seed, streams::kProtagonistUpdate, iter));
    const auto batch = ppo::make_update_batch(traj, learner.critic, t.gamma, t.lambda);
    const ppo::UpdateStats stats = ppo::ppo_update(learner, batch, t, iter, shuffle_rng);
    log.append(ppo::ppo_log_row(iter, ret, stats));
    summary.iterations = iter + 1;
    report(progress, iter, ret);
  }
  return summary;
}

TrainSummary train_rarl(const RunConfig& c, envs::Environment& env, const fs::path& out,
                        const buffer::Provenance& prov, std::ostream* progress) {
  const auto& t = c.train;
  const auto& a = *c.adv;
  Rng init_rng(derive_seed(c.master_seed, streams::kInit, 0));
  Rng adv_init_rng(derive_seed(c.master_seed, streams::kAdversaryInit, 0));
  adversarial::AgentPair pair = adversarial::AgentPair::create(
      env.observation_dim(), env.action_dim(), env.adversary_dim(), t.hidden_sizes,
      a.critic_mode, init_rng, adv_init_rng);
  adversarial::AdversaryRing ring(a.ring_capacity);

  auto buf = buffer::PolicyBuffer::create(out / "buffer", t.snapshot_interval, prov);
  buffer::Provenance adv_prov = prov;
  adv_prov.algorithm += "-adversary";
  auto adv_buf = buffer::PolicyBuffer::create(out / "adversary", t.snapshot_interval, adv_prov);
  ppo::TrainLog log(out / "train_log.csv", ppo::adversarial_log_columns());

  TrainSummary summary;
  for (std::size_t iter = 0; iter < t.total_iterations; ++iter) {
    const nnet::GaussianPolicy protagonist = pair.protagonist.policy;
    const nnet::GaussianPolicy adversary = pair.adversary;
    const auto r = adversarial::rarl_train_iteration(pair, env, t, a, ring, c.master_seed, iter);
    summary.source_returns.push_back(r.protagonist_return);
    if (snapshot_due(iter, t)) {
      buf.record(iter, protagonist, r.protagonist_return);
      adv_buf.record(iter, adversary, r.adversary_return);
    }
    log.append(ppo::adversarial_log_row(iter, r.protagonist_return, r.protagonist,
                                        r.adversary_return, r.adversary));
    summary.iterations = iter + 1;
    report(progress, iter, r.protagonist_return);
  }

  // Rollout of the final protagonist against the live adversary, seeded as
  // the next iteration's protagonist phase would be.
  const std::size_t last = t.total_iterations;
  const std::uint64_t index = last * a.protagonist_updates;
  Rng rollout_rng(derive_seed(c.master_seed, streams::kProtagonistRollout, index));
  Rng adversary_rng(derive_seed(c.master_seed, streams::kAdversaryActions, 2 * index));
  const ppo::Trajectory traj = ppo::collect_rollout(env, pair.protagonist.policy, &pair.adversary,
                                                    t.horizon, rollout_rng, &adversary_rng);
  const double ret = traj.mean_episode_return();
  summary.source_returns.push_back(ret);
  buf.record(last, pair.protagonist.policy, ret, is_final(last, t));
  adv_buf.record(last, pair.adversary, -ret, is_final(last, t));
  return summary;
}

}  // namespace

TrainSummary train_run(const RunConfig& config, const fs::path& out, std::ostream* progress) {
  config.validate();
  std::error_code ec;
  fs::create_directories(out, ec);
  if (ec) throw IoError(out.string(), "cannot create output directory: " + ec.message());
  const std::string echo = echo_config(config);
  nnet::write_file_atomic(out / "config.cfg", echo);

  buffer::Provenance prov{config.task, config.algorithm, content_digest(echo)};
  const auto env = envs::make_env(config.task);
  if (config.adv) return train_rarl(config, *env, out, prov, progress);
  return train_ppo(config, *env, out, prov, progress);
}

}  // namespace xrl::cli
