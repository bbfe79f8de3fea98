#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "test_support.hpp"
#include "xrl/envs/environment.hpp"
#include "xrl/error.hpp"
#include "xrl/nnet/losses.hpp"
#include "xrl/ppo/gae.hpp"
#include "xrl/ppo/ppo.hpp"
#include "xrl/ppo/train_log.hpp"

namespace xrl::ppo {
namespace {

std::span<const double> span_of(const std::vector<double>& v) { return {v.data(), v.size()}; }

// A_t as the literal double sum over the rest of the episode.
std::vector<double> brute_force_gae(const std::vector<double>& r, const std::vector<double>& v,
                                    const std::vector<bool>& done, double bootstrap, double g,
                                    double lam) {
  const std::size_t n = r.size();
  std::vector<double> adv(n, 0.0);
  for (std::size_t t = 0; t < n; ++t) {
    double weight = 1.0;
    for (std::size_t k = t; k < n; ++k) {
      const double next = k + 1 < n ? v[k + 1] : bootstrap;
      const double delta = r[k] + g * next * (done[k] ? 0.0 : 1.0) - v[k];
      adv[t] += weight * delta;
      if (done[k]) break;
      weight *= g * lam;
    }
  }
  return adv;
}

TEST(Gae, LambdaZeroGivesTdResiduals) {
  const std::vector<double> r = {1.0, 0.5, -0.2}, v = {0.3, 0.1, 0.4};
  const std::vector<bool> done = {false, true, false};
  const auto est = compute_gae(span_of(r), span_of(v), done, 0.7, 0.9, 0.0);
  EXPECT_DOUBLE_EQ(est.advantages[0], 1.0 + 0.9 * 0.1 - 0.3);
  EXPECT_DOUBLE_EQ(est.advantages[1], 0.5 - 0.1);
  EXPECT_DOUBLE_EQ(est.advantages[2], -0.2 + 0.9 * 0.7 - 0.4);
}

TEST(Gae, SingleStep) {
  const std::vector<double> r = {1.0}, v = {0.0};
  const auto est = compute_gae(span_of(r), span_of(v), {false}, 2.0, 0.99, 0.95);
  EXPECT_NEAR(est.advantages[0], 2.98, 1e-15);
  EXPECT_NEAR(est.returns[0], 2.98, 1e-15);
}

TEST(Gae, MatchesBruteForceWithTerminations) {
  std::mt19937_64 rng(7);
  std::normal_distribution<double> n(0.0, 1.0);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t len = 50;
    std::vector<double> r(len), v(len);
    for (auto& x : r) x = n(rng);
    for (auto& x : v) x = n(rng);
    std::vector<bool> done(len, false);
    done[12] = true;
    done[31] = true;
    const double boot = n(rng), g = 0.9 + 0.1 * u(rng), lam = u(rng);
    const auto est = compute_gae(span_of(r), span_of(v), done, boot, g, lam);
    const auto oracle = brute_force_gae(r, v, done, boot, g, lam);
    for (std::size_t t = 0; t < len; ++t) {
      EXPECT_NEAR(est.advantages[static_cast<Eigen::Index>(t)], oracle[t], 1e-10);
      EXPECT_NEAR(est.returns[static_cast<Eigen::Index>(t)], oracle[t] + v[t], 1e-10);
    }
  }
}

TEST(Gae, GeneralFormAgreesWithSpecFormWhenSuccessorsAreNextValues) {
  const std::vector<double> r = {1, 2, 3, 4, 5}, v = {0.5, -0.5, 0.25, 1.0, 0.0};
  const std::vector<bool> done = {false, true, false, false, false};
  const double boot = 0.75;
  std::vector<double> next = {v[1], 0.0, v[3], v[4], boot};
  const auto a = compute_gae(span_of(r), span_of(v), done, boot, 0.99, 0.95);
  const auto b = compute_gae(span_of(r), span_of(v), span_of(next), done, done, 0.99, 0.95);
  EXPECT_LT((a.advantages - b.advantages).cwiseAbs().maxCoeff(), 1e-14);
}

TEST(Gae, TruncationBootstrapsButStopsAccumulation) {
  // Step 1 is truncated: its successor is valued, but step 0 does not see
  // step 2's residual.
  const std::vector<double> r = {1, 1, 1}, v = {0, 0, 0}, next = {0, 10, 0};
  const std::vector<bool> terminated = {false, false, false}, boundary = {false, true, false};
  const auto est =
      compute_gae(span_of(r), span_of(v), span_of(next), terminated, boundary, 0.5, 1.0);
  EXPECT_DOUBLE_EQ(est.advantages[1], 1.0 + 0.5 * 10.0);
  EXPECT_DOUBLE_EQ(est.advantages[0], 1.0 + 0.5 * est.advantages[1]);
  EXPECT_DOUBLE_EQ(est.advantages[2], 1.0);
}

TEST(ClippedSurrogate, Examples) {
  EXPECT_EQ(clipped_surrogate(1.0, 3.5, 0.2), 3.5);
  EXPECT_EQ(clipped_surrogate(1.0, -2.0, 0.2), -2.0);
  EXPECT_DOUBLE_EQ(clipped_surrogate(1.3, 1.0, 0.2), 1.2);
  // Negative advantage below the band: the clipped branch 0.8 * -1 is the
  // smaller of the two and is the one min() keeps.
  EXPECT_DOUBLE_EQ(clipped_surrogate(0.5, -1.0, 0.2), std::min(0.5 * -1.0, 0.8 * -1.0));
  EXPECT_DOUBLE_EQ(clipped_surrogate(0.5, -1.0, 0.2), -0.8);
}

TEST(Schedule, Factors) {
  EXPECT_EQ(schedule_factor(Schedule::kConstant, 17, 100), 1.0);
  EXPECT_EQ(schedule_factor(Schedule::kLinear, 0, 100), 1.0);
  EXPECT_EQ(schedule_factor(Schedule::kLinear, 100, 100), 0.0);
  EXPECT_DOUBLE_EQ(schedule_factor(Schedule::kLinear, 25, 100), 0.75);
  EXPECT_EQ(parse_schedule("linear"), Schedule::kLinear);
  EXPECT_THROW(parse_schedule("cosine"), UsageError);
}

TEST(TrainConfig, ValidatesInvariants) {
  TrainConfig c;
  for (double eps : {0.01, 0.025, 0.05, 0.1, 0.2, 0.3}) {
    c.clip = eps;
    EXPECT_NO_THROW(c.validate());
  }
  c.clip = 1.5;
  EXPECT_THROW(c.validate(), UsageError);
  c = TrainConfig{};
  c.minibatch = c.horizon + 1;
  EXPECT_THROW(c.validate(), UsageError);
  c = TrainConfig{};
  c.gamma = 0.0;
  EXPECT_THROW(c.validate(), UsageError);
  c = TrainConfig{};
  c.lambda = 1.5;
  EXPECT_THROW(c.validate(), UsageError);
  c = TrainConfig{};
  c.epochs = 0;
  EXPECT_THROW(c.validate(), UsageError);
}

TEST(NormalizeAdvantages, ZeroMeanUnitStd) {
  std::mt19937_64 rng(3);
  Eigen::VectorXd a = testing::random_matrix(1000, 1, rng, 7.0).array() + 3.0;
  normalize_advantages(a);
  EXPECT_LT(std::abs(a.mean()), 1e-10);
  const double sd = std::sqrt((a.array() - a.mean()).square().mean());
  EXPECT_LT(std::abs(sd - 1.0), 1e-8);
  Eigen::VectorXd constant = Eigen::VectorXd::Constant(5, 2.0);
  normalize_advantages(constant);
  EXPECT_EQ(constant, Eigen::VectorXd::Zero(5));
}

struct Frozen {
  Learner learner;
  Trajectory traj;
  UpdateBatch batch;
};

Frozen frozen_rollout(std::size_t horizon = 512) {
  auto env = envs::make_env(envs::TaskSpec::defaults(envs::EnvId::kPendulum));
  Rng init(1);
  Frozen f{Learner::create(3, 1, {16, 16}, init), {}, {}};
  Rng rollout(2);
  f.traj = collect_rollout(*env, f.learner.policy, f.learner.critic, nullptr, horizon, rollout);
  f.batch = make_update_batch(f.traj, f.learner.critic, 0.99, 0.95);
  return f;
}

TEST(Rollout, ShapesAndBootstrap) {
  auto env = envs::make_env(envs::TaskSpec::defaults(envs::EnvId::kPendulum));
  Rng init(1);
  const Learner l = Learner::create(3, 1, {8}, init);
  Rng rng(5);
  const Trajectory one = collect_rollout(*env, l.policy, l.critic, nullptr, 1, rng);
  ASSERT_EQ(one.size(), 1u);
  const Eigen::VectorXd s1 = one.next_observations.col(0);
  EXPECT_EQ(one.bootstrap_value, nnet::value_of(l.critic, {s1.data(), 3}));
  EXPECT_EQ(one.adversary_actions.cwiseAbs().maxCoeff(), 0.0);
}

TEST(Rollout, DeterministicAndResetsEpisodes) {
  auto env = envs::make_env(envs::TaskSpec::defaults(envs::EnvId::kPendulum));
  Rng init(1);
  const Learner l = Learner::create(3, 1, {8}, init);
  Rng a(9), b(9);
  const Trajectory ta = collect_rollout(*env, l.policy, nullptr, 450, a);
  const Trajectory tb = collect_rollout(*env, l.policy, nullptr, 450, b);
  EXPECT_EQ(ta.observations, tb.observations);
  EXPECT_EQ(ta.rewards, tb.rewards);
  EXPECT_EQ(ta.episode_returns.size(), 2u);  // horizon 200 per episode
  EXPECT_TRUE(ta.done_flags[199]);
  EXPECT_TRUE(ta.done_flags[399]);
  EXPECT_FALSE(ta.terminated[199]);
  for (Eigen::Index t = 0; t < 450; ++t) {
    const Eigen::VectorXd obs = ta.observations.col(t);
    const Eigen::VectorXd act = ta.actions.col(t);
    EXPECT_EQ(ta.log_probs[t], nnet::gaussian_log_prob(l.policy, {obs.data(), 3}, {act.data(), 1}));
  }
}

TEST(PpoUpdate, StrictClippingDiscardsMoreSamples) {
  const Frozen f = frozen_rollout();
  TrainConfig cfg;
  cfg.horizon = 512;
  double fractions[2];
  const double eps[2] = {0.01, 0.2};
  for (int i = 0; i < 2; ++i) {
    Learner l = f.learner;
    cfg.clip = eps[i];
    Rng shuffle(4);
    fractions[i] = ppo_update(l, f.batch, cfg, 0, shuffle).clip_fraction;
  }
  EXPECT_GT(fractions[0], fractions[1]);
  EXPECT_GE(fractions[1], 0.0);
  EXPECT_LE(fractions[0], 1.0);
}

TEST(PpoUpdate, ClipFractionNonIncreasingInEpsilon) {
  Frozen f = frozen_rollout();
  // Move the policy away from the behaviour policy so ratios spread out.
  std::mt19937_64 rng(6);
  nnet::GaussianPolicy moved = f.learner.policy;
  moved.set_flat(moved.flat() + testing::random_matrix(moved.flat().size(), 1, rng, 0.05));
  nnet::PolicyBatch pb{f.batch.observations, f.batch.actions, f.batch.old_log_probs,
                       f.batch.advantages};
  double previous = 1.0;
  for (double eps : {0.01, 0.025, 0.05, 0.1, 0.2, 0.3, 0.6}) {
    nnet::SurrogateDiagnostics d;
    nnet::clipped_surrogate_loss(moved, pb, eps, 0.0, &d);
    EXPECT_LE(d.clip_fraction, previous);
    previous = d.clip_fraction;
  }
}

TEST(PpoUpdate, DiscardedSamplesHaveExactlyZeroGradient) {
  Frozen f = frozen_rollout(256);
  std::mt19937_64 rng(8);
  nnet::GaussianPolicy moved = f.learner.policy;
  moved.set_flat(moved.flat() + testing::random_matrix(moved.flat().size(), 1, rng, 0.05));
  std::size_t discarded = 0;
  for (Eigen::Index j = 0; j < f.batch.observations.cols(); ++j) {
    nnet::PolicyBatch one{f.batch.observations.col(j), f.batch.actions.col(j),
                          f.batch.old_log_probs.segment(j, 1), f.batch.advantages.segment(j, 1)};
    nnet::SurrogateDiagnostics d;
    const auto lg = nnet::clipped_surrogate_loss(moved, one, 0.01, 0.0, &d);
    const double r = d.ratios[0], a = one.advantages[0];
    if ((a > 0 && r > 1.01) || (a < 0 && r < 0.99)) {
      ++discarded;
      EXPECT_TRUE(d.discarded[0]);
      EXPECT_EQ(lg.gradient.cwiseAbs().maxCoeff(), 0.0);
    } else {
      EXPECT_FALSE(d.discarded[0]);
    }
  }
  EXPECT_GT(discarded, 10u);
}

TEST(PpoUpdate, WideClipOneEpochFullBatchIsVanillaPolicyGradient) {
  const Frozen f = frozen_rollout(128);
  TrainConfig cfg;
  cfg.horizon = 128;
  cfg.minibatch = 128;
  cfg.epochs = 1;
  cfg.clip = 0.99;
  nnet::GaussianPolicy policy = f.learner.policy;
  nnet::AdamState opt = f.learner.actor_opt;
  Rng shuffle(1);
  ppo_update(policy, opt, nullptr, nullptr, f.batch, cfg, 0.0, 0, shuffle);

  // Oracle: one Adam step along the gradient of the unclipped objective.
  Eigen::VectorXd adv = f.batch.advantages;
  normalize_advantages(adv);
  const auto objective = [&](const Eigen::VectorXd& flat) {
    nnet::GaussianPolicy q = f.learner.policy;
    q.set_flat(flat);
    double total = 0.0;
    for (Eigen::Index j = 0; j < adv.size(); ++j) {
      const Eigen::VectorXd obs = f.batch.observations.col(j);
      const Eigen::VectorXd act = f.batch.actions.col(j);
      total += std::exp(nnet::gaussian_log_prob(q, {obs.data(), 3}, {act.data(), 1}) -
                        f.batch.old_log_probs[j]) *
               adv[j];
    }
    return -total / static_cast<double>(adv.size());
  };
  // A first Adam step moves each coordinate by lr * g / (|g| + 1e-8), which
  // amplifies finite-difference noise on near-zero components. Compare
  // exactly where the gradient is well resolved; elsewhere only the bound.
  const Eigen::VectorXd start = f.learner.policy.flat();
  const Eigen::VectorXd grad = testing::central_difference(objective, start);
  Eigen::VectorXd expected = start;
  nnet::AdamState oracle_opt = f.learner.actor_opt;
  nnet::adam_step(expected, grad, oracle_opt, cfg.step_size);
  const Eigen::VectorXd moved = policy.flat();
  std::size_t resolved = 0;
  for (Eigen::Index i = 0; i < start.size(); ++i) {
    if (std::abs(grad[i]) > 1e-5) {
      ++resolved;
      EXPECT_NEAR(moved[i], expected[i], 1e-9) << i;
    } else {
      EXPECT_LE(std::abs(moved[i] - start[i]), cfg.step_size * (1.0 + 1e-12)) << i;
    }
  }
  EXPECT_GT(resolved, static_cast<std::size_t>(start.size()) / 2);
}

TEST(PpoUpdate, DeterministicGivenShuffleSeed) {
  const Frozen f = frozen_rollout();
  TrainConfig cfg;
  cfg.horizon = 512;
  Learner a = f.learner, b = f.learner;
  Rng ra(11), rb(11);
  const UpdateStats sa = ppo_update(a, f.batch, cfg, 0, ra);
  const UpdateStats sb = ppo_update(b, f.batch, cfg, 0, rb);
  EXPECT_EQ(sa.surrogate, sb.surrogate);
  EXPECT_EQ(sa.value_loss, sb.value_loss);
  EXPECT_EQ(sa.clip_fraction, sb.clip_fraction);
  EXPECT_EQ(a.policy.flat(), b.policy.flat());
  EXPECT_EQ(a.critic.params, b.critic.params);
  EXPECT_EQ(sa.minibatch_steps, 10u * 8u);
}

TEST(PpoUpdate, ScheduleScalesStepAndClip) {
  const Frozen f = frozen_rollout();
  TrainConfig cfg;
  cfg.horizon = 512;
  cfg.lr_schedule = Schedule::kLinear;
  cfg.clip_schedule = Schedule::kLinear;
  cfg.total_iterations = 4;
  Learner l = f.learner;
  Rng r(1);
  const UpdateStats s = ppo_update(l, f.batch, cfg, 1, r);
  EXPECT_DOUBLE_EQ(s.lr_factor, 0.75);
  EXPECT_DOUBLE_EQ(s.clip_used, 0.15);
}

TEST(PpoUpdate, NonFiniteLossLeavesLearnerUntouched) {
  Frozen f = frozen_rollout(128);
  TrainConfig cfg;
  cfg.horizon = 128;
  f.batch.returns[5] = std::numeric_limits<double>::infinity();
  Learner l = f.learner;
  Rng r(1);
  try {
    ppo_update(l, f.batch, cfg, 0, r);
    FAIL() << "expected UpdateFailure";
  } catch (const UpdateFailure& e) {
    EXPECT_FALSE(e.stage().empty());
  }
  EXPECT_EQ(l.policy.flat(), f.learner.policy.flat());
  EXPECT_EQ(l.critic.params, f.learner.critic.params);
  EXPECT_EQ(l.actor_opt.step_count, f.learner.actor_opt.step_count);
}

TEST(TrainLog, WritesHeaderAndRows) {
  testing::TempDir dir("log");
  {
    TrainLog log(dir / "log.csv", ppo_log_columns());
    UpdateStats s;
    s.surrogate = 0.5;
    log.append(ppo_log_row(3, -120.25, s));
  }
  std::ifstream in(dir / "log.csv");
  std::string header, row;
  std::getline(in, header);
  std::getline(in, row);
  EXPECT_EQ(header, "iter,mean_return,surrogate,value_loss,entropy,clip_fraction,lr_factor");
  EXPECT_EQ(row, "3,-120.25,0.5,0,0,0,1");
}

}  // namespace
}  // namespace xrl::ppo
