// Deterministic criteria: oracles, zero-sum bookkeeping, clipping mechanics
// and harness integrity.

#include <algorithm>
#include <cmath>
#include <map>
#include <random>
#include <sstream>
#include <tuple>

#include "acceptance/acceptance.hpp"
#include "xrl/adversarial/rarl.hpp"
#include "xrl/buffer/policy_buffer.hpp"
#include "xrl/cli/config_grammar.hpp"
#include "xrl/envs/environment.hpp"
#include "xrl/harness/report.hpp"
#include "xrl/harness/sweep.hpp"
#include "xrl/nnet/adam.hpp"
#include "xrl/nnet/losses.hpp"
#include "xrl/nnet/serialize.hpp"
#include "xrl/ppo/gae.hpp"
#include "xrl/ppo/ppo.hpp"

namespace xrl::acceptance {

namespace fs = std::filesystem;

namespace {

// ---- oracle suite ---------------------------------------------------------

// A_t = sum_l (gamma lambda)^l delta_{t+l}, summed term by term up to the end
// of the episode containing t.
double brute_force_advantage(const std::vector<double>& r, const std::vector<double>& v,
                             const std::vector<bool>& done, double bootstrap,
                             double gamma, double lambda, std::size_t t) {
  const std::size_t n = r.size();
  double sum = 0.0;
  for (std::size_t k = t; k < n; ++k) {
    const double next = k + 1 < n ? v[k + 1] : bootstrap;
    const double delta = r[k] + (done[k] ? 0.0 : gamma * next) - v[k];
    sum += std::pow(gamma * lambda, static_cast<double>(k - t)) * delta;
    if (done[k]) break;
  }
  return sum;
}

double gae_max_error(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-2.0, 2.0), unit(0.0, 1.0);
  std::uniform_int_distribution<std::size_t> len(1, 60);
  double worst = 0.0;
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = len(rng);
    std::vector<double> r(n), v(n);
    std::vector<bool> done(n);
    for (std::size_t i = 0; i < n; ++i) {
      r[i] = u(rng);
      v[i] = u(rng);
      done[i] = unit(rng) < 0.1;
    }
    const double bootstrap = u(rng);
    const double gamma = 0.9 + 0.1 * unit(rng);
    const double lambda = unit(rng);
    const auto est = ppo::compute_gae(r, v, done, bootstrap, gamma, lambda);
    for (std::size_t t = 0; t < n; ++t) {
      const double a = brute_force_advantage(r, v, done, bootstrap, gamma, lambda, t);
      worst = std::max(worst, std::abs(a - est.advantages[static_cast<Eigen::Index>(t)]));
      worst = std::max(worst, std::abs(a + v[t] - est.returns[static_cast<Eigen::Index>(t)]));
    }
  }
  return worst;
}

double fd_relative_error(const nnet::DifferentiableLoss& loss,
                         const nnet::ParameterVector& x) {
  const nnet::ParameterVector analytic = loss(x).gradient;
  const double h = 1e-6;
  double worst = 0.0;
  nnet::ParameterVector probe = x;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    probe[i] = x[i] + h;
    const double up = loss(probe).loss;
    probe[i] = x[i] - h;
    const double down = loss(probe).loss;
    probe[i] = x[i];
    const double numeric = (up - down) / (2.0 * h);
    const double scale = std::max({std::abs(numeric), std::abs(analytic[i]), 1e-5});
    worst = std::max(worst, std::abs(numeric - analytic[i]) / scale);
  }
  return worst;
}

nnet::Matrix random_matrix(Eigen::Index rows, Eigen::Index cols, std::mt19937_64& rng,
                           double scale) {
  std::normal_distribution<double> n(0.0, scale);
  nnet::Matrix m(rows, cols);
  for (Eigen::Index j = 0; j < cols; ++j) {
    for (Eigen::Index i = 0; i < rows; ++i) m(i, j) = n(rng);
  }
  return m;
}

// Cycles through raw network outputs, the clipped surrogate and the value
// loss over randomly shaped networks.
double gradient_max_error(std::mt19937_64& rng) {
  std::uniform_int_distribution<std::size_t> dim(1, 4), width(2, 8), depth(0, 2);
  double worst = 0.0;
  for (int trial = 0; trial < 50; ++trial) {
    nnet::MlpSpec spec;
    spec.input_dim = dim(rng);
    spec.output_dim = dim(rng);
    spec.hidden_sizes.assign(depth(rng), 0);
    for (auto& h : spec.hidden_sizes) h = width(rng);
    const nnet::ParameterVector params = nnet::init_parameters(spec, 0.5, rng);
    const Eigen::Index batch = 7;
    const nnet::Matrix inputs = random_matrix(spec.input_dim, batch, rng, 1.0);

    nnet::DifferentiableLoss loss;
    nnet::ParameterVector x;
    switch (trial % 3) {
      case 0: {
        const nnet::Matrix weights = random_matrix(spec.output_dim, batch, rng, 1.0);
        loss = [=](const nnet::ParameterVector& p) {
          nnet::ForwardCache cache;
          const nnet::Matrix out = nnet::mlp_forward_batch(spec, p, inputs, &cache);
          return nnet::LossAndGradient{(out.array() * weights.array()).sum(),
                                       nnet::mlp_backward(spec, p, cache, weights)};
        };
        x = params;
        break;
      }
      case 1: {
        nnet::GaussianPolicy policy{{spec, params},
                                    random_matrix(spec.output_dim, 1, rng, 0.3).col(0)};
        nnet::PolicyBatch pb;
        pb.observations = inputs;
        pb.actions = random_matrix(spec.output_dim, batch, rng, 1.0);
        pb.advantages = random_matrix(batch, 1, rng, 1.0).col(0);
        pb.old_log_probs.resize(batch);
        std::normal_distribution<double> jitter(0.0, 0.3);
        for (Eigen::Index j = 0; j < batch; ++j) {
          const Eigen::VectorXd a = pb.actions.col(j);
          const Eigen::VectorXd o = pb.observations.col(j);
          pb.old_log_probs[j] =
              nnet::gaussian_log_prob(policy, {o.data(), static_cast<std::size_t>(o.size())},
                                      {a.data(), static_cast<std::size_t>(a.size())}) +
              jitter(rng);
        }
        loss = [policy, pb](const nnet::ParameterVector& p) mutable {
          policy.set_flat(p);
          return nnet::clipped_surrogate_loss(policy, pb, 0.2, 0.01);
        };
        x = policy.flat();
        break;
      }
      default: {
        nnet::MlpSpec vspec = spec;
        vspec.output_dim = 1;
        const nnet::Mlp critic{vspec, nnet::init_parameters(vspec, 1.0, rng)};
        const nnet::ValueBatch vb{inputs, random_matrix(batch, 1, rng, 1.0).col(0)};
        loss = [critic, vb](const nnet::ParameterVector& p) {
          nnet::Mlp c = critic;
          c.params = p;
          return nnet::value_loss(c, vb, 0.5);
        };
        x = critic.params;
        break;
      }
    }
    worst = std::max(worst, fd_relative_error(loss, x));
  }
  return worst;
}

double adam_max_error(std::mt19937_64& rng) {
  const Eigen::Index n = 17;
  nnet::ParameterVector params = random_matrix(n, 1, rng, 1.0).col(0);
  std::vector<double> p(params.data(), params.data() + n), m(n, 0.0), v(n, 0.0);
  nnet::AdamState state = nnet::AdamState::zeros(n);
  const double lr = 3e-4;
  double worst = 0.0;
  for (int step = 1; step <= 200; ++step) {
    const nnet::ParameterVector grad = random_matrix(n, 1, rng, 1.0).col(0);
    nnet::adam_step(params, grad, state, lr);
    for (Eigen::Index i = 0; i < n; ++i) {
      m[i] = 0.9 * m[i] + 0.1 * grad[i];
      v[i] = 0.999 * v[i] + 0.001 * grad[i] * grad[i];
      const double mhat = m[i] / (1.0 - std::pow(0.9, step));
      const double vhat = v[i] / (1.0 - std::pow(0.999, step));
      p[i] -= lr * mhat / (std::sqrt(vhat) + 1e-8);
      worst = std::max(worst, std::abs(p[i] - params[i]));
    }
  }
  return worst;
}

// Counts antisymmetry violations and disagreements with the averaged-residual
// formula.
std::size_t acc_violations(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-10.0, 10.0), unit(0.0, 1.0);
  std::size_t bad = 0;
  for (int i = 0; i < 10000; ++i) {
    const double vp = u(rng), va = u(rng), r = u(rng), vpn = u(rng), van = u(rng);
    const double gamma = unit(rng);
    const bool done = unit(rng) < 0.2;
    const auto res = adversarial::acc_residual(vp, va, r, gamma, vpn, van, done);
    const double expected =
        (-vp + va) / 2.0 + r + gamma * (done ? 0.0 : 1.0) * (vpn - van) / 2.0;
    if (res.adversary != -res.protagonist) ++bad;
    if (std::abs(res.protagonist - expected) > 1e-12 * (1.0 + std::abs(expected))) ++bad;
  }
  return bad;
}

std::size_t curriculum_violations(std::mt19937_64& rng) {
  std::uniform_int_distribution<std::size_t> size(1, 200), twentieths(1, 20);
  std::size_t bad = 0;
  for (int i = 0; i < 100000; ++i) {
    const std::size_t v = size(rng);
    const std::size_t k = twentieths(rng);
    const double chi = static_cast<double>(k) / 20.0;
    // ceil(k v / 20) in integers.
    const std::size_t lo = std::max<std::size_t>(1, (k * v + 19) / 20);
    const std::size_t idx = adversarial::curriculum_sample(v, chi, rng);
    if (idx < lo || idx > v) ++bad;
  }
  return bad;
}

Outcome oracle_suite(const Context&) {
  std::mt19937_64 rng(20240601);
  const double gae = gae_max_error(rng);
  const double grad = gradient_max_error(rng);
  const double adam = adam_max_error(rng);
  const std::size_t acc = acc_violations(rng);
  const std::size_t cur = curriculum_violations(rng);
  const bool pass = gae <= 1e-10 && grad < 1e-4 && adam <= 1e-12 && acc == 0 && cur == 0;
  return {pass, fmt("gae max abs err %.3g (<=1e-10), fd max rel err %.3g (<1e-4), "
                    "adam max abs err %.3g (<=1e-12), acc violations %zu, "
                    "curriculum violations %zu/100000",
                    gae, grad, adam, acc, cur)};
}

// ---- zero-sum and determinism ---------------------------------------------

std::size_t zero_sum_violations(envs::EnvId id, std::size_t& steps) {
  auto env = envs::make_env(envs::TaskSpec::defaults(id));
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(-1.5, 1.5);
  std::size_t bad = 0;
  for (std::uint64_t ep = 0; ep < 20; ++ep) {
    env->reset(ep);
    while (!env->needs_reset()) {
      std::vector<double> a(env->action_dim()), b(env->adversary_dim());
      for (auto& x : a) x = u(rng);
      for (auto& x : b) x = u(rng);
      const auto res = env->step(a, b);
      ++steps;
      if (res.reward_adversary != -res.reward_protagonist) ++bad;
    }
  }
  return bad;
}

Outcome zero_sum_determinism(const Context& ctx) {
  std::size_t steps = 0, bad = 0;
  for (auto id : {envs::EnvId::kPendulum, envs::EnvId::kCartPole, envs::EnvId::kPogoHopper}) {
    bad += zero_sum_violations(id, steps);
  }

  const std::vector<std::pair<std::string, std::string>> runs = {
      {"ppo_pendulum", "run.algo = ppo\nrun.seed = 11\nppo.iterations = 6\n"
                       "ppo.snapshot_interval = 2\ntask.env = pendulum\n"},
      {"esc_cartpole", "run.algo = esc-ppo\nrun.seed = 12\nppo.iterations = 4\n"
                       "ppo.snapshot_interval = 3\ntask.env = cartpole\n"},
      {"eacc_pogo", "run.algo = eacc-rarl\nrun.seed = 13\nppo.iterations = 5\n"
                    "ppo.snapshot_interval = 2\nadv.curriculum = true\n"
                    "task.env = pogo_hopper\n"},
  };
  const fs::path root = fresh_dir(ctx, "determinism");
  std::string detail;
  bool identical = true;
  for (const auto& [name, text] : runs) {
    train_from_text(text, root / name / "a");
    train_from_text(text, root / name / "b");
    std::string why;
    const bool same = same_tree(root / name / "a", root / name / "b", &why);
    identical = identical && same;
    detail += "; " + name + ": " + why;
  }
  return {bad == 0 && identical,
          fmt("%zu/%zu env steps violate r_adv == -r_pro", bad, steps) + detail};
}

// ---- strict clipping --------------------------------------------------------

Outcome strict_clipping(const Context&) {
  const auto task = envs::TaskSpec::defaults(envs::EnvId::kPendulum);
  auto env = envs::make_env(task);
  Rng init(derive_seed(5, streams::kInit));
  ppo::Learner learner = ppo::Learner::create(env->observation_dim(), env->action_dim(),
                                              {64, 64}, init);
  Rng rollout_rng(derive_seed(5, streams::kProtagonistRollout));
  const ppo::Trajectory traj =
      ppo::collect_rollout(*env, learner.policy, learner.critic, nullptr, 2048, rollout_rng);
  const ppo::UpdateBatch batch = ppo::make_update_batch(traj, learner.critic, 0.99, 0.95);

  // Same frozen rollout, same shuffles, two clip parameters.
  ppo::TrainConfig config;
  auto update_with = [&](double clip, ppo::Learner& l) {
    config.clip = clip;
    Rng shuffle(derive_seed(5, streams::kProtagonistUpdate));
    return ppo::ppo_update(l, batch, config, 0, shuffle);
  };
  ppo::Learner strict = learner, loose = learner;
  const auto s_strict = update_with(0.01, strict);
  const auto s_loose = update_with(0.2, loose);

  // Ratios of the moved policy against the frozen rollout.
  nnet::PolicyBatch pb{batch.observations, batch.actions, batch.old_log_probs,
                       batch.advantages};
  ppo::normalize_advantages(pb.advantages);
  nnet::SurrogateDiagnostics d_strict, d_loose;
  nnet::clipped_surrogate_loss(loose.policy, pb, 0.01, 0.0, &d_strict);
  nnet::clipped_surrogate_loss(loose.policy, pb, 0.2, 0.0, &d_loose);

  // Every discarded sample, taken alone, must give an exactly zero gradient.
  std::size_t discarded = 0, nonzero = 0, live_nonzero = 0, live = 0;
  for (Eigen::Index j = 0; j < pb.size(); ++j) {
    nnet::PolicyBatch one{pb.observations.col(j), pb.actions.col(j),
                          pb.old_log_probs.segment(j, 1), pb.advantages.segment(j, 1)};
    const auto g = nnet::clipped_surrogate_loss(loose.policy, one, 0.01, 0.0).gradient;
    const bool zero = (g.array() == 0.0).all();
    if (d_strict.discarded[static_cast<std::size_t>(j)]) {
      ++discarded;
      if (!zero) ++nonzero;
    } else {
      ++live;
      if (!zero) ++live_nonzero;
    }
  }
  const bool pass = s_strict.clip_fraction > s_loose.clip_fraction &&
                    d_strict.clip_fraction > d_loose.clip_fraction && discarded > 0 &&
                    nonzero == 0 && live_nonzero == live;
  return {pass, fmt("update clip fraction eps=0.01 %.4f vs eps=0.2 %.4f; frozen-batch "
                    "clip fraction %.4f vs %.4f; %zu discarded samples, %zu with nonzero "
                    "gradient; %zu/%zu kept samples carry gradient",
                    s_strict.clip_fraction, s_loose.clip_fraction, d_strict.clip_fraction,
                    d_loose.clip_fraction, discarded, nonzero, live_nonzero, live)};
}

// ---- harness integrity ------------------------------------------------------

std::string digest_snapshots(const fs::path& dir) {
  std::string all;
  for (const auto& [iter, file] : buffer::read_manifest(dir).files) {
    all += nnet::read_file(file);
  }
  return cli::content_digest(all);
}

// Independent per-task argmax: largest mean, earliest iteration on ties.
std::map<std::tuple<std::string, std::string, double>, harness::ReportRow> scan_best(
    const harness::TransferReport& report) {
  std::map<std::tuple<std::string, std::string, double>, harness::ReportRow> best;
  for (const auto& row : report.rows) {
    if (row.failed()) continue;
    const auto key = std::make_tuple(row.algo, row.param, row.value);
    auto it = best.find(key);
    if (it == best.end() || row.mean > it->second.mean ||
        (row.mean == it->second.mean && row.iteration < it->second.iteration)) {
      best[key] = row;
    }
  }
  return best;
}

Outcome harness_integrity(const Context& ctx) {
  const fs::path root = fresh_dir(ctx, "harness");
  train_from_text("run.algo = ppo\nrun.seed = 3\nppo.iterations = 12\n"
                  "ppo.snapshot_interval = 4\ntask.env = pendulum\n",
                  root / "ppo");
  train_from_text("run.algo = sc-ppo\nrun.seed = 3\nppo.iterations = 10\n"
                  "ppo.snapshot_interval = 4\ntask.env = pendulum\n",
                  root / "sc");

  harness::SweepSpec spec;
  spec.buffers = {{root / "ppo", ""}, {root / "sc", ""}};
  spec.param = harness::TaskParam::kGravity;
  spec.values = {0.5, 1.0, 1.25, 1.75};
  spec.n_episodes = 8;
  spec.base_seed = 99;

  const std::string before = digest_snapshots(root / "ppo") + digest_snapshots(root / "sc");
  const auto first = harness::run_sweep(spec);
  spec.workers = 3;
  const auto second = harness::run_sweep(spec);
  const std::string after = digest_snapshots(root / "ppo") + digest_snapshots(root / "sc");
  const bool deterministic = first.rows == second.rows;
  const bool read_only = before == after;

  std::ostringstream csv1, csv2;
  harness::write_report_csv(csv1, first);
  std::istringstream in(csv1.str());
  const auto reread = harness::read_report_csv(in);
  harness::write_report_csv(csv2, reread);
  const bool round_trip = reread.rows == first.rows && csv1.str() == csv2.str();

  const auto table = harness::best_iteration_table(first);
  const auto scanned = scan_best(first);
  bool table_ok = table.size() == scanned.size();
  for (const auto& row : table) {
    auto it = scanned.find(std::make_tuple(row.algo, row.param, row.value));
    table_ok = table_ok && it != scanned.end() && it->second.iteration == row.iteration &&
               it->second.mean == row.mean && it->second.std == row.std;
  }
  // 4 + 4 snapshots (including each final one) on 4 tasks.
  const bool complete = first.rows.size() == 32;

  return {deterministic && read_only && round_trip && table_ok && complete,
          fmt("%zu rows (expected 32); repeat sweep identical: %s; snapshots untouched: "
              "%s; csv round trip exact: %s; best table matches independent scan over "
              "%zu groups: %s",
              first.rows.size(), deterministic ? "yes" : "no", read_only ? "yes" : "no",
              round_trip ? "yes" : "no", scanned.size(), table_ok ? "yes" : "no")};
}

}  // namespace

std::vector<Criterion> mechanics_criteria() {
  return {{"oracle_suite", oracle_suite},
          {"zero_sum_determinism", zero_sum_determinism},
          {"strict_clipping", strict_clipping},
          {"harness_integrity", harness_integrity}};
}

}  // namespace xrl::acceptance
