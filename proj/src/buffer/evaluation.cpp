#include "xrl/buffer/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <span>

#include "xrl/envs/environment.hpp"
#include "xrl/error.hpp"
#include "xrl/parallel.hpp"
#include "xrl/seeding.hpp"

namespace xrl::buffer {

EvalResult evaluate_policy(const nnet::GaussianPolicy& policy,
                           const envs::TaskSpec& task, std::size_t n_episodes,
                           std::uint64_t base_seed) {
  if (n_episodes < 1) throw UsageError("evaluation needs at least one episode");
  auto env = envs::make_env(task);
  if (policy.obs_dim() != env->observation_dim() ||
      policy.action_dim() != env->action_dim()) {
    throw UsageError("snapshot dimensions do not match task " +
                     std::string(envs::to_string(task.env_id)));
  }
  std::vector<double> returns(n_episodes);
  for (std::size_t ep = 0; ep < n_episodes; ++ep) {
    std::vector<double> obs = env->reset(evaluation_episode_seed(base_seed, ep));
    double total = 0.0;
    for (;;) {
      const Eigen::VectorXd action = policy.mean(obs);
      envs::StepResult step = env->step(
          std::span<const double>(action.data(), static_cast<std::size_t>(action.size())));
      total += step.reward_protagonist;
      if (step.terminated || step.truncated) break;
      obs = std::move(step.observation);
    }
    returns[ep] = total;
  }
  EvalResult out;
  double sum = 0.0;
  for (double r : returns) sum += r;
  out.mean_return = sum / static_cast<double>(n_episodes);
  double sq = 0.0;
  for (double r : returns) sq += (r - out.mean_return) * (r - out.mean_return);
  out.std_return = std::sqrt(sq / static_cast<double>(n_episodes));
  return out;
}

void validate_proxy(const ProxyTaskSet& proxy, const envs::TaskSpec& source,
                    const envs::TaskSpec& target) {
  if (proxy.tasks.empty()) throw UsageError("proxy task set is empty");
  if (proxy.episodes_per_task < 1) throw UsageError("proxy needs >= 1 episode per task");
  auto between = [](double v, double a, double b) {
    return v >= std::min(a, b) && v <= std::max(a, b);
  };
  for (const auto& t : proxy.tasks) {
    if (t.env_id != source.env_id || t.env_id != target.env_id) {
      throw UsageError("proxy task environment differs from source/target");
    }
    const auto& p = t.params;
    const auto& s = source.params;
    const auto& g = target.params;
    if (!between(p.gravity, s.gravity, g.gravity) ||
        !between(p.body_mass, s.body_mass, g.body_mass) ||
        !between(p.aux_mass, s.aux_mass, g.aux_mass) ||
        !between(p.length, s.length, g.length) ||
        !between(p.friction, s.friction, g.friction) ||
        !between(p.adversary_scale, s.adversary_scale, g.adversary_scale)) {
      throw UsageError("proxy task parameters must lie between source and target");
    }
  }
}

std::size_t argmax_earliest(const std::vector<double>& scores) {
  if (scores.empty()) throw UsageError("no scores to select from");
  std::size_t best = 0;
  for (std::size_t i = 1; i < scores.size(); ++i) {
    if (scores[i] > scores[best]) best = i;
  }
  return best;
}

Selection select_policy(const PolicyBuffer& buffer, const ProxyTaskSet& proxy,
                        std::uint64_t base_seed, std::size_t workers) {
  if (buffer.empty()) throw UsageError("cannot select from an empty buffer");
  if (proxy.tasks.empty()) throw UsageError("proxy task set is empty");
  const auto& snaps = buffer.snapshots();
  const std::size_t n_tasks = proxy.tasks.size();
  std::vector<double> cell(snaps.size() * n_tasks);
  parallel_for(cell.size(), workers, [&](std::size_t job) {
    const std::size_t s = job / n_tasks;
    const std::size_t t = job % n_tasks;
    cell[job] = evaluate_snapshot(snaps[s], proxy.tasks[t], proxy.episodes_per_task,
                                  base_seed)
                    .mean_return;
  });
  Selection out;
  out.scores.resize(snaps.size());
  for (std::size_t s = 0; s < snaps.size(); ++s) {
    double sum = 0.0;
    for (std::size_t t = 0; t < n_tasks; ++t) sum += cell[s * n_tasks + t];
    out.scores[s] = sum / static_cast<double>(n_tasks);
  }
  out.index = argmax_earliest(out.scores);
  out.iteration = snaps[out.index].iteration;
  out.score = out.scores[out.index];
  return out;
}

}  // namespace xrl::buffer
