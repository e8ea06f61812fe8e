#include "adex/experiment.hpp"

#include <cmath>
#include <stdexcept>

namespace adex {

namespace {

// Core loop: `draw(arm)` yields the next stack element for that arm.
template <typename DrawFn>
Trajectory run_loop(const ArmModels& models, const PolicyKind& kind, long n,
                    Rng& policy_rng, DrawFn&& draw) {
  validate_policy(kind, models);
  Trajectory traj;
  traj.n = n;
  traj.assignments.reserve(static_cast<std::size_t>(n));
  traj.outcomes.reserve(static_cast<std::size_t>(n));

  PolicyState state;
  state.horizon = n;
  for (long j = 0; j < n; ++j) {
    const int arm = next_arm(kind, state, policy_rng);
    const double y = draw(arm);
    traj.assignments.push_back(static_cast<std::int8_t>(arm));
    traj.outcomes.push_back(y);
    traj.arm_outcomes[arm].push_back(y);
    ++traj.pulls[arm];
    state.record(arm, y);
  }
  return traj;
}

}  // namespace

Trajectory run_experiment(const ArmModels& models, const LocalParam& h,
                          const PolicyKind& kind, long n,
                          ExperimentStreams& streams,
                          const RunOptions& options) {
  h.validate();
  std::array<double, 2> theta{};
  for (int a = 0; a < 2; ++a) {
    models[a].validate();
    if (n == 0) continue;  // degenerate horizon: nothing will be sampled
    theta[a] = options.theta_override[a] ? *options.theta_override[a]
                                         : local_theta(models[a], h[a], n);
  }

  if (options.keep_full_stacks) {
    // Pre-materialize both stacks from the same streams the lazy path would
    // consume; the trajectory law is identical.
    std::array<std::vector<double>, 2> stacks;
    for (int a = 0; a < 2; ++a)
      stacks[a] = sample_stack_at(models[a], theta[a], n, streams.stacks[a]);
    std::array<long, 2> pos{0, 0};
    Trajectory traj =
        run_loop(models, kind, n, streams.policy,
                 [&](int arm) { return stacks[arm][pos[arm]++]; });
    traj.arm_outcomes = std::move(stacks);
    traj.full_stacks = true;
    return traj;
  }

  return run_loop(models, kind, n, streams.policy, [&](int arm) {
    return sample_outcome(models[arm], theta[arm], streams.stacks[arm]);
  });
}

Trajectory run_experiment_on_stacks(const ArmModels& models,
                                    const PolicyKind& kind, long n,
                                    std::array<std::vector<double>, 2> stacks,
                                    Rng& policy_rng) {
  for (int a = 0; a < 2; ++a)
    if (static_cast<long>(stacks[a].size()) < n)
      throw std::invalid_argument("run_experiment_on_stacks: stack too short");
  std::array<long, 2> pos{0, 0};
  Trajectory traj = run_loop(models, kind, n, policy_rng,
                             [&](int arm) { return stacks[arm][pos[arm]++]; });
  traj.arm_outcomes = std::move(stacks);
  traj.full_stacks = true;
  return traj;
}

long AllocationPath::count_at(int arm, double t) const {
  if (!(t >= 0.0 && t <= 1.0))
    throw std::domain_error("AllocationPath: t outside [0,1]");
  const long j = static_cast<long>(std::floor(static_cast<double>(n) * t));
  const long c1 = arm1_counts[static_cast<std::size_t>(j)];
  return arm == 1 ? c1 : j - c1;
}

double AllocationPath::q(int arm, double t) const {
  return n == 0 ? 0.0
                : static_cast<double>(count_at(arm, t)) /
                      static_cast<double>(n);
}

double AllocationPath::q_terminal(int arm) const { return q(arm, 1.0); }

AllocationPath allocation_path(const Trajectory& traj) {
  AllocationPath path;
  path.n = traj.n;
  path.arm1_counts.resize(static_cast<std::size_t>(traj.n) + 1);
  long c = 0;
  path.arm1_counts[0] = 0;
  for (long j = 0; j < traj.n; ++j) {
    c += traj.assignments[static_cast<std::size_t>(j)] == 1 ? 1 : 0;
    path.arm1_counts[static_cast<std::size_t>(j) + 1] = c;
  }
  return path;
}

ScorePath score_path(const Trajectory& traj, const ArmModels& models) {
  ScorePath path;
  path.n = traj.n;
  for (int a = 0; a < 2; ++a) {
    path.info[a] = fisher_info(models[a]);
    const double scale =
        traj.n > 0
            ? 1.0 / std::sqrt(path.info[a] * static_cast<double>(traj.n))
            : 0.0;
    const auto& ys = traj.arm_outcomes[a];
    auto& z = path.z[a];
    z.resize(ys.size() + 1);
    z[0] = 0.0;
    double sum = 0.0;
    for (std::size_t i = 0; i < ys.size(); ++i) {
      sum += score(models[a], ys[i]);
      z[i + 1] = scale * sum;
    }
  }
  return path;
}

double ScorePath::z_at(int arm, double q) const {
  if (!(q >= 0.0 && q <= 1.0))
    throw std::domain_error("ScorePath: q outside [0,1]");
  const long idx = static_cast<long>(std::floor(static_cast<double>(n) * q));
  if (idx >= static_cast<long>(z[arm].size()))
    throw std::domain_error("ScorePath: q beyond consumed range");
  return z[arm][static_cast<std::size_t>(idx)];
}

double ScorePath::x_at(int arm, const AllocationPath& alloc, double t) const {
  const long idx = alloc.count_at(arm, t);
  return z[arm][static_cast<std::size_t>(idx)];
}

double loglik_ratio_on_stack(const ArmModel& model, double h,
                             const std::vector<double>& stack, double gamma,
                             long n) {
  if (!(gamma >= 0.0 && gamma <= 1.0))
    throw std::domain_error("loglik_ratio: gamma outside [0,1]");
  const long m = static_cast<long>(std::floor(static_cast<double>(n) * gamma));
  if (m > static_cast<long>(stack.size()))
    throw std::domain_error("loglik_ratio: prefix exceeds stored outcomes");
  if (h == 0.0) return 0.0;
  const double theta = local_theta(model, h, n);
  double sum = 0.0;
  for (long i = 0; i < m; ++i)
    sum += log_density_ratio(model, theta, stack[static_cast<std::size_t>(i)]);
  return sum;
}

double loglik_ratio(const Trajectory& traj, const ArmModels& models,
                    const LocalParam& h, double gamma1, double gamma0,
                    long n) {
  return loglik_ratio_on_stack(models[1], h.h1, traj.arm_outcomes[1], gamma1,
                               n) +
         loglik_ratio_on_stack(models[0], h.h0, traj.arm_outcomes[0], gamma0,
                               n);
}

double slan_expansion_arm(const ScorePath& score, int arm, double h,
                          double gamma) {
  const long m =
      static_cast<long>(std::floor(static_cast<double>(score.n) * gamma));
  const double gamma_n =
      static_cast<double>(m) / static_cast<double>(score.n);
  const double info = score.info[arm];
  return h * std::sqrt(info) * score.z_at(arm, gamma) -
         0.5 * gamma_n * h * h * info;
}

double slan_expansion(const ScorePath& score, const LocalParam& h,
                      double gamma1, double gamma0) {
  return slan_expansion_arm(score, 1, h.h1, gamma1) +
         slan_expansion_arm(score, 0, h.h0, gamma0);
}

}  // namespace adex
