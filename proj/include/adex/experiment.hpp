// Finite-sample adaptive experiments: trajectories and their empirical
// allocation, score, and log-likelihood-ratio processes.
//
// Outcomes follow the stack-of-rewards discipline: each arm owns an i.i.d.
// stack and a pull consumes the top element, so the j-th decision can only
// depend on outcomes consumed before round j plus exogenous randomness.

#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <vector>

#include "adex/model.hpp"
#include "adex/policy.hpp"
#include "adex/rng.hpp"

namespace adex {

struct Trajectory {
  long n = 0;
  std::vector<std::int8_t> assignments;          // A_j in {0,1}
  std::vector<double> outcomes;                  // Y_j
  std::array<std::vector<double>, 2> arm_outcomes;  // per-arm stack prefixes
  std::array<long, 2> pulls{0, 0};               // consumed counts N_a(n)
  // When run with keep_full_stacks, arm_outcomes holds all n entries per arm
  // (consumed prefix first); used by diagnostics that evaluate beyond the
  // observed prefix.
  bool full_stacks = false;
};

// One independent stream per randomness source; replications own distinct
// streams so the trajectory law is invariant to scheduling.
struct ExperimentStreams {
  Rng policy;
  std::array<Rng, 2> stacks;

  static ExperimentStreams make(const StreamFactory& f, std::uint64_t rep) {
    return {f.make(rep, kLanePolicy),
            {f.make(rep, kLaneStack0), f.make(rep, kLaneStack1)}};
  }
};

struct RunOptions {
  bool keep_full_stacks = false;
  // Direct sampling-parameter overrides per arm (index = arm). Used for null
  // sweeps where the configuration is not a finite local parameter
  // (e.g. theta^(0) = 0).
  std::array<std::optional<double>, 2> theta_override{};
};

// Runs the adaptive experiment for n rounds. Decisions at round j use only
// outcomes 1..j-1 and the policy stream.
Trajectory run_experiment(const ArmModels& models, const LocalParam& h,
                          const PolicyKind& kind, long n,
                          ExperimentStreams& streams,
                          const RunOptions& options = {});

// Same loop, consuming caller-provided stacks (each of length >= n). Used by
// prefix-measurability replay tests.
Trajectory run_experiment_on_stacks(const ArmModels& models,
                                    const PolicyKind& kind, long n,
                                    std::array<std::vector<double>, 2> stacks,
                                    Rng& policy_rng);

// Empirical allocation process q_{n,a}(t). Counts are stored as integers;
// divisions by n happen at query time.
struct AllocationPath {
  long n = 0;
  std::vector<long> arm1_counts;  // size n+1; counts after j rounds

  long count_at(int arm, double t) const;
  double q(int arm, double t) const;      // q_{n,a}(t) = count / n
  double q_terminal(int arm) const;       // q_{n,a}(1)
};

AllocationPath allocation_path(const Trajectory& traj);

// Normalized partial-sum score processes z_{n,a}(q) on each arm's consumed
// range, plus the time-indexed composition x_{n,a}(t) = z_{n,a}(q_{n,a}(t)).
struct ScorePath {
  long n = 0;
  std::array<double, 2> info{1.0, 1.0};
  std::array<std::vector<double>, 2> z;  // z[a][i], i = 0..#entries

  // z_{n,a}(q), evaluated at the consumed index floor(n q).
  double z_at(int arm, double q) const;
  double x_at(int arm, const AllocationPath& alloc, double t) const;
};

ScorePath score_path(const Trajectory& traj, const ArmModels& models);

// Exact finite-sample log-likelihood ratio
//   phi_hat(h; gamma1, gamma0) = sum_a sum_{i <= floor(n gamma_a)}
//       ln dP_{theta0 + h_a/sqrt(n)} / dP_{theta0} (Y_i^(a)),
// computed from per-family densities. Requires floor(n gamma_a) <= number of
// stored outcomes for arm a (run with keep_full_stacks for diagnostics that
// evaluate on the full stack).
double loglik_ratio(const Trajectory& traj, const ArmModels& models,
                    const LocalParam& h, double gamma1, double gamma0, long n);

// Stack-level version of the per-arm log-likelihood ratio.
double loglik_ratio_on_stack(const ArmModel& model, double h,
                             const std::vector<double>& stack, double gamma,
                             long n);

// Quadratic expansion h I^(1/2) z_n(gamma) - (gamma_n/2) h^2 I per arm, with
// gamma_n = floor(n gamma)/n the consumed fraction (so the Gaussian family
// matches loglik_ratio exactly).
double slan_expansion(const ScorePath& score, const LocalParam& h,
                      double gamma1, double gamma0);
double slan_expansion_arm(const ScorePath& score, int arm, double h,
                          double gamma);

}  // namespace adex
