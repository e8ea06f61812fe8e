// Post-experiment point estimation and regret. The optimal Bayes estimator in
// the limit experiment depends only on the terminal values (x_a(1), q_a(1))
// and is invariant to the sampling algorithm; its finite-sample version is
// theta0 + T* / sqrt(n), which reduces to the familiar Gaussian shrinkage
// estimator.

#pragma once

#include <array>
#include <limits>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "adex/experiment.hpp"
#include "adex/model.hpp"
#include "adex/stats.hpp"

namespace adex {

// Local prior h ~ N(mu0, nu2); nu2 = +infinity is the flat prior (MLE).
struct GaussianPrior {
  double mu0 = 0.0;
  double nu2 = std::numeric_limits<double>::infinity();

  bool flat() const { return std::isinf(nu2); }
  void validate() const;
};

struct PosteriorNormal {
  double mean = 0.0;
  double variance = 0.0;
};

// Filtering posterior of h given terminal (x, q):
//   N( (I^(1/2) x + mu0/nu2) / (I q + 1/nu2), 1 / (I q + 1/nu2) ).
// Throws when the prior is flat and q = 0 (no information).
PosteriorNormal posterior(double x, double q, double info,
                          const GaussianPrior& prior);

using PriorPair = std::array<GaussianPrior, 2>;  // index = arm

// Arm-wise posterior means: the Bayes-optimal estimate of (h1, h0) under
// squared error loss.
LocalParam bayes_estimate(std::array<double, 2> x, std::array<double, 2> q,
                          std::array<double, 2> infos,
                          const PriorPair& priors);

// Finite-sample plug-in theta0 + T*/sqrt(n) per arm. Algebraically identical
// to the shrinkage form
//   [I^-1 nu^-2 / (q + I^-1 nu^-2)] theta0 + [1 / (q + I^-1 nu^-2)] Ybar_n
// when mu0 = 0, with Ybar_n the arm's outcome sum divided by n.
std::array<double, 2> finite_sample_estimator(std::array<double, 2> x,
                                              std::array<double, 2> q,
                                              std::array<double, 2> infos,
                                              double theta0, long n,
                                              const PriorPair& priors);

// Point estimators evaluated inside the risk loops.
struct EstimatorSpec {
  enum class Kind {
    TStar,      // posterior-mean plug-in under `priors`
    Mle,        // flat-prior limit
    PriorMean,  // ignores the data, returns theta0 + mu0/sqrt(n)
    Oracle,     // returns the true parameter (risk-zero benchmark)
  };
  Kind kind = Kind::TStar;
  PriorPair priors{};
};

// Priors / weight functions over the local parameter pair.
struct PointMassPrior {
  LocalParam h;
};
struct GaussianIidPrior {  // h1, h0 i.i.d. N(mu, nu2)
  double mu = 0.0;
  double nu2 = 1.0;
};
struct TwoPointSymPrior {  // +h or -h (whole pair) with probability 1/2
  LocalParam h;
};
using HPrior = std::variant<PointMassPrior, GaussianIidPrior, TwoPointSymPrior>;

LocalParam sample_h(const HPrior& prior, Rng& rng);

enum class Loss { Squared };

// Frequentist risk R_n(T_n, h) = E[ l( sqrt(n) (T_n - theta(h)) ) ] for the
// arm-1 coordinate.
McEstimate frequentist_risk(const EstimatorSpec& estimator,
                            const ArmModels& models, const LocalParam& h,
                            const PolicyKind& kind, long n, Loss loss,
                            long reps, const StreamFactory& streams,
                            int threads = 1);

// Integrated risk under a prior over h: one prior draw per replication. For
// Bernoulli arms the prior is truncated to draws that keep the local
// parameter inside (0,1) (resampled; the rejected mass is negligible for the
// priors used here).
McEstimate bayes_risk(const EstimatorSpec& estimator, const ArmModels& models,
                      const HPrior& prior, const PolicyKind& kind, long n,
                      Loss loss, long reps, const StreamFactory& streams,
                      int threads = 1);

struct RiskCurve {
  std::vector<double> h1_grid;
  std::vector<McEstimate> risk;
};

// frequentist_risk along a grid of h1 values with h0 fixed.
RiskCurve risk_curve(const EstimatorSpec& estimator, const ArmModels& models,
                     const std::vector<double>& h1_grid, double h0,
                     const PolicyKind& kind, long n, Loss loss, long reps,
                     const StreamFactory& streams, int threads = 1);

// In-sample regret W_n(h) = sqrt(n) { max_a mu_a - sum_a mu_a E[q_a(1)] }.
// For the implemented families sqrt(n) mu_a = h_a exactly, so the per-
// replication regret is max(h1,h0) - h1 q1(1) - h0 q0(1). Requires both arms
// to share theta0.
McEstimate in_sample_regret(const ArmModels& models, const LocalParam& h,
                            const PolicyKind& kind, long n, long reps,
                            const StreamFactory& streams, int threads = 1);

enum class TerminalDecision {
  EmpiricalBestArm,  // larger terminal flat-prior posterior mean
  AlwaysArm1,        // data-free baseline
};

struct OosRegretEstimate {
  McEstimate estimate;
  long fallback_ties = 0;  // replications where an unsampled arm forced the
                           // prior tie-break to arm 1
};

// Out-of-sample (simple) regret of a terminal deployment decision.
OosRegretEstimate out_of_sample_regret(const ArmModels& models,
                                       const LocalParam& h,
                                       const PolicyKind& kind, long n,
                                       TerminalDecision decision, long reps,
                                       const StreamFactory& streams,
                                       int threads = 1);

// Terminal sufficient statistics of a trajectory.
struct TerminalStats {
  std::array<double, 2> x{0, 0};  // x_{n,a}(1)
  std::array<double, 2> q{0, 0};  // q_{n,a}(1)
};
TerminalStats terminal_stats(const Trajectory& traj, const ArmModels& models);

}  // namespace adex
