// E-processes and anytime-valid inference for adaptive experiments: Gaussian
// mixture and two-point e-processes, GRO / mGRO / REGROW evaluation, and
// Blahut-Arimoto least-favorable priors for the attention-constrained
// Gaussian channel.

#pragma once

#include <array>
#include <optional>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "adex/experiment.hpp"
#include "adex/inference.hpp"
#include "adex/model.hpp"
#include "adex/stats.hpp"

namespace adex {

// --- E-process specifications ------------------------------------------------

// Gaussian weight N(0, nu2) over h^(1), arm-0 data ignored (arm-specific
// null). Closed form:
//   (1 + q1 I nu2)^(-1/2) exp[ nu2 (I^(1/2) z1)^2 / (2 (1 + q1 I nu2)) ].
struct GaussianMixtureArm1 {
  double nu2 = 1.0;
};

// Independent Gaussian weights over both arms; product of per-arm closed
// forms.
struct GaussianMixtureBoth {
  double nu2_1 = 1.0;
  double nu2_0 = 1.0;
};

// Symmetric two-point weight on {-K, +K} per arm (product over arms):
//   prod_a (1/2) sum_{h = +-K} exp{ h I_a^(1/2) z_a(q_a) - (q_a/2) I_a h^2 }.
struct TwoPoint {
  double k = 1.0;
};

// Finite mixture over local-parameter pairs.
struct WeightGrid {
  std::vector<LocalParam> points;
  Eigen::ArrayXd weights;  // nonnegative, sums to 1 within 1e-10

  void validate() const;
};

using EProcessSpec =
    std::variant<GaussianMixtureArm1, GaussianMixtureBoth, TwoPoint,
                 WeightGrid>;

// Gauss-Hermite style discretization of N(0, nu2) over h^(1) (h^(0) = 0),
// or of the independent product over both arms.
WeightGrid gaussian_weight_grid_arm1(double nu2, int points = 64);
WeightGrid gaussian_weight_grid_both(double nu2_1, double nu2_0,
                                     int points = 64);

// Gauss-Hermite nodes/weights for integrals against exp(-x^2), computed by
// Golub-Welsch on the Jacobi matrix.
void gauss_hermite(int points, Eigen::ArrayXd& nodes, Eigen::ArrayXd& weights);

// --- E-values -----------------------------------------------------------------

// Mixture e-value at state (z1, z0, q1, q0), with z_a the partial-sum score
// value at attention q_a. Nonnegative; equals 1 at zero data.
double evalue(const EProcessSpec& spec, double z1, double z0, double q1,
              double q0, std::array<double, 2> infos);

// Evaluates the e-process at a trajectory's time-t state, with the models'
// theta0 as the null reference.
double evalue_from_trajectory(const EProcessSpec& spec, const Trajectory& traj,
                              const ArmModels& models, double t);

// Anytime-valid p-value min(1, 1/e); e = 0 maps to 1.
double p_process(double evalue);

// --- Monte Carlo evaluation ----------------------------------------------------

// Uniform-over-time size of the running-maximum test at threshold 1/alpha,
// under h1 = 0 with a direct theta^(0) override per null configuration.
struct SizeSweep {
  double threshold = 0.0;
  std::vector<double> theta0_arm0;
  std::vector<McEstimate> exceed_prob;
  McEstimate sup;  // estimate at the least-favorable configuration
};

SizeSweep anytime_size(const EProcessSpec& spec, const ArmModels& models,
                       const PolicyKind& kind, long n,
                       const std::vector<double>& theta0_arm0_grid,
                       double alpha, long reps, const StreamFactory& streams,
                       int threads = 1);

// Mean e-value at each time point under a null configuration (supermartingale
// diagnostics; Definition-2 checks).
std::vector<McEstimate> evalue_means(const EProcessSpec& spec,
                                     const ArmModels& models,
                                     const PolicyKind& kind, long n,
                                     const LocalParam& h,
                                     const std::vector<double>& t_grid,
                                     long reps, const StreamFactory& streams,
                                     int threads = 1,
                                     std::array<std::optional<double>, 2>
                                         theta_override = {});

// GRO score E_{n,h}[ln e_n(q1(t), q0(t))] along a time grid.
std::vector<McEstimate> gro_curve(const EProcessSpec& spec,
                                  const ArmModels& models,
                                  const LocalParam& h, const PolicyKind& kind,
                                  long n, const std::vector<double>& t_grid,
                                  long reps, const StreamFactory& streams,
                                  int threads = 1);

McEstimate gro_score(const EProcessSpec& spec, const ArmModels& models,
                     const LocalParam& h, const PolicyKind& kind, long n,
                     double t, long reps, const StreamFactory& streams,
                     int threads = 1);

// Prior-weighted GRO: one draw h ~ weight per replication.
McEstimate mgro_score(const EProcessSpec& spec, const ArmModels& models,
                      const HPrior& weight, const PolicyKind& kind, long n,
                      double t, long reps, const StreamFactory& streams,
                      int threads = 1);

// Wald-identity form of the null KL divergence at time t:
//   sum_a n E[q_a(t)] KL(P_{theta0 + h_a/sqrt(n)} || P_{theta0}).
double kl_null(const ArmModels& models, const LocalParam& h,
               std::array<double, 2> mean_q, long n);

// Limit-experiment version sum_a E[q_a(t)] (I_a / 2) h_a^2.
double kl_null_limit(std::array<double, 2> infos, const LocalParam& h,
                     std::array<double, 2> mean_q);

// REGROW: inf over a compact alternative grid of (GRO - oracle growth). The
// oracle benchmark is the limit-experiment likelihood-ratio growth
// q_a(t) (I_a/2) h_a^2, evaluated per replication, which is exact for the
// mixture e-processes above (a point-mass grid recovers score 0).
struct RegrowResult {
  McEstimate score;      // estimate at the minimizing alternative
  LocalParam argmin;
  std::vector<McEstimate> per_h;
};

RegrowResult regrow_score(const EProcessSpec& spec, const ArmModels& models,
                          const std::vector<LocalParam>& h1_grid,
                          const PolicyKind& kind, long n, double t, long reps,
                          const StreamFactory& streams, int threads = 1);

// --- Blahut-Arimoto -------------------------------------------------------------

// One arm's attention-constrained Gaussian channel: input h on a symmetric
// grid in [-K, K], output z(q) ~ N(I^(1/2) q h, q).
struct ChannelSpec {
  double q = 1.0;
  double info = 1.0;
  Eigen::ArrayXd input_grid;

  void validate() const;
  static ChannelSpec symmetric(double k, double q, double info, int points);
};

struct BaResult {
  double capacity = 0.0;        // nats
  Eigen::ArrayXd weights;       // capacity-achieving input distribution
  std::vector<double> lower_bounds;  // mutual information per iteration
  int iterations = 0;
};

// Computes channel capacity and the least-favorable input distribution.
// Stops when the capacity gap (max KL-to-mixture minus average) drops below
// tol; throws if max_iter is exceeded, reporting the last gap.
BaResult blahut_arimoto(const ChannelSpec& channel, double tol = 1e-9,
                        int max_iter = 10000);

// Builds the symmetric two-point e-process when the least-favorable prior
// concentrates on {-K, +K} for both arms (checked via Blahut-Arimoto
// concentration); otherwise throws advising a WeightGrid built from the BA
// output.
EProcessSpec two_point_eprocess_from_ba(std::array<double, 2> q,
                                        std::array<double, 2> infos, double k);

}  // namespace adex
