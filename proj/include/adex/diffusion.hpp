// The Gaussian limit experiment: signal processes z_a(q) = I_a^(1/2) h_a q +
// W_a(q) observed through a continuous-time allocation process, Girsanov
// log-likelihood ratios, and quadratic variation.
//
// Signal paths are sampled exactly at every attention point a run visits:
// advancing past the last knot draws a fresh Gaussian increment, and reading
// between knots draws from the Brownian bridge. Interpolated (non-sampling)
// reads are linear and are reserved for diagnostics; path construction never
// interpolates, so quadratic variation matches attention without
// discretization bias.

#pragma once

#include <array>
#include <functional>
#include <vector>

#include <Eigen/Dense>

#include "adex/model.hpp"
#include "adex/rng.hpp"

namespace adex {

// Shared attention/time resolution. step * num_steps must equal 1 within
// 1e-12.
struct LimitGrid {
  double step = 0.0;
  long num_steps = 0;

  void validate() const;
  static LimitGrid with_steps(long num_steps);
  double time(long k) const { return step * static_cast<double>(k); }
};

// One arm's signal path, kept as sorted (attention, value) knots.
class SignalPath {
 public:
  SignalPath() = default;
  explicit SignalPath(double drift) : drift_(drift), s_{0.0}, v_{0.0} {}

  double drift() const { return drift_; }
  double last_attention() const { return s_.back(); }
  const std::vector<double>& knots_attention() const { return s_; }
  const std::vector<double>& knots_value() const { return v_; }

  // Exact sample of z(at): extends beyond the last knot with a fresh
  // increment, refines between knots via a Brownian bridge. The sampled value
  // becomes a knot, so repeated observation is consistent.
  double observe(double at, Rng& rng);

  // Linear interpolation between existing knots; at must not exceed the last
  // knot. Does not alter the path.
  double read(double at) const;

 private:
  double drift_ = 0.0;               // I^(1/2) h
  std::vector<double> s_{0.0};       // knot attentions, strictly increasing
  std::vector<double> v_{0.0};       // knot values; v_[0] = z(0) = 0
};

// Empty (lazy) signal paths for a limit run.
std::array<SignalPath, 2> make_signal_paths(const LocalParam& h,
                                            std::array<double, 2> infos);

// Signals materialized on the attention grid; increments over each step are
// independent Normal(I^(1/2) h step, step).
std::array<SignalPath, 2> simulate_signals(const LocalParam& h,
                                           std::array<double, 2> infos,
                                           const LimitGrid& grid, Rng& rng);

// What a rule may condition on: current time, allocations, signal values at
// the current allocations, and the exogenous uniform. `rng` provides any
// additional policy randomization.
struct LimitState {
  double t = 0.0;
  double q1 = 0.0;
  double q0 = 0.0;
  double x1 = 0.0;
  double x0 = 0.0;
  double u = 0.0;
};

using LimitRule = std::function<double(const LimitState&, Rng&)>;

struct LimitPath {
  Eigen::ArrayXd t, q1, q0, x1, x0;  // size num_steps + 1
  double u = 0.0;
};

// Euler evolution q_a(t + step) = q_a(t) + pi_a(t) step with x_a read from
// the signal paths at each new allocation point. Throws if the rule returns a
// fraction outside [0,1].
LimitPath run_limit_experiment(const LimitRule& rule,
                               std::array<SignalPath, 2>& signals,
                               const LimitGrid& grid, Rng& rng);

// Girsanov log-likelihood ratio h I^(1/2) z(gamma) - (gamma/2) h^2 I.
double girsanov_loglr(const SignalPath& z, double h, double info,
                      double gamma);
double girsanov_loglr(double z_gamma, double h, double info, double gamma);

// Running sum of squared increments of a time-grid path.
Eigen::ArrayXd quadratic_variation(const Eigen::ArrayXd& x);

// Limit analogues of the finite-sample rules (diagnostics).
LimitRule constant_rule(double pi1);
// Draws per-arm local parameters from the Gaussian filter posterior and
// allocates to the larger draw; prior_nu2 = +infinity gives the flat-prior
// (MLE) filter with a fair coin while an arm is unsampled.
LimitRule limit_thompson_rule(std::array<double, 2> infos, double prior_nu2);
LimitRule limit_ucb_rule();

}  // namespace adex
