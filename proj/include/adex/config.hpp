// Run configuration: a flat INI-style document (sections of key = value
// lines). Unknown keys are rejected with their location; parsing validates
// every referenced module invariant before any compute. The echo of a parsed
// config reparses to an identical RunConfig.

#pragma once

#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "adex/model.hpp"
#include "adex/policy.hpp"

namespace adex {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct RunConfig {
  // [model]
  Family family = Family::Bernoulli;
  double theta0 = 0.1;

  // [policy]
  std::string policy = "ts";  // ts | ucb | fixed | alternating
  double ts_alpha = 1.0;
  double ts_beta = 1.0;
  double pi1 = 0.5;
  bool ucb_paper_literal = false;

  // [run]
  std::vector<long> n = {1000};
  long reps = 10000;
  std::uint64_t seed = 0;
  std::vector<double> t_grid = {0.25, 0.5, 0.75};
  double h1 = 0.0;
  double h0 = 0.0;
  std::string estimator = "tstar";  // tstar | mle | prior_mean
  std::string regret = "in";        // in | out

  // [prior] local prior / estimator prior over h (per arm, i.i.d.)
  double mu0 = 0.0;
  double nu2 = std::numeric_limits<double>::infinity();

  // [hgrid] grid of h1 values for risk curves
  double h_min = -0.5;
  double h_max = 0.5;
  long h_count = 21;

  // [eprocess]
  std::string eprocess = "gm1";  // gm1 | gmboth | twopoint
  double ep_nu2 = 1.0;
  double ep_nu2_0 = 1.0;
  double ep_k = 1.0;

  // [size]
  double alpha = 0.05;
  std::vector<double> theta0_arm0 = {0.0, 0.02, 0.05, 0.1};

  // [limit]
  long limit_steps = 256;
  std::string limit_rule = "ts";  // ts | ucb | fixed
  double limit_pi1 = 0.5;
  double limit_nu2 = std::numeric_limits<double>::infinity();

  // [ba]
  double ba_k = 1.0;
  double ba_q = 1.0;
  double ba_info = 1.0;
  long ba_input_points = 41;
  double ba_tol = 1e-9;
  long ba_max_iter = 10000;

  bool operator==(const RunConfig&) const = default;

  ArmModels models() const;
  PolicyKind policy_kind() const;
};

// Parses the documented schema; throws ConfigError with the offending
// section.key and line number.
RunConfig parse_config(const std::string& text);

// Full echo (every key, defaults included); parse_config(echo(cfg)) == cfg.
std::string echo_config(const RunConfig& cfg);

}  // namespace adex
