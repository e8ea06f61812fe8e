// Outcome families, local parametrization, scores and Fisher information.
//
// Everything downstream works with two arms indexed a in {0,1}. Each arm has
// a one-parameter outcome family and a reference parameter theta0; the actual
// sampling parameter in an experiment of horizon n is the local perturbation
// theta0 + h / sqrt(n).

#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "adex/rng.hpp"

namespace adex {

enum class Family : std::uint8_t {
  Bernoulli,
  Gaussian,  // unit variance, known
};

struct ArmModel {
  Family family = Family::Bernoulli;
  double theta0 = 0.5;

  // Throws std::domain_error if the invariants fail
  // (Bernoulli: 0 < theta0 < 1; Gaussian: theta0 finite).
  void validate() const;
};

// Both arms; index is the arm id.
using ArmModels = std::array<ArmModel, 2>;

// Local parameters (h^(1), h^(0)) for arms 1 and 0.
struct LocalParam {
  double h1 = 0.0;
  double h0 = 0.0;

  double operator[](int arm) const { return arm == 1 ? h1 : h0; }
  void validate() const;  // both finite
};

// qmd score psi(y) at the reference parameter. For Bernoulli,
// psi(y) = (theta0 (1 - theta0))^-1 (y - theta0) and y must be 0 or 1;
// for Gaussian, psi(y) = y - theta0.
double score(const ArmModel& model, double y);

// Fisher information I = E0[psi^2]; strictly positive.
double fisher_info(const ArmModel& model);

std::array<double, 2> fisher_infos(const ArmModels& models);

// theta0 + h / sqrt(n). Throws if a Bernoulli result leaves (0,1): the local
// regime must keep the parameter valid, and clamping would corrupt risk
// curves.
double local_theta(const ArmModel& model, double h, long n);

// Log density ratio ln dP_theta / dP_theta0 (y) for one observation.
double log_density_ratio(const ArmModel& model, double theta, double y);

// n i.i.d. draws from the family at parameter theta (stack of rewards).
std::vector<double> sample_stack_at(const ArmModel& model, double theta,
                                    long n, Rng& rng);

// n i.i.d. draws at local_theta(model, h, n).
std::vector<double> sample_stack(const ArmModel& model, double h, long n,
                                 Rng& rng);

// One draw at parameter theta.
double sample_outcome(const ArmModel& model, double theta, Rng& rng);

}  // namespace adex
