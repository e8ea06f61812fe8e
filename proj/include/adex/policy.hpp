// Sequential assignment rules: Thompson Sampling with a Beta prior, UCB,
// fixed randomized designs, and a deterministic alternating design.

#pragma once

#include <array>
#include <variant>

#include "adex/model.hpp"
#include "adex/rng.hpp"

namespace adex {

struct ThompsonBeta {
  double prior_alpha = 1.0;
  double prior_beta = 1.0;
};

struct Ucb {
  // When set, evaluates the index exactly as printed in some references,
  // sqrt(2 ln(j/n) / N), mapping negative radicands to a zero bonus. The
  // default is the anytime form sqrt(2 ln(n/j) / N).
  bool paper_literal = false;
};

struct Fixed {
  double pi1 = 0.5;  // per-round probability of assigning arm 1
};

struct Alternating {};

using PolicyKind = std::variant<ThompsonBeta, Ucb, Fixed, Alternating>;

// Throws std::domain_error on invalid hyperparameters; Thompson requires the
// Bernoulli family.
void validate_policy(const PolicyKind& kind, const ArmModels& models);

// Per-arm pull counts and outcome sums after j of n rounds.
struct PolicyState {
  long horizon = 0;                    // n
  long step = 0;                       // j, rounds completed
  std::array<long, 2> pulls{0, 0};     // N_a
  std::array<double, 2> sums{0, 0};    // S_a

  void record(int arm, double outcome) {
    ++step;
    ++pulls[arm];
    sums[arm] += outcome;
  }
  double mean(int arm) const {
    return pulls[arm] > 0 ? sums[arm] / static_cast<double>(pulls[arm]) : 0.0;
  }
};

// UCB index for one arm before round j (1-based) of n. pulls == 0 returns
// +infinity, forcing one initial pull of each arm.
double ucb_index(double mean, long pulls, long j, long n,
                 bool paper_literal = false);

// Chooses the next arm. Depends only on (state, rng): decisions are
// measurable with respect to past outcomes and exogenous randomness.
int next_arm(const PolicyKind& kind, const PolicyState& state, Rng& rng);

const char* policy_name(const PolicyKind& kind);

}  // namespace adex
