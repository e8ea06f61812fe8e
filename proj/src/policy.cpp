#include "adex/policy.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace adex {

void validate_policy(const PolicyKind& kind, const ArmModels& models) {
  if (const auto* ts = std::get_if<ThompsonBeta>(&kind)) {
    if (!(ts->prior_alpha > 0.0) || !(ts->prior_beta > 0.0))
      throw std::domain_error("ThompsonBeta: prior parameters must be > 0");
    if (models[0].family != Family::Bernoulli ||
        models[1].family != Family::Bernoulli)
      throw std::domain_error(
          "ThompsonBeta: Beta-Bernoulli Thompson sampling requires the "
          "Bernoulli family");
  } else if (const auto* fx = std::get_if<Fixed>(&kind)) {
    if (!(fx->pi1 >= 0.0 && fx->pi1 <= 1.0))
      throw std::domain_error("Fixed: pi1 must lie in [0,1]");
  }
}

double ucb_index(double mean, long pulls, long j, long n, bool paper_literal) {
  if (pulls == 0) return std::numeric_limits<double>::infinity();
  if (j < 1 || j > n) throw std::domain_error("ucb_index: need 1 <= j <= n");
  const double ratio = paper_literal
                           ? std::log(static_cast<double>(j) / n)
                           : std::log(static_cast<double>(n) / j);
  const double radicand = 2.0 * ratio / static_cast<double>(pulls);
  return mean + (radicand > 0.0 ? std::sqrt(radicand) : 0.0);
}

namespace {

int thompson_arm(const ThompsonBeta& ts, const PolicyState& st, Rng& rng) {
  std::array<double, 2> draw{};
  for (int a = 0; a < 2; ++a) {
    const double alpha = ts.prior_alpha + st.sums[a];
    const double beta =
        ts.prior_beta + static_cast<double>(st.pulls[a]) - st.sums[a];
    draw[a] = rng.beta(alpha, beta);
  }
  return draw[1] >= draw[0] ? 1 : 0;  // posterior ties (measure zero) -> arm 1
}

int ucb_arm(const Ucb& ucb, const PolicyState& st, Rng& rng) {
  const long j = st.step + 1;
  const double i1 =
      ucb_index(st.mean(1), st.pulls[1], j, st.horizon, ucb.paper_literal);
  const double i0 =
      ucb_index(st.mean(0), st.pulls[0], j, st.horizon, ucb.paper_literal);
  if (i1 == i0) return rng.bernoulli(0.5) ? 1 : 0;
  return i1 > i0 ? 1 : 0;
}

}  // namespace

int next_arm(const PolicyKind& kind, const PolicyState& state, Rng& rng) {
  return std::visit(
      [&](const auto& k) -> int {
        using K = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<K, ThompsonBeta>)
          return thompson_arm(k, state, rng);
        else if constexpr (std::is_same_v<K, Ucb>)
          return ucb_arm(k, state, rng);
        else if constexpr (std::is_same_v<K, Fixed>)
          return rng.bernoulli(k.pi1) ? 1 : 0;
        else  // Alternating: arm 1 on odd rounds (1-based)
          return (state.step % 2 == 0) ? 1 : 0;
      },
      kind);
}

const char* policy_name(const PolicyKind& kind) {
  return std::visit(
      [](const auto& k) -> const char* {
        using K = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<K, ThompsonBeta>) return "ts";
        else if constexpr (std::is_same_v<K, Ucb>) return "ucb";
        else if constexpr (std::is_same_v<K, Fixed>) return "fixed";
        else return "alternating";
      },
      kind);
}

}  // namespace adex
