#include "adex/diffusion.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace adex {

void LimitGrid::validate() const {
  if (!(step > 0.0) || num_steps < 1)
    throw std::domain_error("LimitGrid: need step > 0 and num_steps >= 1");
  if (std::abs(step * static_cast<double>(num_steps) - 1.0) > 1e-12)
    throw std::domain_error("LimitGrid: step * num_steps must equal 1");
}

LimitGrid LimitGrid::with_steps(long num_steps) {
  LimitGrid g{1.0 / static_cast<double>(num_steps), num_steps};
  g.validate();
  return g;
}

double SignalPath::observe(double at, Rng& rng) {
  if (!(at >= 0.0)) throw std::domain_error("SignalPath: attention < 0");
  // Knot attentions accumulate from fractional Euler steps; treat points
  // within an ulp-scale window as the same knot.
  constexpr double kEps = 1e-12;

  if (at >= s_.back() - kEps) {
    const double dt = at - s_.back();
    if (dt <= kEps) return v_.back();
    const double z = v_.back() + drift_ * dt + rng.normal() * std::sqrt(dt);
    s_.push_back(at);
    v_.push_back(z);
    return z;
  }

  // Interior: locate the bracket and draw from the Brownian bridge. The
  // drift drops out of the conditional law.
  const auto it = std::lower_bound(s_.begin(), s_.end(), at);
  const std::size_t r = static_cast<std::size_t>(it - s_.begin());
  if (std::abs(s_[r] - at) <= kEps) return v_[r];
  const std::size_t l = r - 1;
  const double sl = s_[l], sr = s_[r];
  const double w = (at - sl) / (sr - sl);
  const double mean = v_[l] + w * (v_[r] - v_[l]);
  const double var = (at - sl) * (sr - at) / (sr - sl);
  const double z = mean + rng.normal() * std::sqrt(var);
  s_.insert(s_.begin() + static_cast<std::ptrdiff_t>(r), at);
  v_.insert(v_.begin() + static_cast<std::ptrdiff_t>(r), z);
  return z;
}

double SignalPath::read(double at) const {
  if (!(at >= 0.0 && at <= s_.back() + 1e-12))
    throw std::domain_error("SignalPath: read past last knot");
  const auto it = std::lower_bound(s_.begin(), s_.end(), at);
  std::size_t r = static_cast<std::size_t>(it - s_.begin());
  if (r == s_.size()) return v_.back();
  if (s_[r] == at || r == 0) return v_[r];
  const double w = (at - s_[r - 1]) / (s_[r] - s_[r - 1]);
  return v_[r - 1] + w * (v_[r] - v_[r - 1]);
}

std::array<SignalPath, 2> make_signal_paths(const LocalParam& h,
                                            std::array<double, 2> infos) {
  h.validate();
  return {SignalPath(std::sqrt(infos[0]) * h.h0),
          SignalPath(std::sqrt(infos[1]) * h.h1)};
}

std::array<SignalPath, 2> simulate_signals(const LocalParam& h,
                                           std::array<double, 2> infos,
                                           const LimitGrid& grid, Rng& rng) {
  grid.validate();
  auto paths = make_signal_paths(h, infos);
  // Arm 1 first, then arm 0, each over the full grid.
  for (int a : {1, 0})
    for (long k = 1; k <= grid.num_steps; ++k)
      paths[a].observe(grid.time(k), rng);
  return paths;
}

LimitPath run_limit_experiment(const LimitRule& rule,
                               std::array<SignalPath, 2>& signals,
                               const LimitGrid& grid, Rng& rng) {
  grid.validate();
  const long m = grid.num_steps;
  LimitPath path;
  path.t.resize(m + 1);
  path.q1.resize(m + 1);
  path.q0.resize(m + 1);
  path.x1.resize(m + 1);
  path.x0.resize(m + 1);
  path.u = rng.uniform();

  double q1 = 0.0;
  path.t[0] = path.q1[0] = path.q0[0] = 0.0;
  path.x1[0] = path.x0[0] = 0.0;

  LimitState st;
  st.u = path.u;
  for (long k = 0; k < m; ++k) {
    st.t = grid.time(k);
    st.q1 = path.q1[k];
    st.q0 = path.q0[k];
    st.x1 = path.x1[k];
    st.x0 = path.x0[k];
    const double pi1 = rule(st, rng);
    if (!(pi1 >= 0.0 && pi1 <= 1.0))
      throw std::runtime_error(
          "run_limit_experiment: rule returned a fraction outside [0,1]");
    const double t_next = grid.time(k + 1);
    q1 += pi1 * grid.step;
    const double q0 = t_next - q1;  // adding-up holds by construction
    path.t[k + 1] = t_next;
    path.q1[k + 1] = q1;
    path.q0[k + 1] = q0;
    path.x1[k + 1] = signals[1].observe(q1, rng);
    path.x0[k + 1] = signals[0].observe(q0, rng);
  }
  return path;
}

double girsanov_loglr(double z_gamma, double h, double info, double gamma) {
  if (!(gamma >= 0.0 && gamma <= 1.0))
    throw std::domain_error("girsanov_loglr: gamma outside [0,1]");
  return h * std::sqrt(info) * z_gamma - 0.5 * gamma * h * h * info;
}

double girsanov_loglr(const SignalPath& z, double h, double info,
                      double gamma) {
  return girsanov_loglr(z.read(gamma), h, info, gamma);
}

Eigen::ArrayXd quadratic_variation(const Eigen::ArrayXd& x) {
  Eigen::ArrayXd qv(x.size());
  if (x.size() == 0) return qv;
  qv[0] = 0.0;
  for (Eigen::Index k = 1; k < x.size(); ++k) {
    const double d = x[k] - x[k - 1];
    qv[k] = qv[k - 1] + d * d;
  }
  return qv;
}

LimitRule constant_rule(double pi1) {
  if (!(pi1 >= 0.0 && pi1 <= 1.0))
    throw std::domain_error("constant_rule: pi1 outside [0,1]");
  return [pi1](const LimitState&, Rng&) { return pi1; };
}

LimitRule limit_thompson_rule(std::array<double, 2> infos, double prior_nu2) {
  return [infos, prior_nu2](const LimitState& st, Rng& rng) -> double {
    const double prior_prec = std::isinf(prior_nu2) ? 0.0 : 1.0 / prior_nu2;
    const std::array<double, 2> q{st.q0, st.q1};
    const std::array<double, 2> x{st.x0, st.x1};
    std::array<double, 2> draw{};
    for (int a = 0; a < 2; ++a) {
      const double prec = infos[a] * q[a] + prior_prec;
      if (prec <= 0.0) {
        // Unsampled arm under a flat prior: the posterior draw dominates or
        // loses with equal probability.
        draw[a] = rng.bernoulli(0.5)
                      ? std::numeric_limits<double>::infinity()
                      : -std::numeric_limits<double>::infinity();
        continue;
      }
      const double mean = std::sqrt(infos[a]) * x[a] / prec;
      draw[a] = mean + rng.normal() / std::sqrt(prec);
    }
    if (draw[1] == draw[0]) return rng.bernoulli(0.5) ? 1.0 : 0.0;
    return draw[1] > draw[0] ? 1.0 : 0.0;
  };
}

LimitRule limit_ucb_rule() {
  return [](const LimitState& st, Rng& rng) -> double {
    const std::array<double, 2> q{st.q0, st.q1};
    const std::array<double, 2> x{st.x0, st.x1};
    const double bonus_t =
        st.t > 0.0 ? 2.0 * std::log(1.0 / st.t)
                   : std::numeric_limits<double>::infinity();
    std::array<double, 2> index{};
    for (int a = 0; a < 2; ++a)
      index[a] = q[a] > 0.0
                     ? x[a] / q[a] + std::sqrt(std::max(0.0, bonus_t / q[a]))
                     : std::numeric_limits<double>::infinity();
    if (index[1] == index[0]) return rng.bernoulli(0.5) ? 1.0 : 0.0;
    return index[1] > index[0] ? 1.0 : 0.0;
  };
}

}  // namespace adex
