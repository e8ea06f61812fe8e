#include "adex/inference.hpp"

#include <cmath>
#include <stdexcept>

#include "adex/mc.hpp"

namespace adex {

void GaussianPrior::validate() const {
  if (!(nu2 > 0.0))  // +infinity passes: flat prior
    throw std::domain_error("GaussianPrior: nu2 must be > 0 (or +inf)");
  if (!std::isfinite(mu0))
    throw std::domain_error("GaussianPrior: mu0 must be finite");
}

PosteriorNormal posterior(double x, double q, double info,
                          const GaussianPrior& prior) {
  prior.validate();
  if (!(q >= 0.0 && q <= 1.0))
    throw std::domain_error("posterior: q outside [0,1]");
  if (!(info > 0.0)) throw std::domain_error("posterior: info must be > 0");
  if (prior.flat() && q == 0.0)
    throw std::domain_error(
        "posterior: flat prior with q = 0 carries no information");
  const double prior_prec = prior.flat() ? 0.0 : 1.0 / prior.nu2;
  const double prec = info * q + prior_prec;
  return {(std::sqrt(info) * x + prior_prec * prior.mu0) / prec, 1.0 / prec};
}

LocalParam bayes_estimate(std::array<double, 2> x, std::array<double, 2> q,
                          std::array<double, 2> infos,
                          const PriorPair& priors) {
  LocalParam est;
  est.h1 = posterior(x[1], q[1], infos[1], priors[1]).mean;
  est.h0 = posterior(x[0], q[0], infos[0], priors[0]).mean;
  return est;
}

std::array<double, 2> finite_sample_estimator(std::array<double, 2> x,
                                              std::array<double, 2> q,
                                              std::array<double, 2> infos,
                                              double theta0, long n,
                                              const PriorPair& priors) {
  if (n < 1)
    throw std::domain_error("finite_sample_estimator: n must be >= 1");
  const double root_n = std::sqrt(static_cast<double>(n));
  std::array<double, 2> out{};
  for (int a = 0; a < 2; ++a)
    out[a] = theta0 + posterior(x[a], q[a], infos[a], priors[a]).mean / root_n;
  return out;
}

TerminalStats terminal_stats(const Trajectory& traj, const ArmModels& models) {
  const auto score = score_path(traj, models);
  TerminalStats st;
  for (int a = 0; a < 2; ++a) {
    st.q[a] =
        static_cast<double>(traj.pulls[a]) / static_cast<double>(traj.n);
    st.x[a] = score.z[a][static_cast<std::size_t>(traj.pulls[a])];
  }
  return st;
}

LocalParam sample_h(const HPrior& prior, Rng& rng) {
  return std::visit(
      [&](const auto& p) -> LocalParam {
        using P = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<P, PointMassPrior>) {
          return p.h;
        } else if constexpr (std::is_same_v<P, GaussianIidPrior>) {
          const double sd = std::sqrt(p.nu2);
          return {p.mu + sd * rng.normal(), p.mu + sd * rng.normal()};
        } else {  // TwoPointSymPrior
          const double sign = rng.bernoulli(0.5) ? 1.0 : -1.0;
          return {sign * p.h.h1, sign * p.h.h0};
        }
      },
      prior);
}

namespace {

// Squared-error loss on the arm-1 coordinate of sqrt(n)(T_n - theta(h)).
double arm1_loss(const std::array<double, 2>& estimate,
                 const std::array<double, 2>& theta, long n, Loss loss) {
  const double e =
      std::sqrt(static_cast<double>(n)) * (estimate[1] - theta[1]);
  switch (loss) {
    case Loss::Squared:
      return e * e;
  }
  throw std::logic_error("unknown loss");
}

std::array<double, 2> evaluate_estimator(const EstimatorSpec& spec,
                                         const TerminalStats& stats,
                                         const ArmModels& models,
                                         const std::array<double, 2>& theta,
                                         long n) {
  const auto infos = fisher_infos(models);
  const double theta0 = models[1].theta0;
  const double root_n = std::sqrt(static_cast<double>(n));
  switch (spec.kind) {
    case EstimatorSpec::Kind::TStar:
      return finite_sample_estimator(stats.x, stats.q, infos, theta0, n,
                                     spec.priors);
    case EstimatorSpec::Kind::Mle: {
      PriorPair flat{};  // default-constructed priors are flat
      return finite_sample_estimator(stats.x, stats.q, infos, theta0, n,
                                     flat);
    }
    case EstimatorSpec::Kind::PriorMean:
      return {theta0 + spec.priors[0].mu0 / root_n,
              theta0 + spec.priors[1].mu0 / root_n};
    case EstimatorSpec::Kind::Oracle:
      return theta;
  }
  throw std::logic_error("unknown estimator kind");
}

// Shared risk loop; `draw_h` produces the replication's local parameter.
template <typename DrawH>
McEstimate risk_loop(const EstimatorSpec& spec, const ArmModels& models,
                     const PolicyKind& kind, long n, Loss loss, long reps,
                     const StreamFactory& streams, int threads,
                     DrawH&& draw_h) {
  if (reps < 2) throw std::domain_error("risk: reps must be >= 2");
  const auto losses = parallel_map<double>(reps, threads, [&](long rep) {
    Rng prior_rng = streams.make(static_cast<std::uint64_t>(rep), kLanePrior);
    const LocalParam h = draw_h(prior_rng);
    auto exp_streams =
        ExperimentStreams::make(streams, static_cast<std::uint64_t>(rep));
    const Trajectory traj = run_experiment(models, h, kind, n, exp_streams);
    const auto stats = terminal_stats(traj, models);
    const std::array<double, 2> theta{local_theta(models[0], h.h0, n),
                                      local_theta(models[1], h.h1, n)};
    return arm1_loss(evaluate_estimator(spec, stats, models, theta, n), theta,
                     n, loss);
  });
  return mc_estimate(losses);
}

bool local_param_valid(const ArmModels& models, const LocalParam& h, long n) {
  for (int a = 0; a < 2; ++a) {
    if (models[a].family != Family::Bernoulli) continue;
    const double theta =
        models[a].theta0 + h[a] / std::sqrt(static_cast<double>(n));
    if (!(theta > 0.0 && theta < 1.0)) return false;
  }
  return true;
}

void require_shared_theta0(const ArmModels& models, const char* where) {
  if (models[0].theta0 != models[1].theta0 ||
      models[0].family != models[1].family)
    throw std::invalid_argument(
        std::string(where) +
        ": arms must share the reference model (degenerate asymptotics "
        "otherwise)");
}

}  // namespace

McEstimate frequentist_risk(const EstimatorSpec& estimator,
                            const ArmModels& models, const LocalParam& h,
                            const PolicyKind& kind, long n, Loss loss,
                            long reps, const StreamFactory& streams,
                            int threads) {
  h.validate();
  return risk_loop(estimator, models, kind, n, loss, reps, streams, threads,
                   [&](Rng&) { return h; });
}

McEstimate bayes_risk(const EstimatorSpec& estimator, const ArmModels& models,
                      const HPrior& prior, const PolicyKind& kind, long n,
                      Loss loss, long reps, const StreamFactory& streams,
                      int threads) {
  return risk_loop(estimator, models, kind, n, loss, reps, streams, threads,
                   [&](Rng& rng) {
                     for (int attempt = 0; attempt < 1000; ++attempt) {
                       const LocalParam h = sample_h(prior, rng);
                       if (local_param_valid(models, h, n)) return h;
                     }
                     throw std::runtime_error(
                         "bayes_risk: prior mass almost entirely outside the "
                         "valid Bernoulli domain");
                   });
}

RiskCurve risk_curve(const EstimatorSpec& estimator, const ArmModels& models,
                     const std::vector<double>& h1_grid, double h0,
                     const PolicyKind& kind, long n, Loss loss, long reps,
                     const StreamFactory& streams, int threads) {
  RiskCurve curve;
  curve.h1_grid = h1_grid;
  curve.risk.reserve(h1_grid.size());
  for (std::size_t i = 0; i < h1_grid.size(); ++i) {
    curve.risk.push_back(frequentist_risk(
        estimator, models, {h1_grid[i], h0}, kind, n, loss, reps,
        streams.sub(static_cast<std::uint64_t>(i)), threads));
  }
  return curve;
}

McEstimate in_sample_regret(const ArmModels& models, const LocalParam& h,
                            const PolicyKind& kind, long n, long reps,
                            const StreamFactory& streams, int threads) {
  require_shared_theta0(models, "in_sample_regret");
  h.validate();
  const double best = std::max(h.h1, h.h0);
  const auto regrets = parallel_map<double>(reps, threads, [&](long rep) {
    auto exp_streams =
        ExperimentStreams::make(streams, static_cast<std::uint64_t>(rep));
    const Trajectory traj = run_experiment(models, h, kind, n, exp_streams);
    const double q1 = static_cast<double>(traj.pulls[1]) /
                      static_cast<double>(traj.n);
    return best - h.h1 * q1 - h.h0 * (1.0 - q1);
  });
  return mc_estimate(regrets);
}

OosRegretEstimate out_of_sample_regret(const ArmModels& models,
                                       const LocalParam& h,
                                       const PolicyKind& kind, long n,
                                       TerminalDecision decision, long reps,
                                       const StreamFactory& streams,
                                       int threads) {
  require_shared_theta0(models, "out_of_sample_regret");
  h.validate();
  const double best = std::max(h.h1, h.h0);
  std::vector<std::int8_t> fallback(static_cast<std::size_t>(reps), 0);
  const auto regrets = parallel_map<double>(reps, threads, [&](long rep) {
    auto exp_streams =
        ExperimentStreams::make(streams, static_cast<std::uint64_t>(rep));
    const Trajectory traj = run_experiment(models, h, kind, n, exp_streams);
    int pick = 1;
    if (decision == TerminalDecision::EmpiricalBestArm) {
      const auto stats = terminal_stats(traj, models);
      if (stats.q[0] == 0.0 || stats.q[1] == 0.0) {
        fallback[static_cast<std::size_t>(rep)] = 1;  // prior tie-break
        pick = 1;
      } else {
        const auto infos = fisher_infos(models);
        const double m1 = stats.x[1] / (std::sqrt(infos[1]) * stats.q[1]);
        const double m0 = stats.x[0] / (std::sqrt(infos[0]) * stats.q[0]);
        pick = m1 >= m0 ? 1 : 0;
      }
    }
    return best - (pick == 1 ? h.h1 : h.h0);
  });
  OosRegretEstimate out;
  out.estimate = mc_estimate(regrets);
  for (auto f : fallback) out.fallback_ties += f;
  return out;
}

}  // namespace adex
