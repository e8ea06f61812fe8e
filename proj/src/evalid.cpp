#include "adex/evalid.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "adex/mc.hpp"

namespace adex {

void WeightGrid::validate() const {
  if (points.empty() ||
      static_cast<Eigen::Index>(points.size()) != weights.size())
    throw std::domain_error("WeightGrid: points/weights size mismatch");
  if ((weights < 0.0).any())
    throw std::domain_error("WeightGrid: weights must be nonnegative");
  if (std::abs(weights.sum() - 1.0) > 1e-10)
    throw std::domain_error("WeightGrid: weights must sum to 1");
}

void gauss_hermite(int points, Eigen::ArrayXd& nodes,
                   Eigen::ArrayXd& weights) {
  if (points < 1) throw std::domain_error("gauss_hermite: points must be >= 1");
  // Golub-Welsch: the Jacobi matrix for physicists' Hermite polynomials has
  // zero diagonal and off-diagonal sqrt(k/2).
  Eigen::MatrixXd jacobi = Eigen::MatrixXd::Zero(points, points);
  for (int k = 1; k < points; ++k) {
    const double b = std::sqrt(static_cast<double>(k) / 2.0);
    jacobi(k, k - 1) = b;
    jacobi(k - 1, k) = b;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(jacobi);
  nodes = es.eigenvalues().array();
  weights = std::sqrt(std::numbers::pi) *
            es.eigenvectors().row(0).transpose().array().square();
}

namespace {

WeightGrid gaussian_grid(const std::array<double, 2>& nu2, bool both,
                         int points) {
  Eigen::ArrayXd x, w;
  gauss_hermite(points, x, w);
  w /= std::sqrt(std::numbers::pi);  // E[f(H)] = sum w_i f(sqrt(2) nu x_i)
  WeightGrid grid;
  if (!both) {
    const double scale = std::sqrt(2.0 * nu2[1]);
    grid.weights = w;
    grid.points.reserve(static_cast<std::size_t>(points));
    for (int i = 0; i < points; ++i)
      grid.points.push_back({scale * x[i], 0.0});
  } else {
    const double s1 = std::sqrt(2.0 * nu2[1]);
    const double s0 = std::sqrt(2.0 * nu2[0]);
    grid.weights.resize(static_cast<Eigen::Index>(points) * points);
    grid.points.reserve(static_cast<std::size_t>(points) * points);
    Eigen::Index idx = 0;
    for (int i = 0; i < points; ++i)
      for (int j = 0; j < points; ++j) {
        grid.points.push_back({s1 * x[i], s0 * x[j]});
        grid.weights[idx++] = w[i] * w[j];
      }
  }
  grid.weights /= grid.weights.sum();  // remove residual quadrature error
  grid.validate();
  return grid;
}

double gaussian_mixture_factor(double z, double q, double info, double nu2) {
  if (!(nu2 > 0.0))
    throw std::domain_error("evalue: mixture variance must be > 0");
  const double denom = 1.0 + q * info * nu2;
  const double b = std::sqrt(info) * z;
  return std::exp(0.5 * nu2 * b * b / denom) / std::sqrt(denom);
}

double girsanov_exponent(double h, double z, double q, double info) {
  return h * std::sqrt(info) * z - 0.5 * q * info * h * h;
}

double two_point_factor(double k, double z, double q, double info) {
  return 0.5 * (std::exp(girsanov_exponent(k, z, q, info)) +
                std::exp(girsanov_exponent(-k, z, q, info)));
}

void check_state(double q1, double q0) {
  if (!(q1 >= 0.0 && q1 <= 1.0 && q0 >= 0.0 && q0 <= 1.0))
    throw std::domain_error("evalue: allocations outside [0,1]");
}

}  // namespace

WeightGrid gaussian_weight_grid_arm1(double nu2, int points) {
  return gaussian_grid({0.0, nu2}, false, points);
}

WeightGrid gaussian_weight_grid_both(double nu2_1, double nu2_0, int points) {
  return gaussian_grid({nu2_0, nu2_1}, true, points);
}

double evalue(const EProcessSpec& spec, double z1, double z0, double q1,
              double q0, std::array<double, 2> infos) {
  check_state(q1, q0);
  return std::visit(
      [&](const auto& s) -> double {
        using S = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<S, GaussianMixtureArm1>) {
          return gaussian_mixture_factor(z1, q1, infos[1], s.nu2);
        } else if constexpr (std::is_same_v<S, GaussianMixtureBoth>) {
          return gaussian_mixture_factor(z1, q1, infos[1], s.nu2_1) *
                 gaussian_mixture_factor(z0, q0, infos[0], s.nu2_0);
        } else if constexpr (std::is_same_v<S, TwoPoint>) {
          if (!(s.k > 0.0)) throw std::domain_error("TwoPoint: k must be > 0");
          return two_point_factor(s.k, z1, q1, infos[1]) *
                 two_point_factor(s.k, z0, q0, infos[0]);
        } else {  // WeightGrid: exact finite sum, log-sum-exp for stability
          s.validate();
          const std::size_t m = s.points.size();
          double max_e = -std::numeric_limits<double>::infinity();
          std::vector<double> expo(m);
          for (std::size_t i = 0; i < m; ++i) {
            expo[i] = girsanov_exponent(s.points[i].h1, z1, q1, infos[1]) +
                      girsanov_exponent(s.points[i].h0, z0, q0, infos[0]);
            max_e = std::max(max_e, expo[i]);
          }
          double sum = 0.0;
          for (std::size_t i = 0; i < m; ++i)
            sum += s.weights[static_cast<Eigen::Index>(i)] *
                   std::exp(expo[i] - max_e);
          return sum * std::exp(max_e);
        }
      },
      spec);
}

double evalue_from_trajectory(const EProcessSpec& spec, const Trajectory& traj,
                              const ArmModels& models, double t) {
  if (!(t >= 0.0 && t <= 1.0))
    throw std::domain_error("evalue_from_trajectory: t outside [0,1]");
  const auto alloc = allocation_path(traj);
  const auto score = score_path(traj, models);
  const double q1 = alloc.q(1, t);
  const double q0 = alloc.q(0, t);
  return evalue(spec, score.x_at(1, alloc, t), score.x_at(0, alloc, t), q1, q0,
                score.info);
}

double p_process(double evalue) {
  if (evalue < 0.0) throw std::domain_error("p_process: e-value < 0");
  if (evalue <= 1.0) return 1.0;  // covers e = 0
  return 1.0 / evalue;
}

// --- Replay machinery ----------------------------------------------------------

namespace {

// Runs one trajectory and exposes the e-process state (z_a(q_a(j/n)), q_a)
// after every round via incremental score sums.
class EvalueTrace {
 public:
  EvalueTrace(const EProcessSpec& spec, const ArmModels& models,
              const PolicyKind& kind, long n, const LocalParam& h,
              std::array<std::optional<double>, 2> theta_override,
              ExperimentStreams& streams)
      : spec_(spec), infos_(fisher_infos(models)), n_(n) {
    RunOptions opts;
    opts.theta_override = theta_override;
    traj_ = run_experiment(models, h, kind, n, streams, opts);
    const double root_n = std::sqrt(static_cast<double>(n));
    scale_ = {1.0 / (std::sqrt(infos_[0]) * root_n),
              1.0 / (std::sqrt(infos_[1]) * root_n)};
    score_sums_ = {0.0, 0.0};
    pulls_ = {0, 0};
    models_ = models;
  }

  // Advances through round j (1-based); call with j = 1..n in order.
  void step(long j) {
    const int arm = traj_.assignments[static_cast<std::size_t>(j - 1)];
    const double y = traj_.outcomes[static_cast<std::size_t>(j - 1)];
    score_sums_[arm] += score(models_[arm], y);
    ++pulls_[arm];
  }

  double evalue_now() const {
    const double q1 =
        static_cast<double>(pulls_[1]) / static_cast<double>(n_);
    const double q0 =
        static_cast<double>(pulls_[0]) / static_cast<double>(n_);
    return evalue(spec_, scale_[1] * score_sums_[1],
                  scale_[0] * score_sums_[0], q1, q0, infos_);
  }

  const Trajectory& trajectory() const { return traj_; }
  std::array<double, 2> q_now() const {
    return {static_cast<double>(pulls_[0]) / static_cast<double>(n_),
            static_cast<double>(pulls_[1]) / static_cast<double>(n_)};
  }

 private:
  EProcessSpec spec_;
  ArmModels models_;
  std::array<double, 2> infos_;
  long n_;
  Trajectory traj_;
  std::array<double, 2> scale_;
  std::array<double, 2> score_sums_;
  std::array<long, 2> pulls_;
};

std::vector<long> grid_to_rounds(const std::vector<double>& t_grid, long n) {
  std::vector<long> rounds;
  rounds.reserve(t_grid.size());
  for (double t : t_grid) {
    if (!(t >= 0.0 && t <= 1.0))
      throw std::domain_error("time grid entry outside [0,1]");
    rounds.push_back(static_cast<long>(
        std::floor(static_cast<double>(n) * t)));
  }
  return rounds;
}

// Evaluates g(trace state) at each grid round for each replication;
// returns one vector of per-replication values per grid point.
template <typename StateFn>
std::vector<std::vector<double>> per_time_samples(
    const EProcessSpec& spec, const ArmModels& models, const PolicyKind& kind,
    long n, const LocalParam& h,
    std::array<std::optional<double>, 2> theta_override,
    const std::vector<double>& t_grid, long reps, const StreamFactory& streams,
    int threads, StateFn&& g) {
  const auto rounds = grid_to_rounds(t_grid, n);
  std::vector<std::vector<double>> samples(
      t_grid.size(), std::vector<double>(static_cast<std::size_t>(reps)));
  parallel_for(reps, threads, [&](long rep) {
    auto exp_streams =
        ExperimentStreams::make(streams, static_cast<std::uint64_t>(rep));
    EvalueTrace trace(spec, models, kind, n, h, theta_override, exp_streams);
    long j = 0;
    // rounds must be visited in nondecreasing order
    std::vector<std::size_t> order(rounds.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return rounds[a] < rounds[b]; });
    for (std::size_t oi : order) {
      while (j < rounds[oi]) trace.step(++j);
      samples[oi][static_cast<std::size_t>(rep)] = g(trace);
    }
  });
  return samples;
}

}  // namespace

std::vector<McEstimate> evalue_means(
    const EProcessSpec& spec, const ArmModels& models, const PolicyKind& kind,
    long n, const LocalParam& h, const std::vector<double>& t_grid, long reps,
    const StreamFactory& streams, int threads,
    std::array<std::optional<double>, 2> theta_override) {
  const auto samples = per_time_samples(
      spec, models, kind, n, h, theta_override, t_grid, reps, streams, threads,
      [](const EvalueTrace& tr) { return tr.evalue_now(); });
  std::vector<McEstimate> out;
  out.reserve(samples.size());
  for (const auto& s : samples) out.push_back(mc_estimate(s));
  return out;
}

SizeSweep anytime_size(const EProcessSpec& spec, const ArmModels& models,
                       const PolicyKind& kind, long n,
                       const std::vector<double>& theta0_arm0_grid,
                       double alpha, long reps, const StreamFactory& streams,
                       int threads) {
  if (!(alpha > 0.0 && alpha < 1.0))
    throw std::domain_error("anytime_size: alpha outside (0,1)");
  SizeSweep sweep;
  sweep.threshold = 1.0 / alpha;
  sweep.theta0_arm0 = theta0_arm0_grid;
  for (std::size_t cfg = 0; cfg < theta0_arm0_grid.size(); ++cfg) {
    const auto sub = streams.sub(cfg);
    const auto exceed = parallel_map<double>(reps, threads, [&](long rep) {
      auto exp_streams =
          ExperimentStreams::make(sub, static_cast<std::uint64_t>(rep));
      EvalueTrace trace(spec, models, kind, n, {0.0, 0.0},
                        {theta0_arm0_grid[cfg], std::nullopt}, exp_streams);
      double running_max = trace.evalue_now();  // t = 0
      for (long j = 1; j <= n; ++j) {
        trace.step(j);
        running_max = std::max(running_max, trace.evalue_now());
      }
      return running_max >= sweep.threshold ? 1.0 : 0.0;
    });
    sweep.exceed_prob.push_back(mc_estimate(exceed));
    if (cfg == 0 || sweep.exceed_prob.back().mean > sweep.sup.mean)
      sweep.sup = sweep.exceed_prob.back();
  }
  return sweep;
}

std::vector<McEstimate> gro_curve(const EProcessSpec& spec,
                                  const ArmModels& models,
                                  const LocalParam& h, const PolicyKind& kind,
                                  long n, const std::vector<double>& t_grid,
                                  long reps, const StreamFactory& streams,
                                  int threads) {
  const auto samples = per_time_samples(
      spec, models, kind, n, h, {}, t_grid, reps, streams, threads,
      [](const EvalueTrace& tr) { return std::log(tr.evalue_now()); });
  std::vector<McEstimate> out;
  out.reserve(samples.size());
  for (const auto& s : samples) out.push_back(mc_estimate(s));
  return out;
}

McEstimate gro_score(const EProcessSpec& spec, const ArmModels& models,
                     const LocalParam& h, const PolicyKind& kind, long n,
                     double t, long reps, const StreamFactory& streams,
                     int threads) {
  return gro_curve(spec, models, h, kind, n, {t}, reps, streams, threads)[0];
}

McEstimate mgro_score(const EProcessSpec& spec, const ArmModels& models,
                      const HPrior& weight, const PolicyKind& kind, long n,
                      double t, long reps, const StreamFactory& streams,
                      int threads) {
  const long round = grid_to_rounds({t}, n)[0];
  const auto values = parallel_map<double>(reps, threads, [&](long rep) {
    Rng prior_rng = streams.make(static_cast<std::uint64_t>(rep), kLanePrior);
    const LocalParam h = sample_h(weight, prior_rng);
    auto exp_streams =
        ExperimentStreams::make(streams, static_cast<std::uint64_t>(rep));
    EvalueTrace trace(spec, models, kind, n, h, {}, exp_streams);
    for (long j = 1; j <= round; ++j) trace.step(j);
    return std::log(trace.evalue_now());
  });
  return mc_estimate(values);
}

namespace {

double bernoulli_kl(double p, double q) {
  auto term = [](double a, double b) {
    return a == 0.0 ? 0.0 : a * std::log(a / b);
  };
  return term(p, q) + term(1.0 - p, 1.0 - q);
}

double family_kl(const ArmModel& model, double theta) {
  switch (model.family) {
    case Family::Bernoulli:
      return bernoulli_kl(theta, model.theta0);
    case Family::Gaussian: {
      const double d = theta - model.theta0;
      return 0.5 * d * d;
    }
  }
  throw std::logic_error("family_kl: unknown family");
}

}  // namespace

double kl_null(const ArmModels& models, const LocalParam& h,
               std::array<double, 2> mean_q, long n) {
  if (models[0].theta0 != models[1].theta0)
    throw std::invalid_argument("kl_null: arms must share theta0");
  double total = 0.0;
  for (int a = 0; a < 2; ++a) {
    if (h[a] == 0.0) continue;
    const double theta = local_theta(models[a], h[a], n);
    total += static_cast<double>(n) * mean_q[a] * family_kl(models[a], theta);
  }
  return total;
}

double kl_null_limit(std::array<double, 2> infos, const LocalParam& h,
                     std::array<double, 2> mean_q) {
  return mean_q[1] * 0.5 * infos[1] * h.h1 * h.h1 +
         mean_q[0] * 0.5 * infos[0] * h.h0 * h.h0;
}

RegrowResult regrow_score(const EProcessSpec& spec, const ArmModels& models,
                          const std::vector<LocalParam>& h1_grid,
                          const PolicyKind& kind, long n, double t, long reps,
                          const StreamFactory& streams, int threads) {
  if (h1_grid.empty())
    throw std::invalid_argument("regrow_score: empty alternative grid");
  const auto infos = fisher_infos(models);
  const long round = grid_to_rounds({t}, n)[0];
  RegrowResult result;
  result.per_h.reserve(h1_grid.size());
  for (std::size_t i = 0; i < h1_grid.size(); ++i) {
    const LocalParam& h = h1_grid[i];
    const auto sub = streams.sub(i);
    const auto values = parallel_map<double>(reps, threads, [&](long rep) {
      auto exp_streams =
          ExperimentStreams::make(sub, static_cast<std::uint64_t>(rep));
      EvalueTrace trace(spec, models, kind, n, h, {}, exp_streams);
      for (long j = 1; j <= round; ++j) trace.step(j);
      const auto q = trace.q_now();  // {q0, q1}
      return std::log(trace.evalue_now()) -
             kl_null_limit(infos, h, q);
    });
    result.per_h.push_back(mc_estimate(values));
    if (i == 0 || result.per_h.back().mean < result.score.mean) {
      result.score = result.per_h.back();
      result.argmin = h;
    }
  }
  return result;
}

// --- Blahut-Arimoto --------------------------------------------------------------

void ChannelSpec::validate() const {
  if (!(q >= 0.0)) throw std::domain_error("ChannelSpec: q must be >= 0");
  if (!(info > 0.0)) throw std::domain_error("ChannelSpec: info must be > 0");
  if (input_grid.size() < 1)
    throw std::domain_error("ChannelSpec: empty input grid");
  for (Eigen::Index i = 0; i < input_grid.size(); ++i) {
    const double mirror = -input_grid[input_grid.size() - 1 - i];
    if (std::abs(input_grid[i] - mirror) > 1e-9)
      throw std::domain_error("ChannelSpec: input grid must be symmetric");
  }
}

ChannelSpec ChannelSpec::symmetric(double k, double q, double info,
                                   int points) {
  if (k < 0.0) throw std::domain_error("ChannelSpec: K must be >= 0");
  ChannelSpec ch;
  ch.q = q;
  ch.info = info;
  if (k == 0.0 || points <= 1) {
    ch.input_grid = Eigen::ArrayXd::Zero(1);
  } else {
    ch.input_grid = Eigen::ArrayXd::LinSpaced(points, -k, k);
  }
  ch.validate();
  return ch;
}

BaResult blahut_arimoto(const ChannelSpec& channel, double tol, int max_iter) {
  channel.validate();
  const Eigen::Index m = channel.input_grid.size();
  BaResult result;
  if (m == 1 || channel.q == 0.0) {
    // Single input or zero attention: the channel carries no information.
    result.capacity = 0.0;
    result.weights = Eigen::ArrayXd::Constant(m, 1.0 / static_cast<double>(m));
    result.lower_bounds = {0.0};
    result.iterations = 0;
    return result;
  }

  // Output grid covering +-6 standard deviations of z(q) ~ N(I^(1/2) q h, q)
  // for every grid h.
  constexpr int kOutputPoints = 2001;
  const double sd = std::sqrt(channel.q);
  const double mean_span =
      std::sqrt(channel.info) * channel.q *
      channel.input_grid.abs().maxCoeff();
  const Eigen::ArrayXd out_grid = Eigen::ArrayXd::LinSpaced(
      kOutputPoints, -(mean_span + 6.0 * sd), mean_span + 6.0 * sd);

  // Row-stochastic transition matrix W(y | h_i) on the discretized output.
  Eigen::MatrixXd w_mat(m, kOutputPoints);
  for (Eigen::Index i = 0; i < m; ++i) {
    const double mu = std::sqrt(channel.info) * channel.q *
                      channel.input_grid[i];
    Eigen::ArrayXd row =
        (-0.5 * ((out_grid - mu) / sd).square()).exp();
    w_mat.row(i) = (row / row.sum()).matrix().transpose();
  }
  // ln W with 0 ln 0 = 0 handled via a floor on probabilities.
  const Eigen::MatrixXd log_w =
      w_mat.array().max(1e-300).log().matrix();

  Eigen::VectorXd weights =
      Eigen::VectorXd::Constant(m, 1.0 / static_cast<double>(m));
  Eigen::VectorXd divergence(m);

  for (int iter = 1; iter <= max_iter; ++iter) {
    const Eigen::VectorXd mixture = w_mat.transpose() * weights;
    const Eigen::ArrayXd log_mix = mixture.array().max(1e-300).log();
    for (Eigen::Index i = 0; i < m; ++i)
      divergence[i] =
          (w_mat.row(i).array() *
           (log_w.row(i).array() - log_mix.transpose()))
              .sum();
    const double lower = weights.dot(divergence);  // I(w; W)
    const double upper = divergence.maxCoeff();
    result.lower_bounds.push_back(lower);
    result.iterations = iter;
    if (upper - lower < tol) {
      result.capacity = lower;
      result.weights = weights.array();
      return result;
    }
    // w_i <- w_i exp(D_i), normalized; subtract the max exponent first.
    const Eigen::ArrayXd scaled =
        weights.array() * (divergence.array() - upper).exp();
    weights = (scaled / scaled.sum()).matrix();
  }
  throw std::runtime_error(
      "blahut_arimoto: no convergence after " + std::to_string(max_iter) +
      " iterations; last capacity gap " +
      std::to_string(result.lower_bounds.empty()
                         ? 0.0
                         : divergence.maxCoeff() -
                               result.lower_bounds.back()));
}

EProcessSpec two_point_eprocess_from_ba(std::array<double, 2> q,
                                        std::array<double, 2> infos,
                                        double k) {
  if (!(k > 0.0))
    throw std::domain_error(
        "two_point_eprocess_from_ba: K must be > 0 (degenerate alternative)");
  constexpr int kInputPoints = 41;
  constexpr double kInteriorTol = 1e-3;
  for (int a = 0; a < 2; ++a) {
    const auto ba = blahut_arimoto(
        ChannelSpec::symmetric(k, q[a], infos[a], kInputPoints));
    const Eigen::Index m = ba.weights.size();
    const double interior = ba.weights.segment(1, m - 2).sum();
    if (interior >= kInteriorTol)
      throw std::runtime_error(
          "two_point_eprocess_from_ba: least-favorable prior for arm " +
          std::to_string(a) + " has interior mass " +
          std::to_string(interior) +
          "; outside the two-point regime, use a WeightGrid built from "
          "blahut_arimoto output");
  }
  return TwoPoint{k};
}

}  // namespace adex
