#include "adex/runner.hpp"

#include <chrono>
#include <cmath>
#include <fstream>

#include <nlohmann/json.hpp>

#include "adex/csv.hpp"
#include "adex/diffusion.hpp"
#include "adex/evalid.hpp"
#include "adex/experiment.hpp"
#include "adex/inference.hpp"
#include "adex/mc.hpp"
#include "adex/stats.hpp"

namespace adex {

const std::vector<std::string> kSubcommands = {
    "alloc-dist",   "risk-curve", "bayes-risk", "regret",     "limit-sim",
    "evalue-trace", "evalue-size", "gro-curve",  "ba-capacity"};

namespace {

namespace fs = std::filesystem;

std::uint64_t subcommand_id(const std::string& name) {
  for (std::size_t i = 0; i < kSubcommands.size(); ++i)
    if (kSubcommands[i] == name) return i + 1;
  throw std::invalid_argument("unknown subcommand '" + name + "'");
}

// Tracks committed outputs so a failing run removes everything it wrote.
class OutputSet {
 public:
  explicit OutputSet(fs::path dir) : dir_(std::move(dir)) {
    fs::create_directories(dir_);
  }
  fs::path path(const std::string& name) {
    files_.push_back(dir_ / name);
    return files_.back();
  }
  void discard_all() {
    for (const auto& f : files_) {
      std::error_code ec;
      fs::remove(f, ec);
    }
  }

 private:
  fs::path dir_;
  std::vector<fs::path> files_;
};

EstimatorSpec estimator_from(const RunConfig& cfg) {
  EstimatorSpec spec;
  GaussianPrior prior{cfg.mu0, cfg.nu2};
  spec.priors = {prior, prior};
  if (cfg.estimator == "mle") spec.kind = EstimatorSpec::Kind::Mle;
  else if (cfg.estimator == "prior_mean")
    spec.kind = EstimatorSpec::Kind::PriorMean;
  else spec.kind = EstimatorSpec::Kind::TStar;
  return spec;
}

EProcessSpec eprocess_from(const RunConfig& cfg) {
  if (cfg.eprocess == "gm1") return GaussianMixtureArm1{cfg.ep_nu2};
  if (cfg.eprocess == "gmboth")
    return GaussianMixtureBoth{cfg.ep_nu2, cfg.ep_nu2_0};
  return TwoPoint{cfg.ep_k};
}

std::vector<double> h1_grid_from(const RunConfig& cfg) {
  std::vector<double> grid;
  grid.reserve(static_cast<std::size_t>(cfg.h_count));
  if (cfg.h_count == 1) {
    grid.push_back(cfg.h_min);
    return grid;
  }
  for (long i = 0; i < cfg.h_count; ++i)
    grid.push_back(cfg.h_min + (cfg.h_max - cfg.h_min) *
                                   static_cast<double>(i) /
                                   static_cast<double>(cfg.h_count - 1));
  return grid;
}

// --- subcommands ---------------------------------------------------------------

void run_alloc_dist(const RunConfig& cfg, OutputSet& out,
                    const StreamFactory& streams, int threads) {
  const auto models = cfg.models();
  const auto kind = cfg.policy_kind();
  const LocalParam h{cfg.h1, cfg.h0};
  for (std::size_t ni = 0; ni < cfg.n.size(); ++ni) {
    const long n = cfg.n[ni];
    const auto sub = streams.sub(ni);
    // q1 samples per (rep, t)
    std::vector<std::vector<double>> q1(
        static_cast<std::size_t>(cfg.reps),
        std::vector<double>(cfg.t_grid.size()));
    parallel_for(cfg.reps, threads, [&](long rep) {
      auto exp_streams =
          ExperimentStreams::make(sub, static_cast<std::uint64_t>(rep));
      const Trajectory traj = run_experiment(models, h, kind, n, exp_streams);
      const auto alloc = allocation_path(traj);
      for (std::size_t ti = 0; ti < cfg.t_grid.size(); ++ti)
        q1[static_cast<std::size_t>(rep)][ti] = alloc.q(1, cfg.t_grid[ti]);
    });
    CsvWriter csv(out.path("alloc_dist_n" + std::to_string(n) + ".csv"),
                  {"rep", "t", "q1"});
    for (long rep = 0; rep < cfg.reps; ++rep)
      for (std::size_t ti = 0; ti < cfg.t_grid.size(); ++ti) {
        csv.cell(rep);
        csv.cell(cfg.t_grid[ti]);
        csv.cell(q1[static_cast<std::size_t>(rep)][ti]);
        csv.end_row();
      }
    csv.commit();
  }
}

void run_risk_curve(const RunConfig& cfg, OutputSet& out,
                    const StreamFactory& streams, int threads) {
  const auto models = cfg.models();
  const auto kind = cfg.policy_kind();
  const auto estimator = estimator_from(cfg);
  const auto grid = h1_grid_from(cfg);
  CsvWriter csv(out.path("risk_curve.csv"),
                {"h1", "risk_mean", "risk_se", "n", "policy", "estimator"});
  for (std::size_t ni = 0; ni < cfg.n.size(); ++ni) {
    const auto curve =
        risk_curve(estimator, models, grid, cfg.h0, kind, cfg.n[ni],
                   Loss::Squared, cfg.reps, streams.sub(ni), threads);
    for (std::size_t i = 0; i < grid.size(); ++i) {
      csv.cell(curve.h1_grid[i]);
      csv.cell(curve.risk[i].mean);
      csv.cell(curve.risk[i].std_error);
      csv.cell(cfg.n[ni]);
      csv.cell(cfg.policy);
      csv.cell(cfg.estimator);
      csv.end_row();
    }
  }
  csv.commit();
}

void run_bayes_risk(const RunConfig& cfg, OutputSet& out,
                    const StreamFactory& streams, int threads) {
  if (std::isinf(cfg.nu2))
    throw ConfigError(
        "config error: prior.nu2: bayes-risk needs a proper (finite) prior");
  const auto models = cfg.models();
  const auto kind = cfg.policy_kind();
  const auto estimator = estimator_from(cfg);
  const HPrior prior = GaussianIidPrior{cfg.mu0, cfg.nu2};
  CsvWriter csv(out.path("bayes_risk.csv"),
                {"n", "policy", "estimator", "risk_mean", "risk_se", "reps"});
  for (std::size_t ni = 0; ni < cfg.n.size(); ++ni) {
    const auto est = bayes_risk(estimator, models, prior, kind, cfg.n[ni],
                                Loss::Squared, cfg.reps, streams.sub(ni),
                                threads);
    csv.cell(cfg.n[ni]);
    csv.cell(cfg.policy);
    csv.cell(cfg.estimator);
    csv.cell(est.mean);
    csv.cell(est.std_error);
    csv.cell(est.reps);
    csv.end_row();
  }
  csv.commit();
}

void run_regret(const RunConfig& cfg, OutputSet& out,
                const StreamFactory& streams, int threads) {
  const auto models = cfg.models();
  const auto kind = cfg.policy_kind();
  const LocalParam h{cfg.h1, cfg.h0};
  CsvWriter csv(out.path("regret.csv"),
                {"kind", "n", "policy", "h1", "h0", "regret_mean",
                 "regret_se", "reps", "fallback_ties"});
  for (std::size_t ni = 0; ni < cfg.n.size(); ++ni) {
    McEstimate est;
    long fallback = 0;
    if (cfg.regret == "in") {
      est = in_sample_regret(models, h, kind, cfg.n[ni], cfg.reps,
                             streams.sub(ni), threads);
    } else {
      const auto oos = out_of_sample_regret(
          models, h, kind, cfg.n[ni], TerminalDecision::EmpiricalBestArm,
          cfg.reps, streams.sub(ni), threads);
      est = oos.estimate;
      fallback = oos.fallback_ties;
    }
    csv.cell(cfg.regret);
    csv.cell(cfg.n[ni]);
    csv.cell(cfg.policy);
    csv.cell(cfg.h1);
    csv.cell(cfg.h0);
    csv.cell(est.mean);
    csv.cell(est.std_error);
    csv.cell(est.reps);
    csv.cell(fallback);
    csv.end_row();
  }
  csv.commit();
}

void run_limit_sim(const RunConfig& cfg, OutputSet& out,
                   const StreamFactory& streams, int threads) {
  const auto models = cfg.models();
  const auto infos = fisher_infos(models);
  const LocalParam h{cfg.h1, cfg.h0};
  const auto grid = LimitGrid::with_steps(cfg.limit_steps);
  LimitRule rule;
  if (cfg.limit_rule == "fixed") rule = constant_rule(cfg.limit_pi1);
  else if (cfg.limit_rule == "ucb") rule = limit_ucb_rule();
  else rule = limit_thompson_rule(infos, cfg.limit_nu2);

  std::vector<LimitPath> paths(static_cast<std::size_t>(cfg.reps));
  parallel_for(cfg.reps, threads, [&](long rep) {
    Rng rng = streams.make(static_cast<std::uint64_t>(rep), kLaneSignal1);
    auto signals = make_signal_paths(h, infos);
    paths[static_cast<std::size_t>(rep)] =
        run_limit_experiment(rule, signals, grid, rng);
  });

  CsvWriter csv(out.path("limit_paths.csv"),
                {"rep", "t", "q1", "q0", "x1", "x0"});
  for (long rep = 0; rep < cfg.reps; ++rep) {
    const auto& p = paths[static_cast<std::size_t>(rep)];
    for (Eigen::Index k = 0; k < p.t.size(); ++k) {
      csv.cell(rep);
      csv.cell(p.t[k]);
      csv.cell(p.q1[k]);
      csv.cell(p.q0[k]);
      csv.cell(p.x1[k]);
      csv.cell(p.x0[k]);
      csv.end_row();
    }
  }
  csv.commit();
}

void run_evalue_trace(const RunConfig& cfg, OutputSet& out,
                      const StreamFactory& streams, int threads) {
  (void)threads;  // single trajectory
  const auto models = cfg.models();
  const auto kind = cfg.policy_kind();
  const auto spec = eprocess_from(cfg);
  const LocalParam h{cfg.h1, cfg.h0};
  const long n = cfg.n.front();

  auto exp_streams = ExperimentStreams::make(streams, 0);
  const Trajectory traj = run_experiment(models, h, kind, n, exp_streams);
  const auto alloc = allocation_path(traj);
  const auto score = score_path(traj, models);

  CsvWriter csv(out.path("evalue_trace.csv"),
                {"t", "q1", "evalue", "p_value"});
  std::array<long, 2> pulls{0, 0};
  for (long j = 0; j <= n; ++j) {
    if (j > 0) ++pulls[traj.assignments[static_cast<std::size_t>(j - 1)]];
    const double t = static_cast<double>(j) / static_cast<double>(n);
    const double q1 =
        static_cast<double>(pulls[1]) / static_cast<double>(n);
    const double q0 =
        static_cast<double>(pulls[0]) / static_cast<double>(n);
    const double e =
        evalue(spec, score.z[1][static_cast<std::size_t>(pulls[1])],
               score.z[0][static_cast<std::size_t>(pulls[0])], q1, q0,
               score.info);
    csv.cell(t);
    csv.cell(q1);
    csv.cell(e);
    csv.cell(p_process(e));
    csv.end_row();
  }
  csv.commit();
}

void run_evalue_size(const RunConfig& cfg, OutputSet& out,
                     const StreamFactory& streams, int threads) {
  const auto models = cfg.models();
  const auto kind = cfg.policy_kind();
  const auto spec = eprocess_from(cfg);
  const long n = cfg.n.front();
  const auto sweep = anytime_size(spec, models, kind, n, cfg.theta0_arm0,
                                  cfg.alpha, cfg.reps, streams, threads);
  CsvWriter csv(out.path("evalue_size.csv"),
                {"policy", "theta0_arm0", "threshold", "exceed_prob",
                 "exceed_se", "reps"});
  for (std::size_t i = 0; i < sweep.theta0_arm0.size(); ++i) {
    csv.cell(cfg.policy);
    csv.cell(sweep.theta0_arm0[i]);
    csv.cell(sweep.threshold);
    csv.cell(sweep.exceed_prob[i].mean);
    csv.cell(sweep.exceed_prob[i].std_error);
    csv.cell(sweep.exceed_prob[i].reps);
    csv.end_row();
  }
  csv.commit();
}

void run_gro_curve(const RunConfig& cfg, OutputSet& out,
                   const StreamFactory& streams, int threads) {
  const auto models = cfg.models();
  const auto kind = cfg.policy_kind();
  const auto spec = eprocess_from(cfg);
  const LocalParam h{cfg.h1, cfg.h0};
  CsvWriter csv(out.path("gro_curve.csv"),
                {"t", "gro_mean", "gro_se", "n", "policy"});
  for (std::size_t ni = 0; ni < cfg.n.size(); ++ni) {
    const auto curve = gro_curve(spec, models, h, kind, cfg.n[ni], cfg.t_grid,
                                 cfg.reps, streams.sub(ni), threads);
    for (std::size_t ti = 0; ti < cfg.t_grid.size(); ++ti) {
      csv.cell(cfg.t_grid[ti]);
      csv.cell(curve[ti].mean);
      csv.cell(curve[ti].std_error);
      csv.cell(cfg.n[ni]);
      csv.cell(cfg.policy);
      csv.end_row();
    }
  }
  csv.commit();
}

void run_ba_capacity(const RunConfig& cfg, OutputSet& out,
                     const StreamFactory& streams, int threads) {
  (void)streams;
  (void)threads;  // deterministic fixed point
  const auto channel = ChannelSpec::symmetric(
      cfg.ba_k, cfg.ba_q, cfg.ba_info, static_cast<int>(cfg.ba_input_points));
  const auto result = blahut_arimoto(channel, cfg.ba_tol,
                                     static_cast<int>(cfg.ba_max_iter));
  CsvWriter csv(out.path("ba_capacity.csv"), {"h", "weight"},
                "# capacity_nats=" + fmt_double(result.capacity) +
                    " iterations=" + std::to_string(result.iterations));
  for (Eigen::Index i = 0; i < channel.input_grid.size(); ++i) {
    csv.cell(channel.input_grid[i]);
    csv.cell(result.weights[i]);
    csv.end_row();
  }
  csv.commit();
}

}  // namespace

void run_subcommand(const std::string& subcommand, const RunConfig& cfg,
                    const std::filesystem::path& out_dir, int threads) {
  const auto start = std::chrono::steady_clock::now();
  const std::uint64_t purpose = subcommand_id(subcommand);
  const StreamFactory streams(cfg.seed, purpose);
  OutputSet out(out_dir);
  try {
    if (subcommand == "alloc-dist") run_alloc_dist(cfg, out, streams, threads);
    else if (subcommand == "risk-curve")
      run_risk_curve(cfg, out, streams, threads);
    else if (subcommand == "bayes-risk")
      run_bayes_risk(cfg, out, streams, threads);
    else if (subcommand == "regret") run_regret(cfg, out, streams, threads);
    else if (subcommand == "limit-sim")
      run_limit_sim(cfg, out, streams, threads);
    else if (subcommand == "evalue-trace")
      run_evalue_trace(cfg, out, streams, threads);
    else if (subcommand == "evalue-size")
      run_evalue_size(cfg, out, streams, threads);
    else if (subcommand == "gro-curve")
      run_gro_curve(cfg, out, streams, threads);
    else if (subcommand == "ba-capacity")
      run_ba_capacity(cfg, out, streams, threads);
    else throw std::invalid_argument("unknown subcommand '" + subcommand + "'");

    // Provenance: full config echo plus a metadata sidecar.
    const std::string echo = echo_config(cfg);
    {
      std::ofstream f(out_dir / "config_echo.ini", std::ios::binary);
      f << echo;
    }
    const double wall =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
            .count();
    nlohmann::json meta{{"subcommand", subcommand},
                        {"seed", cfg.seed},
                        {"artifact_version", kArtifactVersion},
                        {"threads", threads},
                        {"wall_time_seconds", wall}};
    std::ofstream f(out_dir / "run_meta.json", std::ios::binary);
    f << meta.dump(2) << "\n";
  } catch (...) {
    out.discard_all();
    throw;
  }
}

}  // namespace adex
