// Acceptance suite: runs every release criterion at its stated tolerance and
// prints one PASS/FAIL line per criterion. Exit status is the number of
// failures.

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "adex/config.hpp"
#include "adex/diffusion.hpp"
#include "adex/evalid.hpp"
#include "adex/experiment.hpp"
#include "adex/inference.hpp"
#include "adex/mc.hpp"
#include "adex/rng.hpp"
#include "adex/runner.hpp"
#include "adex/stats.hpp"
#include "oracles.hpp"

using namespace adex;
namespace fs = std::filesystem;

namespace {

constexpr std::uint64_t kSeed = 20240817;
const ArmModels kBern{ArmModel{Family::Bernoulli, 0.1},
                      ArmModel{Family::Bernoulli, 0.1}};
int g_threads = 2;

struct Check {
  bool ok = true;
  std::string detail;

  void require(bool cond, const std::string& msg) {
    if (!cond) {
      ok = false;
      if (!detail.empty()) detail += "; ";
      detail += msg;
    }
  }
  void note(const std::string& msg) {
    if (!detail.empty()) detail += "; ";
    detail += msg;
  }
};

std::string fmt(double x) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.4g", x);
  return buf;
}

// 1. Allocation-law stabilization: KS(q_{n,1}(t): n=1000 vs n=4000) <= 0.05.
Check criterion1() {
  Check c;
  StreamFactory f(kSeed, 1);
  const std::vector<double> ts{0.25, 0.5, 0.75};
  const long reps = 10000;
  std::uint64_t tag = 0;
  for (const PolicyKind& kind : std::vector<PolicyKind>{ThompsonBeta{}, Ucb{}}) {
    std::array<std::vector<std::vector<double>>, 2> q_samples;
    const std::array<long, 2> ns{1000, 4000};
    for (int ni = 0; ni < 2; ++ni) {
      const auto sub = f.sub(tag++);
      std::vector<std::vector<double>> per_t(
          ts.size(), std::vector<double>(reps));
      parallel_for(reps, g_threads, [&](long rep) {
        auto streams = ExperimentStreams::make(sub, rep);
        const auto traj =
            run_experiment(kBern, {0, 0}, kind, ns[ni], streams);
        const auto alloc = allocation_path(traj);
        for (std::size_t ti = 0; ti < ts.size(); ++ti)
          per_t[ti][static_cast<std::size_t>(rep)] = alloc.q(1, ts[ti]);
      });
      q_samples[ni] = std::move(per_t);
    }
    for (std::size_t ti = 0; ti < ts.size(); ++ti) {
      const double d = ks_two_sample(q_samples[0][ti], q_samples[1][ti]);
      c.require(d <= 0.05, std::string(policy_name(kind)) + " t=" +
                               fmt(ts[ti]) + " KS=" + fmt(d));
    }
  }
  return c;
}

// 2. Posterior vs quadrature to 1e-8; estimator vs shrinkage form to 1e-12.
Check criterion2() {
  Check c;
  Rng rng(314159);
  double worst_post = 0.0;
  for (int i = 0; i < 100; ++i) {
    const double x = 2.0 * rng.normal();
    const double q = rng.uniform();
    const double info = 0.5 + 10.0 * rng.uniform();
    const double mu0 = rng.normal();
    const double nu2 = 0.05 + rng.uniform();
    const auto ref = oracles::posterior_quadrature(x, q, info, mu0, nu2);
    const auto post = posterior(x, q, info, {mu0, nu2});
    worst_post = std::max(worst_post, std::abs(post.mean - ref.mean));
    worst_post = std::max(worst_post, std::abs(post.variance - ref.variance));
  }
  c.require(worst_post < 1e-8, "posterior gap " + fmt(worst_post));

  const ArmModel model = kBern[1];
  const double info = fisher_info(model);
  double worst_est = 0.0;
  for (int trial = 0; trial < 200; ++trial) {
    const long n = 50 + static_cast<long>(rng.uniform() * 1000);
    const long pulls = 1 + static_cast<long>(rng.uniform() * (n - 1));
    const double nu = 0.05 + rng.uniform();
    double sum = 0.0, score_sum = 0.0;
    for (long i = 0; i < pulls; ++i) {
      const double y = rng.bernoulli(0.12) ? 1.0 : 0.0;
      sum += y;
      score_sum += score(model, y);
    }
    const double q = static_cast<double>(pulls) / static_cast<double>(n);
    const double x = score_sum / std::sqrt(info * static_cast<double>(n));
    const GaussianPrior prior{0.0, nu * nu};
    const auto est = finite_sample_estimator(
        {0.0, x}, {0.0, q}, {info, info}, model.theta0, n, {prior, prior});
    const double w = 1.0 / (info * nu * nu);
    const double shrink = (w * model.theta0 + sum / static_cast<double>(n)) /
                          (q + w);
    worst_est = std::max(worst_est, std::abs(est[1] - shrink));
  }
  c.require(worst_est < 1e-12, "shrinkage gap " + fmt(worst_est));
  return c;
}

// 3. Bayes-risk stability across n for UCB and TS.
Check criterion3() {
  Check c;
  StreamFactory f(kSeed, 3);
  const EstimatorSpec spec{EstimatorSpec::Kind::TStar,
                           {GaussianPrior{0, 0.04}, GaussianPrior{0, 0.04}}};
  const HPrior prior = GaussianIidPrior{0.0, 0.04};
  std::uint64_t tag = 0;
  for (const PolicyKind& kind : std::vector<PolicyKind>{Ucb{}, ThompsonBeta{}}) {
    const auto r100 = bayes_risk(spec, kBern, prior, kind, 100, Loss::Squared,
                                 10000, f.sub(tag++), g_threads);
    const auto r400 = bayes_risk(spec, kBern, prior, kind, 400, Loss::Squared,
                                 10000, f.sub(tag++), g_threads);
    c.require(ci_overlap(r100, r400),
              std::string(policy_name(kind)) + " n=100: " + fmt(r100.mean) +
                  "+-" + fmt(1.96 * r100.std_error) + " vs n=400: " +
                  fmt(r400.mean) + "+-" + fmt(1.96 * r400.std_error));
    c.note(std::string(policy_name(kind)) + "=" + fmt(r100.mean) + "/" +
           fmt(r400.mean));
  }
  return c;
}

// 4. Girsanov martingale: E0[exp phi(h; gamma)] = 1 within 3 SE.
Check criterion4() {
  Check c;
  StreamFactory f(kSeed, 4);
  const long reps = 100000;
  std::uint64_t tag = 0;
  for (double h : {0.5, 1.0, 2.0})
    for (double gamma : {0.3, 1.0}) {
      const auto sub = f.sub(tag++);
      const auto vals = parallel_map<double>(reps, g_threads, [&](long rep) {
        Rng rng = sub.make(static_cast<std::uint64_t>(rep), 0);
        SignalPath z(0.0);
        // simulate to attention gamma on a 64-step grid
        for (long k = 1; k <= 64; ++k)
          z.observe(gamma * static_cast<double>(k) / 64.0, rng);
        return std::exp(girsanov_loglr(z, h, 1.0, gamma));
      });
      const auto est = mc_estimate(vals);
      c.require(std::abs(est.mean - 1.0) <= 3.0 * est.std_error,
                "h=" + fmt(h) + " gamma=" + fmt(gamma) + ": " +
                    fmt(est.mean) + "+-" + fmt(est.std_error));
    }
  return c;
}

// 5. Lemma 1 QV: mean |QV(x1)(1) - q1(1)| halves from step 1/256 to 1/1024.
Check criterion5() {
  Check c;
  StreamFactory f(kSeed, 5);
  auto mean_err = [&](long steps, std::uint64_t tag) {
    const auto grid = LimitGrid::with_steps(steps);
    const auto vals = parallel_map<double>(3000, g_threads, [&](long rep) {
      Rng rng = f.sub(tag).make(static_cast<std::uint64_t>(rep), 0);
      auto signals = make_signal_paths({0, 0}, {1, 1});
      const auto path = run_limit_experiment(
          limit_thompson_rule({1, 1},
                              std::numeric_limits<double>::infinity()),
          signals, grid, rng);
      return std::abs(quadratic_variation(path.x1)[steps] - path.q1[steps]);
    });
    return mc_estimate(vals).mean;
  };
  const double e256 = mean_err(256, 1);
  const double e1024 = mean_err(1024, 2);
  const double ratio = e1024 / e256;
  c.require(std::abs(ratio - 0.5) <= 0.125,
            "error ratio " + fmt(ratio) + " (e256=" + fmt(e256) +
                ", e1024=" + fmt(e1024) + ")");
  return c;
}

// 6. SLAN: mean sup-gap decreases monotonically over n in {100, 1000, 10000}.
Check criterion6() {
  Check c;
  StreamFactory f(kSeed, 6);
  const ArmModel model = kBern[1];
  const double h = 1.0;
  const double info = fisher_info(model);
  std::vector<double> gammas;
  for (int i = 0; i <= 20; ++i) gammas.push_back(i / 20.0);

  auto mean_sup = [&](long n, std::uint64_t tag) {
    const auto vals = parallel_map<double>(1000, g_threads, [&](long rep) {
      Rng rng = f.sub(tag).make(static_cast<std::uint64_t>(rep), kLaneStack1);
      const auto stack = sample_stack_at(model, model.theta0, n, rng);
      const double scale = 1.0 / std::sqrt(info * static_cast<double>(n));
      double sup = 0.0;
      double zsum = 0.0;
      long consumed = 0;
      for (double g : gammas) {
        const long m = static_cast<long>(std::floor(n * g));
        for (; consumed < m; ++consumed)
          zsum += score(model, stack[static_cast<std::size_t>(consumed)]);
        const double z = scale * zsum;
        const double gamma_n = static_cast<double>(m) / n;
        const double expansion =
            h * std::sqrt(info) * z - 0.5 * gamma_n * h * h * info;
        const double exact = loglik_ratio_on_stack(model, h, stack, g, n);
        sup = std::max(sup, std::abs(exact - expansion));
      }
      return sup;
    });
    return mc_estimate(vals).mean;
  };
  const double e2 = mean_sup(100, 1);
  const double e3 = mean_sup(1000, 2);
  const double e4 = mean_sup(10000, 3);
  c.require(e3 < e2 && e4 < e3, "sup gaps " + fmt(e2) + " -> " + fmt(e3) +
                                     " -> " + fmt(e4));
  c.note(fmt(e2) + "/" + fmt(e3) + "/" + fmt(e4));
  return c;
}

// 7. E-process validity and anytime size at threshold 20.
Check criterion7() {
  Check c;
  StreamFactory f(kSeed, 7);
  const EProcessSpec spec = GaussianMixtureArm1{1.0};
  const std::vector<double> theta0_arm0{0.0, 0.02, 0.05, 0.1};
  std::vector<double> t_grid;
  for (int i = 1; i <= 20; ++i) t_grid.push_back(i / 20.0);
  const long n = 1000, reps = 2000;
  std::uint64_t tag = 0;
  for (const PolicyKind& kind :
       std::vector<PolicyKind>{ThompsonBeta{}, Ucb{}, Fixed{0.5}}) {
    for (double th0 : theta0_arm0) {
      const auto means =
          evalue_means(spec, kBern, kind, n, {0, 0}, t_grid, reps,
                       f.sub(tag++), g_threads, {th0, std::nullopt});
      for (std::size_t ti = 0; ti < t_grid.size(); ++ti)
        c.require(means[ti].mean <= 1.0 + 3.0 * means[ti].std_error,
                  std::string(policy_name(kind)) + " theta0(0)=" + fmt(th0) +
                      " t=" + fmt(t_grid[ti]) + " mean=" +
                      fmt(means[ti].mean));
    }
    const auto sweep = anytime_size(spec, kBern, kind, n, theta0_arm0, 0.05,
                                    reps, f.sub(tag++), g_threads);
    c.require(sweep.sup.mean <= 0.05 + 3.0 * sweep.sup.std_error,
              std::string(policy_name(kind)) + " sup size " +
                  fmt(sweep.sup.mean));
    c.note(std::string(policy_name(kind)) + " size=" + fmt(sweep.sup.mean));
  }
  return c;
}

// 8. GRO stability across n under UCB, and nonnegativity.
Check criterion8() {
  Check c;
  StreamFactory f(kSeed, 8);
  const EProcessSpec spec = GaussianMixtureArm1{1.0};
  const std::vector<double> t_grid{0.25, 0.5, 0.75, 1.0};
  const auto g500 = gro_curve(spec, kBern, {1.0, 0.0}, Ucb{}, 500, t_grid,
                              10000, f.sub(1), g_threads);
  const auto g2000 = gro_curve(spec, kBern, {1.0, 0.0}, Ucb{}, 2000, t_grid,
                               10000, f.sub(2), g_threads);
  for (std::size_t ti = 0; ti < t_grid.size(); ++ti) {
    c.require(ci_overlap(g500[ti], g2000[ti]),
              "t=" + fmt(t_grid[ti]) + ": n500=" + fmt(g500[ti].mean) +
                  "+-" + fmt(1.96 * g500[ti].std_error) + " n2000=" +
                  fmt(g2000[ti].mean) + "+-" +
                  fmt(1.96 * g2000[ti].std_error));
    c.require(g500[ti].mean >= -3.0 * g500[ti].std_error &&
                  g2000[ti].mean >= -3.0 * g2000[ti].std_error,
              "negative GRO at t=" + fmt(t_grid[ti]));
  }
  return c;
}

// 9. Blahut-Arimoto: two-point regime, capacity match, monotone lower bound.
Check criterion9() {
  Check c;
  const auto res =
      blahut_arimoto(ChannelSpec::symmetric(1.0, 1.0, 1.0, 41), 1e-10, 50000);
  const Eigen::Index m = res.weights.size();
  const double interior = res.weights.segment(1, m - 2).sum();
  c.require(interior < 1e-3, "interior mass " + fmt(interior));
  const double direct = oracles::two_point_mutual_information(1.0, 1.0, 1.0);
  c.require(std::abs(res.capacity - direct) < 1e-4,
            "capacity " + fmt(res.capacity) + " vs direct " + fmt(direct));
  for (std::size_t i = 1; i < res.lower_bounds.size(); ++i)
    if (res.lower_bounds[i] < res.lower_bounds[i - 1]) {
      c.require(false, "lower bound decreased at iteration " +
                           std::to_string(i));
      break;
    }
  c.note("capacity=" + fmt(res.capacity) + " iters=" +
         std::to_string(res.iterations));
  return c;
}

// 10. In-sample regret: stability across n for TS; Fixed(0.5) closed form.
Check criterion10() {
  Check c;
  StreamFactory f(kSeed, 10);
  const auto r400 = in_sample_regret(kBern, {1, 0}, ThompsonBeta{}, 400,
                                     10000, f.sub(1), g_threads);
  const auto r1600 = in_sample_regret(kBern, {1, 0}, ThompsonBeta{}, 1600,
                                      10000, f.sub(2), g_threads);
  c.require(ci_overlap(r400, r1600),
            "TS n=400: " + fmt(r400.mean) + "+-" +
                fmt(1.96 * r400.std_error) + " vs n=1600: " +
                fmt(r1600.mean) + "+-" + fmt(1.96 * r1600.std_error));
  const auto fixed = in_sample_regret(kBern, {1, 0}, Fixed{0.5}, 400, 10000,
                                      f.sub(3), g_threads);
  c.require(std::abs(fixed.mean - 0.5) <= 3.0 * fixed.std_error,
            "Fixed(0.5) regret " + fmt(fixed.mean));
  c.note("TS=" + fmt(r400.mean) + "/" + fmt(r1600.mean) +
         " fixed=" + fmt(fixed.mean));
  return c;
}

// 11. Determinism: byte-identical CSVs across thread counts, all subcommands.
Check criterion11() {
  Check c;
  RunConfig cfg = parse_config(
      "[model]\nfamily = bernoulli\ntheta0 = 0.1\n[policy]\nkind = ts\n");
  cfg.n = {100};
  cfg.reps = 50;
  cfg.seed = 4242;
  cfg.nu2 = 0.04;
  cfg.h_count = 3;
  cfg.limit_steps = 32;
  cfg.theta0_arm0 = {0.05, 0.1};

  auto slurp = [](const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
  };
  const fs::path base = fs::temp_directory_path() / "adex_acceptance11";
  fs::remove_all(base);
  for (const auto& sub : kSubcommands) {
    const fs::path d1 = base / (sub + "_1"), d4 = base / (sub + "_4");
    run_subcommand(sub, cfg, d1, 1);
    run_subcommand(sub, cfg, d4, 4);
    for (const auto& entry : fs::directory_iterator(d1)) {
      if (entry.path().extension() != ".csv") continue;
      if (slurp(entry.path()) != slurp(d4 / entry.path().filename()))
        c.require(false, sub + ": " + entry.path().filename().string() +
                             " differs across thread counts");
    }
  }
  fs::remove_all(base);
  return c;
}

}  // namespace

int main(int argc, char** argv) {
  if (argc > 1) g_threads = std::max(1, std::atoi(argv[1]));

  struct Criterion {
    int id;
    const char* name;
    std::function<Check()> run;
  };
  const std::vector<Criterion> criteria{
      {1, "allocation-law stabilization (KS across n)", criterion1},
      {2, "posterior quadrature + shrinkage identity", criterion2},
      {3, "Bayes-risk stability across n (UCB, TS)", criterion3},
      {4, "Girsanov stochastic exponential has unit mean", criterion4},
      {5, "quadratic-variation error halves with the step", criterion5},
      {6, "SLAN sup-gap decreases in n", criterion6},
      {7, "e-process validity and anytime size", criterion7},
      {8, "GRO stability across n and nonnegativity", criterion8},
      {9, "Blahut-Arimoto two-point regime and capacity", criterion9},
      {10, "regret convergence and closed form", criterion10},
      {11, "byte-identical outputs across thread counts", criterion11},
  };

  int failures = 0;
  for (const auto& cr : criteria) {
    Check result;
    std::string error;
    try {
      result = cr.run();
    } catch (const std::exception& e) {
      result.ok = false;
      result.detail = std::string("exception: ") + e.what();
    }
    if (!result.ok) ++failures;
    std::printf("%s criterion %2d: %s%s%s\n", result.ok ? "PASS" : "FAIL",
                cr.id, cr.name, result.detail.empty() ? "" : " -- ",
                result.detail.c_str());
    std::fflush(stdout);
  }
  return failures;
}
