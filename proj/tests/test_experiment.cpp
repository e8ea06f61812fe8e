#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "adex/experiment.hpp"
#include "adex/stats.hpp"

using namespace adex;

namespace {

const ArmModels kBern{ArmModel{Family::Bernoulli, 0.1},
                      ArmModel{Family::Bernoulli, 0.1}};
const ArmModels kGauss{ArmModel{Family::Gaussian, 0.3},
                       ArmModel{Family::Gaussian, 0.3}};

Trajectory run_one(const ArmModels& models, const LocalParam& h,
                   const PolicyKind& kind, long n, std::uint64_t rep = 0,
                   RunOptions opts = {}) {
  StreamFactory f(2024, 100);
  auto streams = ExperimentStreams::make(f, rep);
  return run_experiment(models, h, kind, n, streams, opts);
}

}  // namespace

TEST_CASE("fixed(1) assigns every round to arm 1") {
  const auto traj = run_one(kBern, {0, 0}, Fixed{1.0}, 200);
  for (auto a : traj.assignments) CHECK(a == 1);
  const auto alloc = allocation_path(traj);
  CHECK(alloc.q(1, 0.75) == doctest::Approx(0.75));
  CHECK(alloc.q(1, 0.0) == 0.0);
  CHECK(alloc.q(0, 0.0) == 0.0);
}

TEST_CASE("n = 0 gives an empty trajectory and zero-length paths") {
  const auto traj = run_one(kBern, {0, 0}, Fixed{0.5}, 0);
  CHECK(traj.assignments.empty());
  CHECK(traj.outcomes.empty());
  const auto alloc = allocation_path(traj);
  CHECK(alloc.q(1, 1.0) == 0.0);
  const auto score = score_path(traj, kBern);
  CHECK(score.z[0].size() == 1);  // just z(0) = 0
  CHECK(score.z[1].size() == 1);
}

TEST_CASE("alternating: q1(0.5) = 0.25 at n = 100") {
  const auto traj = run_one(kBern, {0, 0}, Alternating{}, 100);
  const auto alloc = allocation_path(traj);
  CHECK(alloc.q(1, 0.5) == doctest::Approx(0.25));
}

TEST_CASE("score path hand value: Bernoulli theta0 = 0.1, outcomes (1,0)") {
  // z_{n,1}(0.02) = I^{-1/2} n^{-1/2} (psi(1) + psi(0))
  //              = (0.3/10) (10 - 10/9) = 2.4/9
  Trajectory traj;
  traj.n = 100;
  traj.assignments = {1, 1};
  traj.outcomes = {1.0, 0.0};
  traj.arm_outcomes[1] = {1.0, 0.0};
  traj.pulls = {0, 2};
  const auto score = score_path(traj, kBern);
  CHECK(score.z_at(1, 0.02) == doctest::Approx(2.4 / 9.0).epsilon(1e-12));
  // zero pulls of arm 0: z identically zero on its consumed range
  CHECK(score.z_at(0, 0.0) == 0.0);
}

TEST_CASE("variance of z(q) under the null is approximately q") {
  StreamFactory f(5, 101);
  RunningStat stat;
  const long n = 400;
  for (int rep = 0; rep < 10000; ++rep) {
    auto streams = ExperimentStreams::make(f, rep);
    const auto traj = run_experiment(kBern, {0, 0}, Fixed{1.0}, n, streams);
    const auto score = score_path(traj, kBern);
    stat.add(score.z_at(1, 0.5));
  }
  // z(0.5) has mean 0, variance 0.5
  CHECK(std::abs(stat.mean()) < 4 * stat.std_error());
  CHECK(stat.variance() == doctest::Approx(0.5).epsilon(0.05));
}

TEST_CASE("allocation path invariants across policies and seeds") {
  const std::vector<PolicyKind> kinds{ThompsonBeta{}, Ucb{}, Fixed{0.3},
                                      Alternating{}};
  for (const auto& kind : kinds) {
    for (std::uint64_t rep = 0; rep < 20; ++rep) {
      const long n = 157;
      const auto traj = run_one(kBern, {0.5, -0.5}, kind, n, rep);
      const auto alloc = allocation_path(traj);
      long prev = 0;
      for (long j = 0; j <= n; ++j) {
        const long c1 = alloc.arm1_counts[static_cast<std::size_t>(j)];
        CHECK(c1 >= prev);            // nondecreasing
        CHECK(c1 - prev <= 1);        // increments in {0, 1/n}
        CHECK(c1 <= j);               // adding up with arm 0
        prev = c1;
      }
      // stack discipline: outcome j equals the consumed prefix entry
      std::array<long, 2> pos{0, 0};
      for (long j = 0; j < n; ++j) {
        const int arm = traj.assignments[static_cast<std::size_t>(j)];
        CHECK(traj.outcomes[static_cast<std::size_t>(j)] ==
              traj.arm_outcomes[arm][static_cast<std::size_t>(pos[arm])]);
        ++pos[arm];
      }
    }
  }
}

TEST_CASE("prefix measurability: future stack entries never change the past") {
  // Mutating stack entries beyond the consumed position of round j must not
  // change decisions up to j.
  const long n = 300;
  StreamFactory f(17, 103);
  for (const PolicyKind& kind :
       std::vector<PolicyKind>{ThompsonBeta{}, Ucb{}, Fixed{0.4}}) {
    auto streams = ExperimentStreams::make(f, 1);
    const auto base =
        run_experiment(kBern, {0, 0}, kind, n, streams,
                       RunOptions{.keep_full_stacks = true});
    // replay on mutated stacks: flip entries after each arm's consumed count
    auto stacks = base.arm_outcomes;
    for (int a = 0; a < 2; ++a)
      for (std::size_t i = static_cast<std::size_t>(base.pulls[a]);
           i < stacks[a].size(); ++i)
        stacks[a][i] = 1.0 - stacks[a][i];
    Rng policy_rng = f.make(1, kLanePolicy);  // identical policy stream
    const auto replay =
        run_experiment_on_stacks(kBern, kind, n, stacks, policy_rng);
    CHECK(replay.assignments == base.assignments);
    CHECK(replay.outcomes == base.outcomes);
  }
}

TEST_CASE("lazy and pre-materialized stacks give identical trajectories") {
  StreamFactory f(23, 104);
  for (std::uint64_t rep = 0; rep < 5; ++rep) {
    auto s1 = ExperimentStreams::make(f, rep);
    auto s2 = ExperimentStreams::make(f, rep);
    const auto lazy = run_experiment(kBern, {0.2, 0}, ThompsonBeta{}, 200, s1);
    const auto full = run_experiment(kBern, {0.2, 0}, ThompsonBeta{}, 200, s2,
                                     RunOptions{.keep_full_stacks = true});
    CHECK(lazy.assignments == full.assignments);
    CHECK(lazy.outcomes == full.outcomes);
  }
}

TEST_CASE("loglik ratio: zero at h = 0 and exact LAN for the Gaussian family") {
  const long n = 500;
  const auto traj = run_one(kGauss, {0.7, -0.3}, Ucb{}, n, 3,
                            RunOptions{.keep_full_stacks = true});
  CHECK(loglik_ratio(traj, kGauss, {0, 0}, 0.8, 0.6, n) == 0.0);

  const auto score = score_path(traj, kGauss);
  const LocalParam h{0.7, -0.3};
  for (double g1 : {0.0, 0.33, 0.5, 1.0})
    for (double g0 : {0.25, 0.9}) {
      const double exact = loglik_ratio(traj, kGauss, h, g1, g0, n);
      const double expansion = slan_expansion(score, h, g1, g0);
      CHECK(exact == doctest::Approx(expansion).epsilon(1e-10));
    }
}

TEST_CASE("loglik ratio requires the prefix to be observed") {
  const auto traj = run_one(kBern, {0, 0}, Fixed{1.0}, 100);
  // arm 0 consumed nothing; gamma0 > 0 needs the full stack
  CHECK_THROWS_AS(loglik_ratio(traj, kBern, {0.1, 0.1}, 0.5, 0.5, 100),
                  std::domain_error);
}

TEST_CASE("Bernoulli SLAN error shrinks with n") {
  // mean over replications of sup over a gamma grid of |phi_hat - expansion|
  const ArmModel model{Family::Bernoulli, 0.1};
  const double h = 1.0;
  StreamFactory f(31, 105);
  std::vector<double> gammas;
  for (int i = 0; i <= 20; ++i) gammas.push_back(i / 20.0);

  auto mean_sup_gap = [&](long n, std::uint64_t tag) {
    RunningStat stat;
    for (int rep = 0; rep < 300; ++rep) {
      Rng rng = f.sub(tag).make(rep, kLaneStack1);
      const auto stack = sample_stack_at(model, model.theta0, n, rng);
      // score partial sums under the null
      const double info = fisher_info(model);
      const double scale = 1.0 / std::sqrt(info * static_cast<double>(n));
      double sup = 0.0;
      for (double g : gammas) {
        const long m = static_cast<long>(std::floor(n * g));
        double zsum = 0.0;
        for (long i = 0; i < m; ++i) zsum += score(model, stack[i]);
        const double z = scale * zsum;
        const double gamma_n = static_cast<double>(m) / n;
        const double expansion =
            h * std::sqrt(info) * z - 0.5 * gamma_n * h * h * info;
        const double exact = loglik_ratio_on_stack(model, h, stack, g, n);
        sup = std::max(sup, std::abs(exact - expansion));
      }
      stat.add(sup);
    }
    return stat.mean();
  };

  const double e100 = mean_sup_gap(100, 1);
  const double e1000 = mean_sup_gap(1000, 2);
  const double e10000 = mean_sup_gap(10000, 3);
  CHECK(e1000 < e100);
  CHECK(e10000 < e1000);
}

TEST_CASE("null-law stabilization: KS distance shrinks as n grows") {
  // Consequence of the representation theorem: the law of
  // (x_{n,1}(t), q_{n,1}(t)) stabilizes. Compare marginals via KS at t = 0.5.
  StreamFactory f(41, 106);
  auto samples = [&](const PolicyKind& kind, long n, std::uint64_t tag) {
    std::pair<std::vector<double>, std::vector<double>> out;
    for (int rep = 0; rep < 3000; ++rep) {
      auto streams = ExperimentStreams::make(f.sub(tag), rep);
      const auto traj = run_experiment(kBern, {0, 0}, kind, n, streams);
      const auto alloc = allocation_path(traj);
      const auto score = score_path(traj, kBern);
      out.first.push_back(alloc.q(1, 0.5));
      out.second.push_back(score.x_at(1, alloc, 0.5));
    }
    return out;
  };
  for (const PolicyKind& kind : std::vector<PolicyKind>{ThompsonBeta{}, Ucb{}}) {
    const auto small_a = samples(kind, 250, 10);
    const auto small_b = samples(kind, 1000, 11);
    const auto big_a = samples(kind, 1000, 12);
    const auto big_b = samples(kind, 4000, 13);
    const double dq_small = ks_two_sample(small_a.first, small_b.first);
    const double dq_big = ks_two_sample(big_a.first, big_b.first);
    const double dx_small = ks_two_sample(small_a.second, small_b.second);
    const double dx_big = ks_two_sample(big_a.second, big_b.second);
    // allow MC noise floor ~ 1.36 sqrt(2/3000) = 0.035
    CHECK(dq_big < dq_small + 0.02);
    CHECK(dx_big < dx_small + 0.02);
    CHECK(dq_big < 0.08);
    CHECK(dx_big < 0.08);
  }
}

TEST_CASE("thompson under equal arms pulls arm 1 half the time") {
  StreamFactory f(53, 107);
  RunningStat freq;
  for (int rep = 0; rep < 2000; ++rep) {
    auto streams = ExperimentStreams::make(f, rep);
    const auto traj =
        run_experiment(kBern, {0, 0}, ThompsonBeta{}, 200, streams);
    freq.add(static_cast<double>(traj.pulls[1]) / 200.0);
  }
  CHECK(std::abs(freq.mean() - 0.5) < 3 * freq.std_error());
}
