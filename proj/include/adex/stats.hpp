// Small statistics utilities: Monte Carlo accumulators and the two-sample
// Kolmogorov-Smirnov distance.

#pragma once

#include <cstdint>
#include <vector>

namespace adex {

// A Monte Carlo estimate: sample mean, its standard error, replication count.
struct McEstimate {
  double mean = 0.0;
  double std_error = 0.0;
  long reps = 0;

  // 95% normal-approximation confidence bounds.
  double ci_lo() const { return mean - 1.96 * std_error; }
  double ci_hi() const { return mean + 1.96 * std_error; }
};

// Returns true when the 95% intervals of two estimates overlap.
bool ci_overlap(const McEstimate& a, const McEstimate& b);

// Welford accumulator.
class RunningStat {
 public:
  void add(double x);
  long count() const { return n_; }
  double mean() const { return mean_; }
  double variance() const;  // sample variance (n-1 denominator)
  double std_error() const;
  McEstimate estimate() const;

 private:
  long n_ = 0;
  double mean_ = 0.0;
  double m2_ = 0.0;
};

McEstimate mc_estimate(const std::vector<double>& samples);

// Two-sample KS distance sup_x |F_a(x) - F_b(x)|; handles ties. Inputs need
// not be sorted.
double ks_two_sample(std::vector<double> a, std::vector<double> b);

}  // namespace adex
