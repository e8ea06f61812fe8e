#include "adex/stats.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace adex {

bool ci_overlap(const McEstimate& a, const McEstimate& b) {
  return a.ci_lo() <= b.ci_hi() && b.ci_lo() <= a.ci_hi();
}

void RunningStat::add(double x) {
  ++n_;
  const double d = x - mean_;
  mean_ += d / static_cast<double>(n_);
  m2_ += d * (x - mean_);
}

double RunningStat::variance() const {
  return n_ > 1 ? m2_ / static_cast<double>(n_ - 1) : 0.0;
}

double RunningStat::std_error() const {
  return n_ > 0 ? std::sqrt(variance() / static_cast<double>(n_)) : 0.0;
}

McEstimate RunningStat::estimate() const { return {mean_, std_error(), n_}; }

McEstimate mc_estimate(const std::vector<double>& samples) {
  RunningStat s;
  for (double x : samples) s.add(x);
  return s.estimate();
}

double ks_two_sample(std::vector<double> a, std::vector<double> b) {
  if (a.empty() || b.empty())
    throw std::invalid_argument("ks_two_sample: empty sample");
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  const double na = static_cast<double>(a.size());
  const double nb = static_cast<double>(b.size());
  std::size_t i = 0, j = 0;
  double d = 0.0;
  while (i < a.size() && j < b.size()) {
    const double v = std::min(a[i], b[j]);
    // Step both ECDFs past every observation equal to v before comparing.
    while (i < a.size() && a[i] <= v) ++i;
    while (j < b.size() && b[j] <= v) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / na -
                             static_cast<double>(j) / nb));
  }
  return d;
}

}  // namespace adex
