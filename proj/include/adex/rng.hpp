// Counter-keyed random number streams.
//
// Every Monte Carlo loop in this library derives one independent stream per
// (replication, lane) pair from a master seed, so results are a pure function
// of (config, seed) and never depend on how replications are scheduled across
// threads. Distributions are implemented explicitly (polar normal,
// Marsaglia-Tsang gamma) so that a given seed produces the same stream on any
// platform / standard library.

#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <stdexcept>

namespace adex {

// SplitMix64 step; used both as a stand-alone mixer and to expand seeds.
inline std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// xoshiro256++ with explicit distribution transforms.
class Rng {
 public:
  using result_type = std::uint64_t;

  explicit Rng(std::uint64_t seed = 0) {
    std::uint64_t s = seed;
    for (auto& w : state_) w = splitmix64(s);
  }

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return ~std::uint64_t{0}; }

  std::uint64_t operator()() {
    const std::uint64_t result = rotl(state_[0] + state_[3], 23) + state_[0];
    const std::uint64_t t = state_[1] << 17;
    state_[2] ^= state_[0];
    state_[3] ^= state_[1];
    state_[1] ^= state_[2];
    state_[0] ^= state_[3];
    state_[2] ^= t;
    state_[3] = rotl(state_[3], 45);
    return result;
  }

  // Uniform on [0,1) with 53 random bits.
  double uniform() { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

  bool bernoulli(double p) { return uniform() < p; }

  // Standard normal via the Marsaglia polar method (one spare cached).
  double normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    double u, v, s;
    do {
      u = 2.0 * uniform() - 1.0;
      v = 2.0 * uniform() - 1.0;
      s = u * u + v * v;
    } while (s >= 1.0 || s == 0.0);
    const double m = std::sqrt(-2.0 * std::log(s) / s);
    spare_ = v * m;
    has_spare_ = true;
    return u * m;
  }

  double normal(double mean, double sd) { return mean + sd * normal(); }

  // Gamma(shape, 1) via Marsaglia-Tsang; boosting handles shape < 1.
  double gamma(double shape) {
    if (!(shape > 0.0)) throw std::domain_error("gamma: shape must be > 0");
    if (shape < 1.0) {
      const double u = uniform();
      return gamma(shape + 1.0) * std::pow(u, 1.0 / shape);
    }
    const double d = shape - 1.0 / 3.0;
    const double c = 1.0 / std::sqrt(9.0 * d);
    for (;;) {
      double x, v;
      do {
        x = normal();
        v = 1.0 + c * x;
      } while (v <= 0.0);
      v = v * v * v;
      const double u = uniform();
      if (u < 1.0 - 0.0331 * x * x * x * x) return d * v;
      if (std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return d * v;
    }
  }

  double beta(double a, double b) {
    const double x = gamma(a);
    const double y = gamma(b);
    return x / (x + y);
  }

 private:
  static std::uint64_t rotl(std::uint64_t x, int k) {
    return (x << k) | (x >> (64 - k));
  }

  std::array<std::uint64_t, 4> state_{};
  double spare_ = 0.0;
  bool has_spare_ = false;
};

// Derives independent streams keyed by (master seed, purpose, replication,
// lane). `sub()` refines the purpose, e.g. one factory per grid point.
class StreamFactory {
 public:
  StreamFactory(std::uint64_t master_seed, std::uint64_t purpose)
      : key_(mix(master_seed, purpose)) {}

  StreamFactory sub(std::uint64_t tag) const {
    return StreamFactory(mix(key_, tag));
  }

  Rng make(std::uint64_t replication, std::uint64_t lane) const {
    return Rng(mix(mix(key_, replication), lane));
  }

 private:
  explicit StreamFactory(std::uint64_t key) : key_(key) {}

  static std::uint64_t mix(std::uint64_t a, std::uint64_t b) {
    std::uint64_t s = a ^ (b + 0x9e3779b97f4a7c15ULL + (a << 6) + (a >> 2));
    return splitmix64(s);
  }

  std::uint64_t key_;
};

// Lane conventions shared by all replication loops.
enum Lane : std::uint64_t {
  kLanePolicy = 0,  // exogenous policy randomization U
  kLaneStack1 = 1,  // arm-1 reward stack
  kLaneStack0 = 2,  // arm-0 reward stack
  kLanePrior = 3,   // prior / weight-function draws
  kLaneSignal1 = 4, // limit-experiment arm-1 signal
  kLaneSignal0 = 5, // limit-experiment arm-0 signal
};

}  // namespace adex
