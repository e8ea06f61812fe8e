#include "adex/model.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace adex {

void ArmModel::validate() const {
  switch (family) {
    case Family::Bernoulli:
      if (!(theta0 > 0.0 && theta0 < 1.0))
        throw std::domain_error(
            "ArmModel: Bernoulli theta0 must lie in (0,1), got " +
            std::to_string(theta0));
      break;
    case Family::Gaussian:
      if (!std::isfinite(theta0))
        throw std::domain_error("ArmModel: Gaussian theta0 must be finite");
      break;
  }
}

void LocalParam::validate() const {
  if (!std::isfinite(h1) || !std::isfinite(h0))
    throw std::domain_error("LocalParam: h must be finite");
}

double score(const ArmModel& model, double y) {
  model.validate();
  switch (model.family) {
    case Family::Bernoulli:
      if (y != 0.0 && y != 1.0)
        throw std::domain_error("score: Bernoulli outcome must be 0 or 1");
      return (y - model.theta0) / (model.theta0 * (1.0 - model.theta0));
    case Family::Gaussian:
      return y - model.theta0;
  }
  throw std::logic_error("score: unknown family");
}

double fisher_info(const ArmModel& model) {
  model.validate();
  switch (model.family) {
    case Family::Bernoulli:
      return 1.0 / (model.theta0 * (1.0 - model.theta0));
    case Family::Gaussian:
      return 1.0;
  }
  throw std::logic_error("fisher_info: unknown family");
}

std::array<double, 2> fisher_infos(const ArmModels& models) {
  return {fisher_info(models[0]), fisher_info(models[1])};
}

double local_theta(const ArmModel& model, double h, long n) {
  model.validate();
  if (n < 1) throw std::domain_error("local_theta: n must be >= 1");
  const double theta = model.theta0 + h / std::sqrt(static_cast<double>(n));
  if (model.family == Family::Bernoulli && !(theta > 0.0 && theta < 1.0))
    throw std::domain_error("local_theta: Bernoulli parameter " +
                            std::to_string(theta) + " outside (0,1)");
  return theta;
}

double log_density_ratio(const ArmModel& model, double theta, double y) {
  switch (model.family) {
    case Family::Bernoulli: {
      if (!(theta > 0.0 && theta < 1.0))
        throw std::domain_error("log_density_ratio: theta outside (0,1)");
      if (y != 0.0 && y != 1.0)
        throw std::domain_error("log_density_ratio: outcome must be 0 or 1");
      return y == 1.0 ? std::log(theta / model.theta0)
                      : std::log((1.0 - theta) / (1.0 - model.theta0));
    }
    case Family::Gaussian:
      // ln N(y; theta, 1) - ln N(y; theta0, 1)
      return (theta - model.theta0) * (y - 0.5 * (theta + model.theta0));
  }
  throw std::logic_error("log_density_ratio: unknown family");
}

double sample_outcome(const ArmModel& model, double theta, Rng& rng) {
  switch (model.family) {
    case Family::Bernoulli:
      return rng.bernoulli(theta) ? 1.0 : 0.0;
    case Family::Gaussian:
      return rng.normal(theta, 1.0);
  }
  throw std::logic_error("sample_outcome: unknown family");
}

std::vector<double> sample_stack_at(const ArmModel& model, double theta,
                                    long n, Rng& rng) {
  model.validate();
  if (model.family == Family::Bernoulli && !(theta >= 0.0 && theta <= 1.0))
    throw std::domain_error("sample_stack_at: Bernoulli theta outside [0,1]");
  std::vector<double> stack;
  stack.reserve(static_cast<std::size_t>(n));
  for (long i = 0; i < n; ++i) stack.push_back(sample_outcome(model, theta, rng));
  return stack;
}

std::vector<double> sample_stack(const ArmModel& model, double h, long n,
                                 Rng& rng) {
  return sample_stack_at(model, local_theta(model, h, n), n, rng);
}

}  // namespace adex
