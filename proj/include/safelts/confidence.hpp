#pragma once

#include <cstdint>

#include <Eigen/Dense>

#include "safelts/rls.hpp"

namespace safelts {

// Parameters behind the confidence radii. delta_prime = delta / (6 T); the
// per-round radii are instantiated at delta_prime so a union bound over the
// horizon spends delta in total.
struct ConfidenceConfig {
  double R = 0.1;       // sub-Gaussian noise scale
  double S = 1.0;       // parameter norm bound
  double L = 2.0;       // action norm bound
  int d = 2;
  double lambda = 1.0;  // ridge regularizer, must be >= 1
  double delta = 0.0;
  double delta_prime = 0.0;
  std::int64_t T = 0;
  double c = 2.0;        // concentration constants for the sampled parameter
  double c_prime = 2.0;
};

// Validates and fills delta_prime from delta and T.
ConfidenceConfig make_confidence_config(double R, double S, double L, int d,
                                        double lambda, double delta, std::int64_t T);

// R * sqrt(d log((1 + (t-1) L^2 / lambda) / delta_prime)) + sqrt(lambda) * S.
// Nondecreasing in t, nonincreasing in delta_prime.
double beta_radius(const ConfidenceConfig& cfg, std::int64_t t);

// beta_t * (1 + (2/C) L S) * sqrt(c d log(c_prime d / delta_prime)): the
// radius covering the sampled parameter around theta-hat.
double gamma_radius(const ConfidenceConfig& cfg, std::int64_t t, double C);

// C - x'mu_hat - beta * ||x||_{V^{-1}}. Nonnegative iff x is in the estimated
// safe set; called with 2*beta it tests the shrunk set instead.
double safe_margin(const Eigen::VectorXd& x, const Eigen::VectorXd& mu_hat,
                   const RlsState& state, double beta, double C);

}  // namespace safelts
