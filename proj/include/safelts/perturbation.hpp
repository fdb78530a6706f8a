#pragma once

#include <cstdint>

#include <Eigen/Dense>

#include "safelts/rls.hpp"
#include "safelts/rng.hpp"

namespace safelts {

enum class Schedule { static_scale, linear_decay };

// Law of the sampling perturbation eta_t: IID zero-mean normal coordinates
// with standard deviation sigma(t). The static law uses sigma = inflation;
// the decaying schedule shrinks linearly to `floor` at t = T. The threshold
// in the optimism condition equals exactly one standard deviation of the
// static law, so the optimism probability p is the normal lower-tail at -1.
struct PerturbationSpec {
  int d = 2;
  double inflation = 1.0;  // 1 + (2/C) L S
  Schedule schedule = Schedule::static_scale;
  std::int64_t T = 0;      // horizon, required by the decaying schedule
  double floor = 1.0;
  double c = 2.0;
  double c_prime = 2.0;
};

PerturbationSpec make_perturbation_spec(int d, double inflation,
                                        Schedule schedule = Schedule::static_scale,
                                        std::int64_t T = 0, double floor = 1.0);

// Anti-concentration probability of the static law at its one-sigma threshold.
double optimism_probability(const PerturbationSpec& spec);

// sigma(t): inflation when static, max(floor, inflation * (1 - t/T)) when decaying.
double perturbation_scale(const PerturbationSpec& spec, std::int64_t t);

Eigen::VectorXd sample_eta(const PerturbationSpec& spec, std::int64_t t, RngStream& rng);

// theta_hat + beta * V^{-1/2} * eta with the symmetric root, so that
// ||theta_tilde - theta_hat||_V = beta * ||eta||_2.
Eigen::VectorXd sample_theta_tilde(const Eigen::VectorXd& theta_hat, double beta,
                                   const RlsState& state, const Eigen::VectorXd& eta);

struct TailEstimate {
  double estimate = 0.0;
  double std_error = 0.0;
};

enum class TailMode { anti_conc, conc };

// Monte-Carlo query against the static law.
//   anti_conc: P(u' eta >= threshold) for a unit direction u.
//   conc:      P(||eta||_2 <= threshold), the coverage of a norm bound.
struct TailQuery {
  TailMode mode = TailMode::anti_conc;
  Eigen::VectorXd u;
  double threshold = 0.0;

  static TailQuery anti_conc(Eigen::VectorXd u, double threshold);
  static TailQuery conc(double bound);
};

TailEstimate tail_probability_estimate(const PerturbationSpec& spec, const TailQuery& query,
                                       std::int64_t n, RngStream& rng);

}  // namespace safelts
