#include "safelts/perturbation.hpp"

#include <algorithm>
#include <cmath>
#include <vector>
#include <gtest/gtest.h>

#include "safelts/linalg.hpp"
#include "safelts/rls.hpp"
#include "safelts/rng.hpp"

namespace safelts {
namespace {

TEST(PerturbationSpec, ConstructionAndValidation) {
  const PerturbationSpec spec = make_perturbation_spec(2, 5.0);
  EXPECT_EQ(spec.schedule, Schedule::static_scale);
  EXPECT_EQ(spec.inflation, 5.0);
  EXPECT_THROW(make_perturbation_spec(2, 0.5), std::invalid_argument);
  EXPECT_THROW(make_perturbation_spec(2, 5.0, Schedule::static_scale, 0, 6.0),
               std::invalid_argument);  // floor above inflation
  EXPECT_THROW(make_perturbation_spec(2, 5.0, Schedule::linear_decay, 0),
               std::invalid_argument);  // decay needs a horizon
}

TEST(PerturbationScale, StaticIsConstant) {
  const PerturbationSpec spec = make_perturbation_spec(2, 3.0);
  EXPECT_EQ(perturbation_scale(spec, 1), 3.0);
  EXPECT_EQ(perturbation_scale(spec, 100000), 3.0);
}

TEST(PerturbationScale, LinearDecayHitsFloorAtHorizon) {
  const PerturbationSpec spec =
      make_perturbation_spec(2, 5.0, Schedule::linear_decay, 100, 1.0);
  EXPECT_NEAR(perturbation_scale(spec, 1), 5.0 * 0.99, 1e-14);
  EXPECT_NEAR(perturbation_scale(spec, 50), 2.5, 1e-14);
  EXPECT_EQ(perturbation_scale(spec, 100), 1.0);
  EXPECT_THROW(perturbation_scale(spec, 101), std::invalid_argument);
}

TEST(OptimismProbability, IsLowerNormalTailAtOneSigma) {
  const PerturbationSpec spec = make_perturbation_spec(3, 7.0);
  EXPECT_NEAR(optimism_probability(spec), 0.15865525393145707, 1e-12);
}

TEST(SampleEta, StaticMoments) {
  const PerturbationSpec spec = make_perturbation_spec(2, 5.0);
  RngStream rng(31);
  double sum = 0.0, sumsq = 0.0;
  const int vectors = 500000;
  for (int i = 0; i < vectors; ++i) {
    const Eigen::VectorXd eta = sample_eta(spec, 1, rng);
    for (int j = 0; j < 2; ++j) {
      sum += eta(j);
      sumsq += eta(j) * eta(j);
    }
  }
  const double n = 2.0 * vectors;
  const double mean = sum / n;
  const double stdev = std::sqrt(sumsq / n - mean * mean);
  EXPECT_GE(mean, -0.02);
  EXPECT_LE(mean, 0.02);
  EXPECT_GE(stdev, 4.98);
  EXPECT_LE(stdev, 5.02);
}

TEST(SampleThetaTilde, IdentityMetricShift) {
  RlsState state(2, 1.0);
  Eigen::VectorXd theta_hat(2), eta(2);
  theta_hat << 0.3, -0.7;
  eta << 1.0, 0.0;
  const Eigen::VectorXd tilde = sample_theta_tilde(theta_hat, 1.0, state, eta);
  EXPECT_NEAR(tilde(0), 1.3, 1e-14);
  EXPECT_NEAR(tilde(1), -0.7, 1e-14);
  const Eigen::VectorXd same = sample_theta_tilde(theta_hat, 2.5, state,
                                                  Eigen::VectorXd::Zero(2));
  EXPECT_NEAR((same - theta_hat).norm(), 0.0, 1e-15);
}

TEST(SampleThetaTilde, PerturbationNormIdentity) {
  // || theta_tilde - theta_hat ||_V = beta * ||eta||_2 for the symmetric root.
  RngStream rng(32);
  RlsState state(3, 1.0);
  for (int i = 0; i < 40; ++i) {
    gram_update(state, rng.normal_vector(3), 0.0, 0.0);
  }
  for (int k = 0; k < 20; ++k) {
    const Eigen::VectorXd theta_hat = rng.normal_vector(3);
    const Eigen::VectorXd eta = rng.normal_vector(3);
    const double beta = 0.5 + rng.uniform01();
    const Eigen::VectorXd tilde = sample_theta_tilde(theta_hat, beta, state, eta);
    EXPECT_NEAR(weighted_norm(tilde - theta_hat, state.V), beta * eta.norm(), 1e-8);
  }
}

TEST(TailProbabilityEstimate, AntiConcentrationAtOneSigma) {
  const PerturbationSpec spec = make_perturbation_spec(2, 5.0);
  Eigen::VectorXd u(2);
  u << 1.0, 0.0;
  RngStream rng(33);
  const TailEstimate est =
      tail_probability_estimate(spec, TailQuery::anti_conc(u, 5.0), 1000000, rng);
  EXPECT_NEAR(est.estimate, 0.15865525393145707, 3.0 * est.std_error + 1e-6);
  RngStream rng2(34);
  const TailEstimate half =
      tail_probability_estimate(spec, TailQuery::anti_conc(u, 0.0), 100000, rng2);
  EXPECT_NEAR(half.estimate, 0.5, 0.01);
}

TEST(TailProbabilityEstimate, ConcentrationBoundHolds) {
  const PerturbationSpec spec = make_perturbation_spec(2, 5.0);
  for (const double delta : {0.1, 0.01, 0.001}) {
    const double bound = 5.0 * std::sqrt(2.0 * 2.0 * std::log(2.0 * 2.0 / delta));
    RngStream rng(35);
    const TailEstimate est =
        tail_probability_estimate(spec, TailQuery::conc(bound), 100000, rng);
    EXPECT_LE(1.0 - est.estimate, delta);
  }
}

TEST(TailProbabilityEstimate, RotationInvariance) {
  const PerturbationSpec spec = make_perturbation_spec(2, 5.0);
  Eigen::VectorXd u1(2), u2(2);
  u1 << 1.0, 0.0;
  u2 << 1.0, 1.0;
  u2 /= u2.norm();
  RngStream ra(36), rb(37);
  const TailEstimate a =
      tail_probability_estimate(spec, TailQuery::anti_conc(u1, 5.0), 200000, ra);
  const TailEstimate b =
      tail_probability_estimate(spec, TailQuery::anti_conc(u2, 5.0), 200000, rb);
  const double se = std::sqrt(a.std_error * a.std_error + b.std_error * b.std_error);
  EXPECT_LE(std::abs(a.estimate - b.estimate), 3.0 * se);
}

TEST(TailProbabilityEstimate, ProjectionLawIsNormal) {
  // Kolmogorov-Smirnov distance of the one-dimensional projection against the
  // normal law with the schedule's scale.
  const PerturbationSpec spec = make_perturbation_spec(2, 5.0);
  RngStream rng(38);
  const int n = 100000;
  std::vector<double> z(n);
  Eigen::VectorXd u(2);
  u << 0.6, 0.8;
  for (int i = 0; i < n; ++i) {
    z[static_cast<std::size_t>(i)] = u.dot(sample_eta(spec, 1, rng));
  }
  std::sort(z.begin(), z.end());
  double ks = 0.0;
  for (int i = 0; i < n; ++i) {
    const double F = normal_cdf(z[static_cast<std::size_t>(i)] / 5.0);
    ks = std::max(ks, std::abs(F - static_cast<double>(i) / n));
    ks = std::max(ks, std::abs(static_cast<double>(i + 1) / n - F));
  }
  EXPECT_LE(ks, 0.01);
}

TEST(TailProbabilityEstimate, RejectsBadQueries) {
  const PerturbationSpec spec = make_perturbation_spec(2, 5.0);
  Eigen::VectorXd long_u(2);
  long_u << 1.0, 1.0;
  RngStream rng(39);
  EXPECT_THROW(
      tail_probability_estimate(spec, TailQuery::anti_conc(long_u, 1.0), 20000, rng),
      std::invalid_argument);
  Eigen::VectorXd u(2);
  u << 1.0, 0.0;
  EXPECT_THROW(tail_probability_estimate(spec, TailQuery::anti_conc(u, 1.0), 100, rng),
               std::invalid_argument);
}

}  // namespace
}  // namespace safelts
