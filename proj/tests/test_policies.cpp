#include "safelts/policies.hpp"

#include <cmath>
#include <gtest/gtest.h>

#include "safelts/confidence.hpp"
#include "safelts/environment.hpp"
#include "safelts/linalg.hpp"
#include "safelts/rng.hpp"

namespace safelts {
namespace {

ConfidenceConfig config_for(const ProblemInstance& inst, std::int64_t T = 1000) {
  return make_confidence_config(inst.R, inst.S, inst.L, inst.dim(), 1.0, 0.01, T);
}

TEST(PolicyKind, StringsRoundTrip) {
  const PolicyKind kinds[] = {PolicyKind::safe_lts,        PolicyKind::oracle_lts,
                              PolicyKind::dynamic_safe_lts, PolicyKind::naive_safe_lucb,
                              PolicyKind::inflated_safe_lucb, PolicyKind::safe_lucb};
  for (const PolicyKind kind : kinds) {
    EXPECT_EQ(policy_kind_from_string(to_string(kind)), kind);
  }
  EXPECT_THROW(policy_kind_from_string("thompson"), std::invalid_argument);
  EXPECT_TRUE(is_sampling_policy(PolicyKind::safe_lts));
  EXPECT_TRUE(is_sampling_policy(PolicyKind::oracle_lts));
  EXPECT_TRUE(is_sampling_policy(PolicyKind::dynamic_safe_lts));
  EXPECT_FALSE(is_sampling_policy(PolicyKind::naive_safe_lucb));
  EXPECT_FALSE(is_sampling_policy(PolicyKind::inflated_safe_lucb));
  EXPECT_FALSE(is_sampling_policy(PolicyKind::safe_lucb));
}

TEST(MakePolicy, PerKindConfiguration) {
  const ProblemInstance inst = load_fixed_instance("tight_pos");
  const ConfidenceConfig cfg = config_for(inst);
  const double inflation = 1.0 + (2.0 / inst.C) * cfg.L * cfg.S;

  const PolicyState lts = make_policy(PolicyKind::safe_lts, cfg, inst);
  EXPECT_EQ(lts.pert.schedule, Schedule::static_scale);
  EXPECT_NEAR(lts.pert.inflation, inflation, 1e-12);
  EXPECT_EQ(lts.oracle_mu.size(), 0);

  const PolicyState oracle = make_policy(PolicyKind::oracle_lts, cfg, inst);
  EXPECT_EQ(oracle.pert.inflation, 1.0);
  EXPECT_NEAR((oracle.oracle_mu - inst.mu_star).norm(), 0.0, 1e-15);

  const PolicyState dyn = make_policy(PolicyKind::dynamic_safe_lts, cfg, inst);
  EXPECT_EQ(dyn.pert.schedule, Schedule::linear_decay);
  EXPECT_EQ(dyn.pert.T, cfg.T);
  EXPECT_EQ(dyn.pert.floor, 1.0);
  EXPECT_NEAR(dyn.pert.inflation, inflation, 1e-12);

  const PolicyState naive = make_policy(PolicyKind::naive_safe_lucb, cfg, inst);
  EXPECT_EQ(naive.inflation_reward, 1.0);

  const PolicyState wide = make_policy(PolicyKind::inflated_safe_lucb, cfg, inst);
  EXPECT_NEAR(wide.inflation_reward, inflation, 1e-12);

  PolicyOptions opts;
  opts.explore_horizon = 37;
  const PolicyState explorer = make_policy(PolicyKind::safe_lucb, cfg, inst, opts);
  EXPECT_EQ(explorer.explore_horizon, 37);
  EXPECT_EQ(explorer.inflation_reward, 1.0);
}

TEST(PolicyStep, FirstActionIsTrulySafeForEveryKind) {
  // At t = 1 the estimated safe set lies inside the ball of radius C / beta
  // with beta >= sqrt(lambda) S >= S, so the true constraint cannot be hit.
  const ProblemInstance inst = load_fixed_instance("tight_pos");
  const ConfidenceConfig cfg = config_for(inst);
  const PolicyKind kinds[] = {PolicyKind::safe_lts,        PolicyKind::oracle_lts,
                              PolicyKind::dynamic_safe_lts, PolicyKind::naive_safe_lucb,
                              PolicyKind::inflated_safe_lucb, PolicyKind::safe_lucb};
  for (const PolicyKind kind : kinds) {
    PolicyState ps = make_policy(kind, cfg, inst);
    RngStream rng(61);
    const Eigen::VectorXd x = policy_step(ps, 1, rng);
    EXPECT_TRUE(inst.box.contains(x, 1e-9)) << to_string(kind);
    EXPECT_GE(inst.C - inst.mu_star.dot(x), -1e-9) << to_string(kind);
  }
}

TEST(PolicyStep, EstimatedSafeSetNestsInsideTrueSetUnderCoverage) {
  // Whenever the confidence region contains mu_star, every estimated-safe
  // action is truly safe, so the true-constraint optimum dominates the
  // estimated one for the same sampled parameter.
  const ProblemInstance inst = load_fixed_instance("tight_pos");
  const ConfidenceConfig cfg = config_for(inst, 300);
  PolicyState ps = make_policy(PolicyKind::safe_lts, cfg, inst);
  RngStream pol(62), noise(63);
  for (std::int64_t t = 1; t <= 300; ++t) {
    const Eigen::VectorXd x = policy_step(ps, t, pol);
    const StepResult res = env_step(inst, x, noise);
    if (t % 50 == 0) {
      const double beta = beta_radius(cfg, t);
      const Eigen::VectorXd mu_hat = rls_estimate(ps.rls, Channel::safety);
      ASSERT_LE(weighted_norm(mu_hat - inst.mu_star, ps.rls.V), beta);
      const double est = safe_linear_max(
          ps.theta_tilde, SocConstraint::from_state(mu_hat, beta, ps.rls, inst.C), inst.box)
          .value;
      const double truth = linear_max_single_linear_constraint(
          ps.theta_tilde, inst.mu_star, inst.C, inst.box)
          .value;
      EXPECT_GE(truth, est - 1e-6);
    }
    policy_update(ps, x, res.reward, res.side_measurement);
  }
}

TEST(AlphaShrink, ClosedFormAndGuards) {
  const RlsState fresh(1, 1.0);
  Eigen::VectorXd xs(1);
  xs << 1.0;
  EXPECT_NEAR(alpha_shrink(xs, fresh, 1.0, 2.0), 0.5, 1e-15);
  EXPECT_THROW(alpha_shrink(xs, fresh, -1.0, 2.0), std::invalid_argument);
  EXPECT_THROW(alpha_shrink(xs, fresh, 1.0, 0.0), std::invalid_argument);
}

TEST(AlphaShrink, ScaledOptimumStaysInEstimatedSafeSet) {
  // Noiseless side observations keep mu_hat within beta of mu_star, and then
  // alpha x_star satisfies the estimated constraint by the shrinkage algebra.
  const ProblemInstance inst = load_fixed_instance("tight_neg");
  const ConfidenceConfig cfg = config_for(inst);
  RlsState state(2, cfg.lambda);
  RngStream rng(64);
  for (int k = 0; k < 50; ++k) {
    Eigen::VectorXd x(2);
    x << rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0);
    gram_update(state, x, inst.theta_star.dot(x), inst.mu_star.dot(x));
  }
  const double beta = beta_radius(cfg, state.t);
  const Eigen::VectorXd mu_hat = rls_estimate(state, Channel::safety);
  ASSERT_LE(weighted_norm(mu_hat - inst.mu_star, state.V), beta);
  const double alpha = alpha_shrink(inst.x_star, state, beta, inst.C);
  EXPECT_GT(alpha, 0.0);
  EXPECT_LE(alpha, 1.0);
  const SocConstraint con = SocConstraint::from_state(mu_hat, beta, state, inst.C);
  EXPECT_GE(con.margin(alpha * inst.x_star), -1e-9);
}

TEST(SafeLucb, ExplorationPhaseThenGreedy) {
  const ProblemInstance inst = load_fixed_instance("tight_pos");
  const ConfidenceConfig cfg = config_for(inst);
  PolicyOptions opts;
  opts.explore_horizon = 10;
  PolicyState explorer = make_policy(PolicyKind::safe_lucb, cfg, inst, opts);
  PolicyState naive = make_policy(PolicyKind::naive_safe_lucb, cfg, inst);
  RngStream rng(65), noise(66);
  for (std::int64_t t = 1; t <= 10; ++t) {
    const Eigen::VectorXd x = policy_step(explorer, t, rng);
    EXPECT_LE(x.norm(), inst.C / cfg.S + 1e-12);
    EXPECT_TRUE(inst.box.contains(x));
    EXPECT_EQ(explorer.last_value, 0.0);
    const StepResult res = env_step(inst, x, noise);
    policy_update(explorer, x, res.reward, res.side_measurement);
    policy_update(naive, x, res.reward, res.side_measurement);
  }
  // Past the horizon both policies share the state, so the actions coincide.
  RngStream unused(67);
  const Eigen::VectorXd a = policy_step(explorer, 11, unused);
  const Eigen::VectorXd b = policy_step(naive, 11, unused);
  EXPECT_NEAR((a - b).norm(), 0.0, 1e-15);
}

TEST(SafeLucb, ZeroHorizonMatchesNaiveFromTheStart) {
  const ProblemInstance inst = load_fixed_instance("lucb_stress");
  const ConfidenceConfig cfg = config_for(inst);
  PolicyOptions opts;
  opts.explore_horizon = 0;
  PolicyState explorer = make_policy(PolicyKind::safe_lucb, cfg, inst, opts);
  PolicyState naive = make_policy(PolicyKind::naive_safe_lucb, cfg, inst);
  RngStream unused(68);
  const Eigen::VectorXd a = policy_step(explorer, 1, unused);
  const Eigen::VectorXd b = policy_step(naive, 1, unused);
  EXPECT_NEAR((a - b).norm(), 0.0, 1e-15);
}

TEST(PolicyStep, ConfidenceBoundKindsAreDeterministic) {
  const ProblemInstance inst = load_fixed_instance("tight_pos");
  const ConfidenceConfig cfg = config_for(inst);
  PolicyState one = make_policy(PolicyKind::naive_safe_lucb, cfg, inst);
  PolicyState two = one;
  RngStream ra(69), rb(70);  // different streams must not matter
  const Eigen::VectorXd a = policy_step(one, 1, ra);
  const Eigen::VectorXd b = policy_step(two, 1, rb);
  EXPECT_EQ((a - b).norm(), 0.0);
}

TEST(PolicyUpdate, RoutesBothChannels) {
  const ProblemInstance inst = load_fixed_instance("tight_pos");
  const ConfidenceConfig cfg = config_for(inst);
  PolicyState ps = make_policy(PolicyKind::safe_lts, cfg, inst);
  Eigen::VectorXd x(2);
  x << 1.0, 0.0;
  policy_update(ps, x, 1.0, -3.0);
  EXPECT_EQ(ps.rls.t, 2);
  const Eigen::VectorXd theta_hat = rls_estimate(ps.rls, Channel::reward);
  const Eigen::VectorXd mu_hat = rls_estimate(ps.rls, Channel::safety);
  EXPECT_NEAR(theta_hat(0), 0.5, 1e-12);
  EXPECT_NEAR(mu_hat(0), -1.5, 1e-12);
}

TEST(OptimismProbe, OracleKindUsesTrueConstraint) {
  const ProblemInstance inst = load_fixed_instance("tight_pos");
  const ConfidenceConfig cfg = config_for(inst);
  const PolicyState oracle = make_policy(PolicyKind::oracle_lts, cfg, inst);
  // theta_tilde = theta_star makes the probe's solved value exactly opt_value.
  const OptimismRecord rec = optimism_probe(oracle, inst, inst.theta_star);
  EXPECT_TRUE(rec.sampled_optimistic);
  EXPECT_EQ(rec.t, 1);
  EXPECT_GT(rec.alpha, 0.0);
  EXPECT_LE(rec.alpha, 1.0);
  // Fresh estimates are zero, so the z event reduces to the prior bound
  // sqrt(lambda) ||theta_star|| <= beta, which holds at t = 1.
  EXPECT_TRUE(rec.z_event);
}

}  // namespace
}  // namespace safelts
