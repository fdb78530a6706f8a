#include "safelts/policies.hpp"

#include <cmath>
#include <stdexcept>

#include "safelts/linalg.hpp"

namespace safelts {

PolicyKind policy_kind_from_string(const std::string& name) {
  if (name == "safe_lts") return PolicyKind::safe_lts;
  if (name == "oracle_lts") return PolicyKind::oracle_lts;
  if (name == "dynamic_safe_lts") return PolicyKind::dynamic_safe_lts;
  if (name == "naive_safe_lucb") return PolicyKind::naive_safe_lucb;
  if (name == "inflated_safe_lucb") return PolicyKind::inflated_safe_lucb;
  if (name == "safe_lucb") return PolicyKind::safe_lucb;
  throw std::invalid_argument("unknown policy '" + name + "'");
}

std::string to_string(PolicyKind kind) {
  switch (kind) {
    case PolicyKind::safe_lts: return "safe_lts";
    case PolicyKind::oracle_lts: return "oracle_lts";
    case PolicyKind::dynamic_safe_lts: return "dynamic_safe_lts";
    case PolicyKind::naive_safe_lucb: return "naive_safe_lucb";
    case PolicyKind::inflated_safe_lucb: return "inflated_safe_lucb";
    case PolicyKind::safe_lucb: return "safe_lucb";
  }
  throw std::logic_error("unreachable policy kind");
}

bool is_sampling_policy(PolicyKind kind) {
  return kind == PolicyKind::safe_lts || kind == PolicyKind::oracle_lts ||
         kind == PolicyKind::dynamic_safe_lts;
}

PolicyState make_policy(PolicyKind kind, const ConfidenceConfig& cfg,
                        const ProblemInstance& inst, const PolicyOptions& opts) {
  PolicyState ps;
  ps.kind = kind;
  ps.rls = RlsState(cfg.d, cfg.lambda);
  ps.cfg = cfg;
  ps.C = inst.C;
  ps.box = inst.box;
  ps.solver_tol = opts.solver_tol;
  const double inflation = 1.0 + (2.0 / inst.C) * cfg.L * cfg.S;
  switch (kind) {
    case PolicyKind::safe_lts:
      ps.pert = make_perturbation_spec(cfg.d, inflation);
      break;
    case PolicyKind::oracle_lts:
      ps.pert = make_perturbation_spec(cfg.d, 1.0);
      ps.oracle_mu = inst.mu_star;
      break;
    case PolicyKind::dynamic_safe_lts:
      ps.pert = make_perturbation_spec(cfg.d, inflation, Schedule::linear_decay, cfg.T,
                                       std::min(opts.schedule_floor, inflation));
      break;
    case PolicyKind::naive_safe_lucb:
      ps.inflation_reward = 1.0;
      break;
    case PolicyKind::inflated_safe_lucb:
      ps.inflation_reward = inflation;
      break;
    case PolicyKind::safe_lucb:
      ps.inflation_reward = 1.0;
      ps.explore_horizon = opts.explore_horizon;
      break;
  }
  return ps;
}

Eigen::VectorXd safe_lts_step(PolicyState& state, std::int64_t t, RngStream& rng) {
  const double beta = beta_radius(state.cfg, t);
  const Eigen::VectorXd theta_hat = rls_estimate(state.rls, Channel::reward);
  // Sampling precedes safe-set construction; the draw must not depend on the
  // constraint side of the round.
  const Eigen::VectorXd eta = sample_eta(state.pert, t, rng);
  state.theta_tilde = sample_theta_tilde(theta_hat, beta, state.rls, eta);
  LinearMaxResult r;
  if (state.kind == PolicyKind::oracle_lts) {
    r = linear_max_single_linear_constraint(state.theta_tilde, state.oracle_mu, state.C,
                                            state.box);
  } else {
    const Eigen::VectorXd mu_hat = rls_estimate(state.rls, Channel::safety);
    const SocConstraint con = SocConstraint::from_state(mu_hat, beta, state.rls, state.C);
    r = safe_linear_max(state.theta_tilde, con, state.box, state.solver_tol);
  }
  state.last_value = r.value;
  return r.x;
}

Eigen::VectorXd lucb_step(PolicyState& state, std::int64_t t) {
  const double beta = beta_radius(state.cfg, t);
  const Eigen::VectorXd theta_hat = rls_estimate(state.rls, Channel::reward);
  const Eigen::VectorXd mu_hat = rls_estimate(state.rls, Channel::safety);
  const SocConstraint con = SocConstraint::from_state(mu_hat, beta, state.rls, state.C);
  const LucbResult r = lucb_vertex_argmax(theta_hat, state.inflation_reward * beta,
                                          state.rls, con, state.box, state.solver_tol);
  state.last_value = r.value;
  return r.x;
}

Eigen::VectorXd safe_lucb_step(PolicyState& state, std::int64_t t, RngStream& rng) {
  if (t <= state.explore_horizon) {
    // The ball of radius C/S is safe under any admissible constraint vector.
    const double radius = state.C / state.cfg.S;
    for (int tries = 0; tries < 1000; ++tries) {
      const Eigen::VectorXd x = rng.uniform_in_ball(state.rls.d, radius);
      if (state.box.contains(x)) {
        state.last_value = 0.0;
        return x;
      }
    }
    state.last_value = 0.0;
    return Eigen::VectorXd::Zero(state.rls.d);
  }
  return lucb_step(state, t);
}

Eigen::VectorXd policy_step(PolicyState& state, std::int64_t t, RngStream& rng) {
  switch (state.kind) {
    case PolicyKind::safe_lts:
    case PolicyKind::oracle_lts:
    case PolicyKind::dynamic_safe_lts:
      return safe_lts_step(state, t, rng);
    case PolicyKind::naive_safe_lucb:
    case PolicyKind::inflated_safe_lucb:
      return lucb_step(state, t);
    case PolicyKind::safe_lucb:
      return safe_lucb_step(state, t, rng);
  }
  throw std::logic_error("unreachable policy kind");
}

void policy_update(PolicyState& state, const Eigen::VectorXd& x, double r, double w) {
  gram_update(state.rls, x, r, w);
}

double alpha_shrink(const Eigen::VectorXd& x_star, const RlsState& state, double beta,
                    double C) {
  if (beta < 0.0) throw std::invalid_argument("alpha_shrink: radius must be nonnegative");
  if (C <= 0.0) throw std::invalid_argument("alpha_shrink: safety level must be positive");
  return 1.0 / (1.0 + (2.0 / C) * beta * weighted_norm(x_star, state.V_inv));
}

OptimismRecord optimism_probe(const PolicyState& state, const ProblemInstance& inst,
                              const Eigen::VectorXd& theta_tilde) {
  const std::int64_t t = state.rls.t;
  const double beta = beta_radius(state.cfg, t);
  OptimismRecord rec;
  rec.t = t;
  rec.alpha = alpha_shrink(inst.x_star, state.rls, beta, inst.C);
  double value = 0.0;
  if (state.kind == PolicyKind::oracle_lts) {
    value = linear_max_single_linear_constraint(theta_tilde, inst.mu_star, inst.C, inst.box)
                .value;
  } else {
    const Eigen::VectorXd mu_hat = rls_estimate(state.rls, Channel::safety);
    const SocConstraint con = SocConstraint::from_state(mu_hat, beta, state.rls, inst.C);
    value = safe_linear_max(theta_tilde, con, state.box, state.solver_tol).value;
  }
  rec.sampled_optimistic = value >= inst.opt_value - 1e-9;
  const Eigen::VectorXd theta_hat = rls_estimate(state.rls, Channel::reward);
  const Eigen::VectorXd mu_hat = rls_estimate(state.rls, Channel::safety);
  rec.z_event = weighted_norm(theta_hat - inst.theta_star, state.rls.V) <= beta &&
                weighted_norm(mu_hat - inst.mu_star, state.rls.V) <= beta;
  return rec;
}

}  // namespace safelts
