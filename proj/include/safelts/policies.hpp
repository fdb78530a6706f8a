#pragma once

#include <cstdint>
#include <string>

#include <Eigen/Dense>

#include "safelts/confidence.hpp"
#include "safelts/environment.hpp"
#include "safelts/perturbation.hpp"
#include "safelts/rls.hpp"
#include "safelts/rng.hpp"
#include "safelts/solver.hpp"

namespace safelts {

enum class PolicyKind {
  safe_lts,
  oracle_lts,
  dynamic_safe_lts,
  naive_safe_lucb,
  inflated_safe_lucb,
  safe_lucb,
};

PolicyKind policy_kind_from_string(const std::string& name);
std::string to_string(PolicyKind kind);
bool is_sampling_policy(PolicyKind kind);

// Per-episode learner state. The estimated constraint comes from the safety
// channel of `rls`; the oracle variant carries the true constraint vector
// instead and never inflates its sampler.
struct PolicyState {
  PolicyKind kind = PolicyKind::safe_lts;
  RlsState rls;
  ConfidenceConfig cfg;
  PerturbationSpec pert;
  double inflation_reward = 1.0;     // confidence-bound kinds only
  std::int64_t explore_horizon = 0;  // pure-exploration rounds for safe_lucb
  double C = 0.0;
  BoxSet box;
  Eigen::VectorXd oracle_mu;  // set only for oracle_lts
  double solver_tol = 1e-6;

  // Diagnostics from the latest step.
  Eigen::VectorXd theta_tilde;
  double last_value = 0.0;  // objective of the played action under the step's parameter
};

struct PolicyOptions {
  double schedule_floor = 1.0;
  std::int64_t explore_horizon = 200;
  double solver_tol = 1e-6;
};

// Assembles the state for one episode on the given instance. Only the public
// quantities of the instance are used (C, box, noise scale, norm bounds),
// except for the oracle variant which receives the true constraint vector.
PolicyState make_policy(PolicyKind kind, const ConfidenceConfig& cfg,
                        const ProblemInstance& inst, const PolicyOptions& opts = {});

// Round-t action of the configured policy. Sampling policies draw from `rng`;
// confidence-bound policies ignore it except during pure exploration.
Eigen::VectorXd policy_step(PolicyState& state, std::int64_t t, RngStream& rng);

Eigen::VectorXd safe_lts_step(PolicyState& state, std::int64_t t, RngStream& rng);
Eigen::VectorXd lucb_step(PolicyState& state, std::int64_t t);
Eigen::VectorXd safe_lucb_step(PolicyState& state, std::int64_t t, RngStream& rng);

// Absorbs the round's observations into the shared regression state.
void policy_update(PolicyState& state, const Eigen::VectorXd& x, double r, double w);

// Largest alpha in (0,1] with alpha * x_star inside the shrunk safe set:
// 1 / (1 + (2/C) beta ||x_star||_{V^{-1}}).
double alpha_shrink(const Eigen::VectorXd& x_star, const RlsState& state, double beta,
                    double C);

struct OptimismRecord {
  std::int64_t t = 0;
  double alpha = 1.0;
  bool sampled_optimistic = false;
  bool z_event = false;
};

// Simulation-only diagnostic: did the sampled parameter's best safe value
// dominate the true optimum, and were both estimates inside their confidence
// regions at this round.
OptimismRecord optimism_probe(const PolicyState& state, const ProblemInstance& inst,
                              const Eigen::VectorXd& theta_tilde);

}  // namespace safelts
