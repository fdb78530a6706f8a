#pragma once

#include <cstdint>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "safelts/environment.hpp"
#include "safelts/policies.hpp"

namespace safelts {

// Everything a batch needs. A zero delta means the 1/(4T) default; an empty
// box means [-1,1]^d. Instance selection: a named fixed instance, an inline
// instance, or (default) a fresh random instance per seed.
struct ExperimentConfig {
  std::int64_t T = 2000;
  int d = 2;
  Eigen::VectorXd box_lower;
  Eigen::VectorXd box_upper;
  double R = 0.1;
  double lambda = 1.0;
  double delta = 0.0;
  std::vector<PolicyKind> policies = {PolicyKind::safe_lts, PolicyKind::oracle_lts,
                                      PolicyKind::naive_safe_lucb,
                                      PolicyKind::inflated_safe_lucb};
  int n_seeds = 20;
  std::uint64_t base_seed = 0;
  std::string instance_name;
  bool has_inline_instance = false;
  Eigen::VectorXd inline_theta;
  Eigen::VectorXd inline_mu;
  double inline_C = 0.0;
  double schedule_floor = 1.0;
  std::int64_t explore_horizon = 200;
  double solver_tol = 1e-6;
  std::string out_dir = "out";
  std::int64_t checkpoint_every = 0;

  BoxSet box() const;
  double effective_delta() const;
};

// Small and fast defaults for interactive use.
ExperimentConfig desk_profile();
// Full-scale experiment configuration: T = 10000, d = 4, delta = 1/(4T).
ExperimentConfig full_profile();
ExperimentConfig profile_by_name(const std::string& name);

// Overlays JSON fields from a config file; unknown keys are rejected.
void apply_config_json(ExperimentConfig& cfg, const std::string& path);

struct RoundRecord {
  std::int64_t t = 0;
  Eigen::VectorXd x;
  double reward = 0.0;
  double side_measurement = 0.0;
  double true_margin = 0.0;
  double inst_regret = 0.0;
  double cum_regret = 0.0;
  bool violated = false;
  bool optimistic = false;
  bool z_event = false;  // both estimates inside their confidence regions so far
  bool e_hat = false;    // reward estimate inside its region at this round
  bool z_hat = false;    // safety estimate inside its region at this round
  bool e_tilde = false;  // sampled parameter within gamma_t of theta-hat
};

struct EpisodeLog {
  std::string run_id;
  PolicyKind policy = PolicyKind::safe_lts;
  std::uint64_t seed_index = 0;
  std::string instance_name;
  std::vector<RoundRecord> rounds;
  std::int64_t violations = 0;
  double final_regret = 0.0;
  double potential = 0.0;        // sum of ||x_t||^2 in the pre-update inverse metric
  double potential_bound = 0.0;  // 2 d log(1 + T L^2 / lambda)
  bool coverage_all_rounds = true;
  bool failed = false;
  std::string error;
};

// One seeded episode. The instance and noise streams depend only on
// (base_seed, seed_index), so different policies on the same seed index face
// identical environments; the policy stream adds the policy name to the hash.
EpisodeLog run_episode(const ExperimentConfig& cfg, PolicyKind kind,
                       std::uint64_t seed_index);

struct PolicySummary {
  std::string policy;
  std::vector<double> regret_mean;
  std::vector<double> regret_std;
  std::int64_t violations = 0;
  double optimism_frequency = 0.0;
  double coverage_rate = 0.0;
  double max_potential_ratio = 0.0;
  int episodes = 0;
  int failed_episodes = 0;
  double wall_clock_seconds = 0.0;
  double final_regret_mean = 0.0;
  double final_regret_std = 0.0;
};

struct BatchSummary {
  std::vector<PolicySummary> policies;
  bool any_failed = false;

  const PolicySummary& for_policy(PolicyKind kind) const;
};

// Runs n_seeds episodes per configured policy in a fixed order, feeding every
// finished episode to the sink (when given) before aggregation discards it.
BatchSummary run_batch(const ExperimentConfig& cfg,
                       const std::function<void(const EpisodeLog&)>& sink = nullptr);

// Batch plus file outputs (curves.csv, summary.json, plot.gp) in cfg.out_dir.
// When the outputs already exist the run is skipped unless force is set.
// Returns a process exit code: nonzero iff any episode failed.
int run_batch_to_dir(const ExperimentConfig& cfg, bool force);

void write_csv_header(std::FILE* f);
void write_episode_rows(std::FILE* f, const EpisodeLog& log);
void write_summary_json(const ExperimentConfig& cfg, const BatchSummary& summary,
                        const std::string& path);
void write_plot_script(const ExperimentConfig& cfg, const BatchSummary& summary,
                       const std::string& path);

// Least-squares slope of log(mean regret) against log(t) over [t_lo, t_hi].
double loglog_slope(const std::vector<double>& regret_mean, std::int64_t t_lo,
                    std::int64_t t_hi);

// A random planar problem for solver cross-checks: Gaussian objective, a
// constraint direction of norm in [0.2, 1], a metric from a short stream of
// box-uniform rank-one updates, and a radius that is sometimes zero.
struct SolverCase {
  Eigen::VectorXd c;
  SocConstraint con;
  BoxSet box;
};

SolverCase random_solver_case(RngStream& rng);

struct VerifyEntry {
  std::string name;
  double value = 0.0;
  double threshold = 0.0;
  bool pass = false;
  std::string detail;
};

struct VerifyReport {
  std::vector<VerifyEntry> entries;
  bool all_pass() const;
};

// Statistical property suite: perturbation tails, confidence coverage,
// the potential bound, optimism frequency, and solver-versus-oracle checks.
VerifyReport verify_properties(const ExperimentConfig& cfg);

void write_verify_json(const VerifyReport& report, const std::string& path);

}  // namespace safelts
