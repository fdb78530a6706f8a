#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "safelts/rng.hpp"
#include "safelts/solver.hpp"

namespace safelts {

// Ground truth the learner never sees directly: the reward and constraint
// vectors, the safety level, and the cached optimal safe action.
struct ProblemInstance {
  std::string name;
  Eigen::VectorXd theta_star;
  Eigen::VectorXd mu_star;
  double C = 0.0;
  BoxSet box;
  double R = 0.1;
  double S = 1.0;  // ||theta_star|| <= S and ||mu_star|| <= S
  double L = 0.0;  // action norm bound from the box
  Eigen::VectorXd x_star;
  double opt_value = 0.0;

  int dim() const { return static_cast<int>(theta_star.size()); }
};

struct InstanceGenConfig {
  int d = 2;
  BoxSet box;
  double R = 0.1;
  double c_min = 0.05;  // keeps the inflation factor 1 + 2LS/C bounded
  double c_max = 1.0;
};

// Random instance: direction-uniform unit-norm parameters (so S = 1) and a
// safety level uniform on [c_min, c_max]. The optimal safe action is solved
// and cached.
ProblemInstance make_instance(const InstanceGenConfig& cfg, RngStream& rng);

// Fully specified instance; validates the norm bounds and caches the optimum.
ProblemInstance make_fixed_instance(std::string name, Eigen::VectorXd theta_star,
                                    Eigen::VectorXd mu_star, double C, BoxSet box,
                                    double R);

// Named instances used by the comparison experiments. "tight_pos" and
// "tight_neg" are a pair with a low safety level and an active constraint at
// the optimum, differing in the sign of the second constraint coordinate;
// "lucb_stress" has a nearly uninformative constraint direction that slows
// confidence-bound baselines far more than sampling-based policies.
std::vector<std::string> fixed_instance_names();
ProblemInstance load_fixed_instance(const std::string& name, double R = 0.1);

// Exact solve of the true safe linear program for this instance.
LinearMaxResult optimal_safe_action(const ProblemInstance& inst);

struct StepResult {
  double reward = 0.0;
  double side_measurement = 0.0;
  bool violated = false;
  double inst_regret = 0.0;
};

// One environment interaction: Gaussian noise of scale R on both channels,
// exact bookkeeping of the true constraint. Rejects actions outside the box.
StepResult env_step(const ProblemInstance& inst, const Eigen::VectorXd& x, RngStream& rng);

}  // namespace safelts
