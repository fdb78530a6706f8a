#pragma once

#include <cstdint>

#include <Eigen/Dense>

namespace safelts {

enum class Channel { reward, safety };

// Online ridge regression state shared by the reward and safety estimators.
// V = lambda*I + sum of x x' over absorbed observations; V_inv tracks the
// inverse through rank-one updates and is refactored every refactor_every
// updates so drift stays below 1e-8.
struct RlsState {
  int d = 0;
  double lambda = 1.0;
  Eigen::MatrixXd V;
  Eigen::MatrixXd V_inv;
  Eigen::VectorXd b_reward;
  Eigen::VectorXd b_safety;
  std::int64_t t = 1;  // number of absorbed observations + 1
  int updates_since_refactor = 0;
  int refactor_every = 256;

  RlsState() = default;
  RlsState(int d, double lambda, int refactor_every = 256);
};

// Absorbs one observation (x, r, w). The rank-one inverse update keeps V_inv
// in sync; a zero x leaves V and both b vectors unchanged but still counts as
// an absorbed round.
void gram_update(RlsState& state, const Eigen::VectorXd& x, double r, double w);

// V_inv * b for the selected channel: theta-hat or mu-hat.
Eigen::VectorXd rls_estimate(const RlsState& state, Channel which);

}  // namespace safelts
