#include "safelts/rls.hpp"

#include <cmath>
#include <stdexcept>

namespace safelts {

RlsState::RlsState(int d_, double lambda_, int refactor_every_)
    : d(d_), lambda(lambda_), refactor_every(refactor_every_) {
  if (d <= 0) throw std::invalid_argument("RlsState: dimension must be positive");
  if (lambda <= 0.0) throw std::invalid_argument("RlsState: lambda must be positive");
  if (refactor_every <= 0) throw std::invalid_argument("RlsState: refactor cadence must be positive");
  V = lambda * Eigen::MatrixXd::Identity(d, d);
  V_inv = (1.0 / lambda) * Eigen::MatrixXd::Identity(d, d);
  b_reward = Eigen::VectorXd::Zero(d);
  b_safety = Eigen::VectorXd::Zero(d);
}

void gram_update(RlsState& state, const Eigen::VectorXd& x, double r, double w) {
  if (x.size() != state.d) {
    throw std::invalid_argument("gram_update: action dimension mismatch");
  }
  if (!x.allFinite() || !std::isfinite(r) || !std::isfinite(w)) {
    throw std::invalid_argument("gram_update: non-finite observation");
  }
  state.V.noalias() += x * x.transpose();
  const Eigen::VectorXd Vx = state.V_inv * x;
  const double denom = 1.0 + x.dot(Vx);
  state.V_inv.noalias() -= (Vx * Vx.transpose()) / denom;
  state.b_reward.noalias() += r * x;
  state.b_safety.noalias() += w * x;
  state.t += 1;
  if (++state.updates_since_refactor >= state.refactor_every) {
    state.V_inv = state.V.llt().solve(Eigen::MatrixXd::Identity(state.d, state.d));
    state.updates_since_refactor = 0;
  }
}

Eigen::VectorXd rls_estimate(const RlsState& state, Channel which) {
  return state.V_inv * (which == Channel::reward ? state.b_reward : state.b_safety);
}

}  // namespace safelts
