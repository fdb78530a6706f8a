#pragma once

#include <functional>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

#include "safelts/rls.hpp"

namespace safelts {

// Axis-aligned action set. Must contain the origin, which keeps every safety
// constraint feasible.
struct BoxSet {
  Eigen::VectorXd lower;
  Eigen::VectorXd upper;

  BoxSet() = default;
  BoxSet(Eigen::VectorXd lower, Eigen::VectorXd upper);
  static BoxSet centered(int d, double half_width);

  int dim() const { return static_cast<int>(lower.size()); }
  // Largest Euclidean norm over corners; the action norm bound L.
  double corner_norm_bound() const;
  bool contains(const Eigen::VectorXd& x, double tol = 0.0) const;
  Eigen::VectorXd clamp(const Eigen::VectorXd& x) const;
};

// One second-order-cone constraint a'x + radius * ||x||_{V^{-1}} <= level.
// V and V_inv describe the metric; with radius 0 the metric is unused and the
// constraint degenerates to a half-space.
struct SocConstraint {
  Eigen::VectorXd a;
  double radius = 0.0;
  Eigen::MatrixXd V;
  Eigen::MatrixXd V_inv;
  double level = 0.0;

  SocConstraint() = default;
  // Computes V_inv from V once; fine at the dimensions this library targets.
  SocConstraint(Eigen::VectorXd a, double radius, Eigen::MatrixXd V, double level);
  static SocConstraint from_state(Eigen::VectorXd a, double radius, const RlsState& state,
                                  double level);
  static SocConstraint half_space(Eigen::VectorXd a, double level);

  // level - a'x - radius * ||x||_{V^{-1}}; feasible iff >= 0.
  double margin(const Eigen::VectorXd& x) const;
};

struct LinearMaxResult {
  Eigen::VectorXd x;
  double value = 0.0;
};

// Exact maximizer of c'x over {a'x <= level} intersected with the box, by the
// fractional greedy: start at the corner favored by c, then retreat along the
// cheapest coordinates (smallest |c_i|/|a_i|, ties to the lowest index) until
// feasible. Feasibility of the result holds in double arithmetic, not just in
// exact arithmetic.
LinearMaxResult linear_max_single_linear_constraint(const Eigen::VectorXd& c,
                                                    const Eigen::VectorXd& a, double level,
                                                    const BoxSet& box);

// One projected-subgradient pass on x -> c'x - lam_dual * (a'x + radius *
// ||x||_{V^{-1}} - level) over the box. Step size scale/(k+1); stops when the
// objective moves by less than 1e-9 or after 5000 iterations; returns the best
// iterate seen.
Eigen::VectorXd penalized_inner_max(const Eigen::VectorXd& c, const SocConstraint& con,
                                    double lam_dual, const BoxSet& box);

// Raised when the dual search exhausts its budget; carries the best feasible
// point found so callers can degrade gracefully.
class SolverError : public std::runtime_error {
 public:
  SolverError(const std::string& what, Eigen::VectorXd best_x, double best_value, int steps)
      : std::runtime_error(what), best_x_(std::move(best_x)), best_value_(best_value),
        steps_(steps) {}
  const Eigen::VectorXd& best_x() const { return best_x_; }
  double best_value() const { return best_value_; }
  int steps() const { return steps_; }

 private:
  Eigen::VectorXd best_x_;
  double best_value_ = 0.0;
  int steps_ = 0;
};

// Maximizes c'x over the box intersected with the cone constraint. Unconstrained
// corner shortcut, then bisection on the dual multiplier with a feasibility
// back-off along the ray from the origin at every iterate; stops on a small
// constraint residual or a closed duality gap. The returned point is feasible
// in double arithmetic up to tol.
LinearMaxResult safe_linear_max(const Eigen::VectorXd& c, const SocConstraint& con,
                                const BoxSet& box, double tol = 1e-6);

// Exhaustive lattice search, the test oracle. Restricted to d <= 3.
LinearMaxResult grid_oracle(const Eigen::VectorXd& c,
                            const std::function<bool(const Eigen::VectorXd&)>& feasible,
                            const BoxSet& box, double step);

struct LucbResult {
  Eigen::VectorXd x;
  Eigen::VectorXd theta_vertex;
  double value = 0.0;
};

// Optimistic action over the safe set: enumerates the 2d extreme points
// theta_hat +- beta * sqrt(d) * V^{-1/2} e_i of the ell-1 confidence set and
// keeps the best safe_linear_max solution. The sqrt(d) widening contains the
// ell-2 ball of radius beta.
LucbResult lucb_vertex_argmax(const Eigen::VectorXd& theta_hat, double beta_reward,
                              const RlsState& state, const SocConstraint& con,
                              const BoxSet& box, double tol = 1e-6);

}  // namespace safelts
