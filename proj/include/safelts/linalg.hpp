#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace safelts {

// sqrt(x' M x) for symmetric positive semidefinite M. Rejects asymmetric M
// (max-abs tolerance 1e-10); quadratic values that are negative by rounding
// only are clamped to zero.
double weighted_norm(const Eigen::VectorXd& x, const Eigen::MatrixXd& M);

// Symmetric inverse square root of an SPD matrix via eigendecomposition.
// Throws if any eigenvalue falls below 1e-12. Satisfies W * V * W = I.
Eigen::MatrixXd inv_sqrt_factor(const Eigen::MatrixXd& V);

// Sum over the history of ||x_s||^2 in the metric of V_s^{-1}, where V_s is
// the Gram matrix in effect when x_s was chosen.
double elliptical_potential(
    const std::vector<std::pair<Eigen::VectorXd, Eigen::MatrixXd>>& history);

// 2 d log(1 + t L^2 / lambda), the deterministic cap on the potential.
double elliptical_potential_bound(std::int64_t t, int d, double L, double lambda);

}  // namespace safelts
