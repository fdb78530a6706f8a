#include "safelts/linalg.hpp"

#include <cmath>
#include <stdexcept>

namespace safelts {

double weighted_norm(const Eigen::VectorXd& x, const Eigen::MatrixXd& M) {
  if (M.rows() != M.cols() || M.rows() != x.size()) {
    throw std::invalid_argument("weighted_norm: dimension mismatch");
  }
  const double asym = (M - M.transpose()).cwiseAbs().maxCoeff();
  if (asym > 1e-10) {
    throw std::invalid_argument("weighted_norm: matrix is not symmetric");
  }
  double q = x.dot(M * x);
  if (q < 0.0) {
    // PSD in exact arithmetic; only rounding noise may be negative here.
    const double scale = 1.0 + x.squaredNorm() * M.cwiseAbs().maxCoeff();
    if (q < -1e-9 * scale) {
      throw std::invalid_argument("weighted_norm: matrix is not positive semidefinite");
    }
    q = 0.0;
  }
  return std::sqrt(q);
}

Eigen::MatrixXd inv_sqrt_factor(const Eigen::MatrixXd& V) {
  if (V.rows() != V.cols()) {
    throw std::invalid_argument("inv_sqrt_factor: matrix must be square");
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(V);
  if (es.info() != Eigen::Success) {
    throw std::runtime_error("inv_sqrt_factor: eigendecomposition failed");
  }
  const Eigen::VectorXd& ev = es.eigenvalues();
  if (ev.minCoeff() < 1e-12) {
    throw std::runtime_error("inv_sqrt_factor: matrix is numerically singular");
  }
  const Eigen::VectorXd inv_sqrt = ev.array().rsqrt();
  return es.eigenvectors() * inv_sqrt.asDiagonal() * es.eigenvectors().transpose();
}

double elliptical_potential(
    const std::vector<std::pair<Eigen::VectorXd, Eigen::MatrixXd>>& history) {
  double sum = 0.0;
  for (const auto& [x, V] : history) {
    const Eigen::VectorXd y = V.llt().solve(x);
    sum += x.dot(y);
  }
  return sum;
}

double elliptical_potential_bound(std::int64_t t, int d, double L, double lambda) {
  if (d <= 0 || L <= 0.0 || lambda <= 0.0) {
    throw std::invalid_argument("elliptical_potential_bound: parameters must be positive");
  }
  return 2.0 * d * std::log(1.0 + static_cast<double>(t) * L * L / lambda);
}

}  // namespace safelts
