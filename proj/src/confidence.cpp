#include "safelts/confidence.hpp"

#include <cmath>
#include <stdexcept>

#include "safelts/linalg.hpp"

namespace safelts {

ConfidenceConfig make_confidence_config(double R, double S, double L, int d,
                                        double lambda, double delta, std::int64_t T) {
  if (R < 0.0 || S <= 0.0 || L <= 0.0 || d <= 0 || T < 1) {
    throw std::invalid_argument("make_confidence_config: parameters must be positive");
  }
  if (lambda < 1.0) {
    throw std::invalid_argument("make_confidence_config: lambda must be at least 1");
  }
  if (delta <= 0.0 || delta >= 1.0) {
    throw std::invalid_argument("make_confidence_config: delta must lie in (0,1)");
  }
  ConfidenceConfig cfg;
  cfg.R = R;
  cfg.S = S;
  cfg.L = L;
  cfg.d = d;
  cfg.lambda = lambda;
  cfg.delta = delta;
  cfg.delta_prime = delta / (6.0 * static_cast<double>(T));
  cfg.T = T;
  return cfg;
}

double beta_radius(const ConfidenceConfig& cfg, std::int64_t t) {
  if (t < 1) throw std::invalid_argument("beta_radius: round index must be >= 1");
  const double grow = 1.0 + static_cast<double>(t - 1) * cfg.L * cfg.L / cfg.lambda;
  return cfg.R * std::sqrt(cfg.d * std::log(grow / cfg.delta_prime)) +
         std::sqrt(cfg.lambda) * cfg.S;
}

double gamma_radius(const ConfidenceConfig& cfg, std::int64_t t, double C) {
  if (C <= 0.0) throw std::invalid_argument("gamma_radius: safety level must be positive");
  const double inflation = 1.0 + (2.0 / C) * cfg.L * cfg.S;
  const double conc = std::sqrt(cfg.c * cfg.d * std::log(cfg.c_prime * cfg.d / cfg.delta_prime));
  return beta_radius(cfg, t) * inflation * conc;
}

double safe_margin(const Eigen::VectorXd& x, const Eigen::VectorXd& mu_hat,
                   const RlsState& state, double beta, double C) {
  if (beta < 0.0) throw std::invalid_argument("safe_margin: radius must be nonnegative");
  if (C <= 0.0) throw std::invalid_argument("safe_margin: safety level must be positive");
  return C - x.dot(mu_hat) - beta * weighted_norm(x, state.V_inv);
}

}  // namespace safelts
