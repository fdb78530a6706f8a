#include "safelts/perturbation.hpp"

#include <cmath>
#include <stdexcept>

#include "safelts/linalg.hpp"

namespace safelts {

PerturbationSpec make_perturbation_spec(int d, double inflation, Schedule schedule,
                                        std::int64_t T, double floor) {
  if (d <= 0) throw std::invalid_argument("make_perturbation_spec: dimension must be positive");
  if (inflation < 1.0) {
    throw std::invalid_argument("make_perturbation_spec: inflation must be at least 1");
  }
  if (floor <= 0.0 || floor > inflation) {
    throw std::invalid_argument("make_perturbation_spec: floor must lie in (0, inflation]");
  }
  if (schedule == Schedule::linear_decay && T < 1) {
    throw std::invalid_argument("make_perturbation_spec: decaying schedule needs a horizon");
  }
  PerturbationSpec spec;
  spec.d = d;
  spec.inflation = inflation;
  spec.schedule = schedule;
  spec.T = T;
  spec.floor = floor;
  return spec;
}

double optimism_probability(const PerturbationSpec&) { return normal_cdf(-1.0); }

double perturbation_scale(const PerturbationSpec& spec, std::int64_t t) {
  if (spec.schedule == Schedule::static_scale) return spec.inflation;
  if (t > spec.T) {
    throw std::invalid_argument("perturbation_scale: round beyond the schedule horizon");
  }
  const double frac = 1.0 - static_cast<double>(t) / static_cast<double>(spec.T);
  return std::max(spec.floor, spec.inflation * frac);
}

Eigen::VectorXd sample_eta(const PerturbationSpec& spec, std::int64_t t, RngStream& rng) {
  const double sigma = perturbation_scale(spec, t);
  return sigma * rng.normal_vector(spec.d);
}

Eigen::VectorXd sample_theta_tilde(const Eigen::VectorXd& theta_hat, double beta,
                                   const RlsState& state, const Eigen::VectorXd& eta) {
  if (beta < 0.0) throw std::invalid_argument("sample_theta_tilde: radius must be nonnegative");
  if (eta.size() != state.d || theta_hat.size() != state.d) {
    throw std::invalid_argument("sample_theta_tilde: dimension mismatch");
  }
  return theta_hat + beta * (inv_sqrt_factor(state.V) * eta);
}

TailQuery TailQuery::anti_conc(Eigen::VectorXd u, double threshold) {
  TailQuery q;
  q.mode = TailMode::anti_conc;
  q.u = std::move(u);
  q.threshold = threshold;
  return q;
}

TailQuery TailQuery::conc(double bound) {
  TailQuery q;
  q.mode = TailMode::conc;
  q.threshold = bound;
  return q;
}

TailEstimate tail_probability_estimate(const PerturbationSpec& spec, const TailQuery& query,
                                       std::int64_t n, RngStream& rng) {
  if (n < 10000) {
    throw std::invalid_argument("tail_probability_estimate: need at least 1e4 samples");
  }
  if (query.mode == TailMode::anti_conc) {
    if (query.u.size() != spec.d) {
      throw std::invalid_argument("tail_probability_estimate: direction dimension mismatch");
    }
    if (std::abs(query.u.norm() - 1.0) > 1e-8) {
      throw std::invalid_argument("tail_probability_estimate: direction must be unit norm");
    }
  }
  const double sigma = perturbation_scale(spec, 1);
  std::int64_t hits = 0;
  if (query.mode == TailMode::anti_conc) {
    for (std::int64_t i = 0; i < n; ++i) {
      double dot = 0.0;
      for (int k = 0; k < spec.d; ++k) dot += query.u(k) * (sigma * rng.normal());
      if (dot >= query.threshold) ++hits;
    }
  } else {
    for (std::int64_t i = 0; i < n; ++i) {
      double sq = 0.0;
      for (int k = 0; k < spec.d; ++k) {
        const double z = sigma * rng.normal();
        sq += z * z;
      }
      if (std::sqrt(sq) <= query.threshold) ++hits;
    }
  }
  TailEstimate out;
  out.estimate = static_cast<double>(hits) / static_cast<double>(n);
  out.std_error = std::sqrt(out.estimate * (1.0 - out.estimate) / static_cast<double>(n));
  return out;
}

}  // namespace safelts
