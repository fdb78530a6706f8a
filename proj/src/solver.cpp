#include "safelts/solver.hpp"

#include "safelts/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

namespace safelts {

namespace {

Eigen::VectorXd sign_corner(const Eigen::VectorXd& c, const BoxSet& box) {
  const int d = box.dim();
  Eigen::VectorXd x(d);
  for (int i = 0; i < d; ++i) x(i) = c(i) >= 0.0 ? box.upper(i) : box.lower(i);
  return x;
}

double norm_in(const Eigen::MatrixXd& M, const Eigen::VectorXd& x) {
  const double q = x.dot(M * x);
  return std::sqrt(q > 0.0 ? q : 0.0);
}

// Exact maximizer of b'x - s * ||x||_M over a 2-d box. The objective is
// concave, so the maximum sits at the origin kink or on the box boundary;
// every edge restriction reduces to a quadratic in the edge parameter whose
// roots are closed-form. Candidate order is fixed, so ties resolve
// deterministically.
Eigen::Vector2d inner_max_2d(const Eigen::Vector2d& b, double s, const Eigen::Matrix2d& M,
                             const Eigen::Vector2d& lo, const Eigen::Vector2d& hi) {
  const auto h = [&](const Eigen::Vector2d& x) {
    const double q = x.dot(M * x);
    return b.dot(x) - s * std::sqrt(q > 0.0 ? q : 0.0);
  };
  Eigen::Vector2d best = Eigen::Vector2d::Zero();
  double best_h = 0.0;  // h(0) = 0 and the origin is always inside the box
  const auto consider = [&](const Eigen::Vector2d& x) {
    const double v = h(x);
    if (v > best_h) {
      best_h = v;
      best = x;
    }
  };
  for (int fixed = 0; fixed < 2; ++fixed) {
    const int free_ = 1 - fixed;
    for (int side = 0; side < 2; ++side) {
      Eigen::Vector2d p;
      p(fixed) = side == 0 ? lo(fixed) : hi(fixed);
      p(free_) = lo(free_);
      Eigen::Vector2d u = Eigen::Vector2d::Zero();
      u(free_) = hi(free_) - lo(free_);
      consider(p);
      consider(Eigen::Vector2d(p + u));
      if (s <= 0.0) continue;  // linear on the edge, endpoints suffice
      const double q2 = u.dot(M * u);
      if (q2 <= 0.0) continue;
      const double q1 = u.dot(M * p);
      const double q0 = p.dot(M * p);
      const double g = b.dot(u);
      // Stationary points satisfy s^2 (q1 + q2 t)^2 = g^2 (q0 + 2 q1 t + q2 t^2).
      const double k = s * s * q2 - g * g;
      const double A = q2 * k;
      const double B = 2.0 * q1 * k;
      const double C = s * s * q1 * q1 - g * g * q0;
      if (std::abs(A) > 0.0) {
        const double disc = B * B - 4.0 * A * C;
        if (disc >= 0.0) {
          const double sq = std::sqrt(disc);
          const double r1 = (-B - sq) / (2.0 * A);
          const double r2 = (-B + sq) / (2.0 * A);
          if (r1 > 0.0 && r1 < 1.0) consider(Eigen::Vector2d(p + r1 * u));
          if (r2 > 0.0 && r2 < 1.0) consider(Eigen::Vector2d(p + r2 * u));
        }
      } else if (std::abs(B) > 0.0) {
        const double r = -C / B;
        if (r > 0.0 && r < 1.0) consider(Eigen::Vector2d(p + r * u));
      }
    }
  }
  return best;
}

// Iterative fallback for d >= 3: short subgradient burn-in, then a monotone
// projected-gradient polish from the best iterate.
Eigen::VectorXd inner_max_iterative(const Eigen::VectorXd& b, double s,
                                    const Eigen::MatrixXd& M, const BoxSet& box,
                                    const Eigen::VectorXd& warm) {
  const auto h = [&](const Eigen::VectorXd& x) { return b.dot(x) - s * norm_in(M, x); };
  const double extent = (box.upper - box.lower).maxCoeff();
  const double gbound = b.norm() + s * std::sqrt(M.trace());
  if (gbound <= 0.0) return Eigen::VectorXd::Zero(box.dim());
  const double scale = extent / gbound;
  Eigen::VectorXd x = warm;
  Eigen::VectorXd best = x;
  double best_h = h(x);
  for (int k = 0; k < 64; ++k) {
    Eigen::VectorXd grad = b;
    const double q = x.dot(M * x);
    if (q > 0.0) grad -= (s / std::sqrt(q)) * (M * x);
    x = box.clamp(x + (scale / (k + 1)) * grad);
    const double v = h(x);
    if (v > best_h) {
      best_h = v;
      best = x;
    }
  }
  double step = scale;
  for (int k = 0; k < 80 && step > 1e-14 * scale; ++k) {
    Eigen::VectorXd grad = b;
    const double q = best.dot(M * best);
    if (q > 0.0) grad -= (s / std::sqrt(q)) * (M * best);
    const Eigen::VectorXd trial = box.clamp(best + step * grad);
    const double v = h(trial);
    if (v > best_h) {
      best_h = v;
      best = trial;
      step *= 1.5;
    } else {
      step *= 0.5;
    }
  }
  return best;
}

}  // namespace

BoxSet::BoxSet(Eigen::VectorXd lower_, Eigen::VectorXd upper_)
    : lower(std::move(lower_)), upper(std::move(upper_)) {
  if (lower.size() != upper.size() || lower.size() == 0) {
    throw std::invalid_argument("BoxSet: bounds must share a positive dimension");
  }
  for (int i = 0; i < lower.size(); ++i) {
    if (lower(i) > upper(i)) throw std::invalid_argument("BoxSet: lower bound above upper");
    if (lower(i) > 0.0 || upper(i) < 0.0) {
      throw std::invalid_argument("BoxSet: the box must contain the origin");
    }
  }
}

BoxSet BoxSet::centered(int d, double half_width) {
  if (d <= 0 || half_width <= 0.0) {
    throw std::invalid_argument("BoxSet::centered: need positive dimension and width");
  }
  return BoxSet(Eigen::VectorXd::Constant(d, -half_width),
                Eigen::VectorXd::Constant(d, half_width));
}

double BoxSet::corner_norm_bound() const {
  double sq = 0.0;
  for (int i = 0; i < lower.size(); ++i) {
    sq += std::max(lower(i) * lower(i), upper(i) * upper(i));
  }
  return std::sqrt(sq);
}

bool BoxSet::contains(const Eigen::VectorXd& x, double tol) const {
  if (x.size() != lower.size()) return false;
  for (int i = 0; i < x.size(); ++i) {
    if (x(i) < lower(i) - tol || x(i) > upper(i) + tol) return false;
  }
  return true;
}

Eigen::VectorXd BoxSet::clamp(const Eigen::VectorXd& x) const {
  return x.cwiseMax(lower).cwiseMin(upper);
}

SocConstraint::SocConstraint(Eigen::VectorXd a_, double radius_, Eigen::MatrixXd V_,
                             double level_)
    : a(std::move(a_)), radius(radius_), V(std::move(V_)), level(level_) {
  if (radius < 0.0) throw std::invalid_argument("SocConstraint: radius must be nonnegative");
  if (level <= 0.0) throw std::invalid_argument("SocConstraint: level must be positive");
  if (radius > 0.0) {
    if (V.rows() != a.size() || V.cols() != a.size()) {
      throw std::invalid_argument("SocConstraint: metric dimension mismatch");
    }
    V_inv = V.llt().solve(Eigen::MatrixXd::Identity(V.rows(), V.cols()));
  } else {
    V = Eigen::MatrixXd::Identity(a.size(), a.size());
    V_inv = V;
  }
}

SocConstraint SocConstraint::from_state(Eigen::VectorXd a_, double radius_,
                                        const RlsState& state, double level_) {
  if (radius_ < 0.0) throw std::invalid_argument("SocConstraint: radius must be nonnegative");
  if (level_ <= 0.0) throw std::invalid_argument("SocConstraint: level must be positive");
  SocConstraint con;
  con.a = std::move(a_);
  con.radius = radius_;
  con.V = state.V;
  con.V_inv = state.V_inv;
  con.level = level_;
  return con;
}

SocConstraint SocConstraint::half_space(Eigen::VectorXd a_, double level_) {
  SocConstraint con;
  con.a = std::move(a_);
  con.radius = 0.0;
  con.V = Eigen::MatrixXd::Identity(con.a.size(), con.a.size());
  con.V_inv = con.V;
  con.level = level_;
  if (level_ <= 0.0) throw std::invalid_argument("SocConstraint: level must be positive");
  return con;
}

double SocConstraint::margin(const Eigen::VectorXd& x) const {
  double m = level - a.dot(x);
  if (radius > 0.0) m -= radius * norm_in(V_inv, x);
  return m;
}

LinearMaxResult linear_max_single_linear_constraint(const Eigen::VectorXd& c,
                                                    const Eigen::VectorXd& a, double level,
                                                    const BoxSet& box) {
  const int d = box.dim();
  if (c.size() != d || a.size() != d) {
    throw std::invalid_argument("linear_max_single_linear_constraint: dimension mismatch");
  }
  if (level <= 0.0) {
    throw std::invalid_argument("linear_max_single_linear_constraint: level must be positive");
  }
  Eigen::VectorXd x = sign_corner(c, box);
  double dot = a.dot(x);
  if (dot > level) {
    // Rank the coordinates whose retreat toward the opposite face lowers a'x;
    // the cheapest reward loss per unit of constraint reduction goes first.
    struct Move {
      double ratio;
      int i;
    };
    std::vector<Move> moves;
    moves.reserve(d);
    for (int i = 0; i < d; ++i) {
      const double opp = x(i) == box.upper(i) ? box.lower(i) : box.upper(i);
      if (a(i) * (opp - x(i)) < 0.0) moves.push_back({std::abs(c(i)) / std::abs(a(i)), i});
    }
    std::sort(moves.begin(), moves.end(), [](const Move& lhs, const Move& rhs) {
      return lhs.ratio != rhs.ratio ? lhs.ratio < rhs.ratio : lhs.i < rhs.i;
    });
    for (const Move& mv : moves) {
      if (dot <= level) break;
      const int i = mv.i;
      const double opp = x(i) == box.upper(i) ? box.lower(i) : box.upper(i);
      const double excess = dot - level;
      const double full_reduction = -(a(i) * (opp - x(i)));
      if (full_reduction >= excess) {
        x(i) -= excess / a(i);
        dot = a.dot(x);
        // Squeeze out the rounding residue so feasibility holds in doubles.
        for (int guard = 0; guard < 4 && dot > level; ++guard) {
          x(i) -= (dot - level) / a(i);
          x(i) = std::clamp(x(i), box.lower(i), box.upper(i));
          dot = a.dot(x);
        }
      } else {
        x(i) = opp;
        dot = a.dot(x);
      }
    }
  }
  return {x, c.dot(x)};
}

Eigen::VectorXd penalized_inner_max(const Eigen::VectorXd& c, const SocConstraint& con,
                                    double lam_dual, const BoxSet& box) {
  if (lam_dual < 0.0) {
    throw std::invalid_argument("penalized_inner_max: multiplier must be nonnegative");
  }
  const int d = box.dim();
  if (c.size() != d || con.a.size() != d) {
    throw std::invalid_argument("penalized_inner_max: dimension mismatch");
  }
  const Eigen::VectorXd b = c - lam_dual * con.a;
  const double s = lam_dual * con.radius;
  // The norm term dominates every linear gain once s reaches the dual norm of
  // b, and then the origin is the exact maximizer.
  if (s > 0.0 && b.dot(con.V * b) <= s * s) return Eigen::VectorXd::Zero(d);
  const auto h = [&](const Eigen::VectorXd& x) { return b.dot(x) - s * norm_in(con.V_inv, x); };
  const double extent = (box.upper - box.lower).maxCoeff();
  const double gbound = b.norm() + s * std::sqrt(con.V_inv.trace());
  if (gbound <= 0.0) return Eigen::VectorXd::Zero(d);
  const double scale = extent / gbound;
  Eigen::VectorXd x = sign_corner(b, box);
  Eigen::VectorXd best = x;
  double best_h = h(x);
  double prev = best_h;
  for (int k = 0; k < 5000; ++k) {
    Eigen::VectorXd grad = b;
    const double q = x.dot(con.V_inv * x);
    if (q > 0.0) grad -= (s / std::sqrt(q)) * (con.V_inv * x);
    x = box.clamp(x + (scale / (k + 1)) * grad);
    const double v = h(x);
    if (v > best_h) {
      best_h = v;
      best = x;
    }
    if (std::abs(v - prev) < 1e-9) break;
    prev = v;
  }
  return best;
}

LinearMaxResult safe_linear_max(const Eigen::VectorXd& c, const SocConstraint& con,
                                const BoxSet& box, double tol) {
  const int d = box.dim();
  if (tol <= 0.0) throw std::invalid_argument("safe_linear_max: tolerance must be positive");
  if (c.size() != d || con.a.size() != d) {
    throw std::invalid_argument("safe_linear_max: dimension mismatch");
  }
  if (con.level <= 0.0) {
    throw std::invalid_argument("safe_linear_max: constraint level must be positive");
  }
  const Eigen::VectorXd corner = sign_corner(c, box);
  if (con.margin(corner) >= 0.0) return {corner, c.dot(corner)};
  if (con.radius <= 0.0) {
    return linear_max_single_linear_constraint(c, con.a, con.level, box);
  }

  // Best feasible candidate so far; the origin is always feasible.
  Eigen::VectorXd best = Eigen::VectorXd::Zero(d);
  double best_val = 0.0;
  const auto consider = [&](const Eigen::VectorXd& x) {
    Eigen::VectorXd y = x;
    double m = con.margin(y);
    if (m < 0.0) {
      // The constraint value scales linearly along the ray from the origin, so
      // one multiplicative back-off lands on the boundary.
      const double lhs = con.level - m;
      const double tau = con.level / lhs;
      y = tau * x;
      for (int guard = 0; guard < 8 && con.margin(y) < 0.0; ++guard) y *= 1.0 - 1e-15;
      if (con.margin(y) < 0.0) return;
    }
    const double v = c.dot(y);
    if (v > best_val) {
      best_val = v;
      best = y;
    }
  };

  const bool planar = d == 2;
  Eigen::Matrix2d M2;
  Eigen::Vector2d b2, lo2, hi2;
  if (planar) {
    M2 = con.V_inv;
    lo2 = box.lower;
    hi2 = box.upper;
  }
  const auto inner = [&](double lam, const Eigen::VectorXd& warm) -> Eigen::VectorXd {
    const Eigen::VectorXd b = c - lam * con.a;
    const double s = lam * con.radius;
    if (s > 0.0 && b.dot(con.V * b) <= s * s) return Eigen::VectorXd::Zero(d);
    if (planar) {
      b2 = b;
      return inner_max_2d(b2, s, M2, lo2, hi2);
    }
    if (d == 1) {
      // Piecewise-concave scalar objective; the maximum is at an end or at 0.
      Eigen::VectorXd cand(1), pick(1);
      double bh = -std::numeric_limits<double>::infinity();
      for (const double v : {box.lower(0), 0.0, box.upper(0)}) {
        cand(0) = v;
        const double hv = b.dot(cand) - s * norm_in(con.V_inv, cand);
        if (hv > bh) {
          bh = hv;
          pick = cand;
        }
      }
      return pick;
    }
    return inner_max_iterative(b, s, con.V_inv, box, warm);
  };

  double min_dual = std::numeric_limits<double>::infinity();
  const auto dual_at = [&](double lam, const Eigen::VectorXd& x) {
    const double value = c.dot(x) + lam * con.margin(x);
    if (value < min_dual) min_dual = value;
  };

  double lam_hi = 1.0;
  Eigen::VectorXd x_hi = inner(lam_hi, corner);
  int doublings = 0;
  while (con.margin(x_hi) < 0.0) {
    consider(x_hi);
    dual_at(lam_hi, x_hi);
    if (++doublings > 60) {
      throw SolverError("safe_linear_max: failed to bracket the dual multiplier", best,
                        best_val, doublings);
    }
    lam_hi *= 2.0;
    x_hi = inner(lam_hi, x_hi);
  }
  consider(x_hi);
  dual_at(lam_hi, x_hi);
  double lam_lo = doublings == 0 ? 0.0 : lam_hi / 2.0;

  Eigen::VectorXd warm = x_hi;
  int steps = 0;
  bool converged = min_dual - best_val <= tol * (1.0 + std::abs(best_val));
  while (!converged && steps < 60) {
    ++steps;
    const double lam = 0.5 * (lam_lo + lam_hi);
    const Eigen::VectorXd x = inner(lam, warm);
    warm = x;
    const double m = con.margin(x);
    consider(x);
    dual_at(lam, x);
    if (min_dual - best_val <= tol * (1.0 + std::abs(best_val)) || std::abs(m) <= tol) {
      converged = true;
      break;
    }
    if (m < 0.0) {
      lam_lo = lam;
    } else {
      lam_hi = lam;
    }
  }
  if (!converged && min_dual - best_val > 1e-4 * (1.0 + std::abs(best_val))) {
    throw SolverError("safe_linear_max: dual bisection did not converge", best, best_val,
                      steps);
  }
  return {best, best_val};
}

LinearMaxResult grid_oracle(const Eigen::VectorXd& c,
                            const std::function<bool(const Eigen::VectorXd&)>& feasible,
                            const BoxSet& box, double step) {
  const int d = box.dim();
  if (d > 3) throw std::invalid_argument("grid_oracle: supported only up to d = 3");
  if (step <= 0.0) throw std::invalid_argument("grid_oracle: step must be positive");
  if (c.size() != d) throw std::invalid_argument("grid_oracle: dimension mismatch");
  std::vector<int> counts(d);
  for (int i = 0; i < d; ++i) {
    counts[i] = static_cast<int>(std::floor((box.upper(i) - box.lower(i)) / step + 1e-9)) + 1;
  }
  std::vector<int> idx(d, 0);
  Eigen::VectorXd x(d);
  Eigen::VectorXd best;
  double best_val = 0.0;
  bool found = false;
  while (true) {
    for (int i = 0; i < d; ++i) {
      x(i) = std::min(box.lower(i) + idx[i] * step, box.upper(i));
    }
    if (feasible(x)) {
      const double v = c.dot(x);
      if (!found || v > best_val) {
        found = true;
        best_val = v;
        best = x;
      }
    }
    int k = d - 1;
    while (k >= 0 && ++idx[k] == counts[k]) {
      idx[k] = 0;
      --k;
    }
    if (k < 0) break;
  }
  if (!found) throw std::runtime_error("grid_oracle: no feasible grid point");
  return {best, best_val};
}

LucbResult lucb_vertex_argmax(const Eigen::VectorXd& theta_hat, double beta_reward,
                              const RlsState& state, const SocConstraint& con,
                              const BoxSet& box, double tol) {
  if (beta_reward < 0.0) {
    throw std::invalid_argument("lucb_vertex_argmax: radius must be nonnegative");
  }
  const int d = box.dim();
  if (theta_hat.size() != d) {
    throw std::invalid_argument("lucb_vertex_argmax: dimension mismatch");
  }
  if (beta_reward == 0.0) {
    const LinearMaxResult r = safe_linear_max(theta_hat, con, box, tol);
    return {r.x, theta_hat, r.value};
  }
  const Eigen::MatrixXd W = inv_sqrt_factor(state.V);
  const double scale = beta_reward * std::sqrt(static_cast<double>(d));
  LucbResult out;
  bool first = true;
  for (int i = 0; i < d; ++i) {
    for (const double sign : {1.0, -1.0}) {
      const Eigen::VectorXd vertex = theta_hat + sign * scale * W.col(i);
      const LinearMaxResult r = safe_linear_max(vertex, con, box, tol);
      if (first || r.value > out.value) {
        first = false;
        out.x = r.x;
        out.theta_vertex = vertex;
        out.value = r.value;
      }
    }
  }
  return out;
}

}  // namespace safelts
