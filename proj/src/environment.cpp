#include "safelts/environment.hpp"

#include <cmath>
#include <stdexcept>

namespace safelts {

namespace {

void finalize(ProblemInstance& inst) {
  if (inst.C <= 0.0) throw std::invalid_argument("ProblemInstance: safety level must be positive");
  if (inst.theta_star.size() != inst.mu_star.size()) {
    throw std::invalid_argument("ProblemInstance: parameter dimension mismatch");
  }
  if (inst.theta_star.norm() > inst.S + 1e-9 || inst.mu_star.norm() > inst.S + 1e-9) {
    throw std::invalid_argument("ProblemInstance: parameter norms exceed the bound S");
  }
  inst.L = inst.box.corner_norm_bound();
  const LinearMaxResult opt =
      linear_max_single_linear_constraint(inst.theta_star, inst.mu_star, inst.C, inst.box);
  inst.x_star = opt.x;
  inst.opt_value = opt.value;
}

}  // namespace

ProblemInstance make_instance(const InstanceGenConfig& cfg, RngStream& rng) {
  if (cfg.d <= 0) throw std::invalid_argument("make_instance: dimension must be positive");
  if (cfg.c_min <= 0.0 || cfg.c_min > cfg.c_max) {
    throw std::invalid_argument("make_instance: need 0 < c_min <= c_max");
  }
  ProblemInstance inst;
  inst.name = "random";
  inst.box = cfg.box.dim() == cfg.d ? cfg.box : BoxSet::centered(cfg.d, 1.0);
  inst.R = cfg.R;
  inst.S = 1.0;
  auto unit_draw = [&]() {
    Eigen::VectorXd v = rng.normal_vector(cfg.d);
    const double n = v.norm();
    if (n < 1e-12) {
      v = Eigen::VectorXd::Zero(cfg.d);
      v(0) = 1.0;
      return v;
    }
    return Eigen::VectorXd(v / n);
  };
  inst.theta_star = unit_draw();
  inst.mu_star = unit_draw();
  inst.C = rng.uniform(cfg.c_min, cfg.c_max);
  finalize(inst);
  return inst;
}

ProblemInstance make_fixed_instance(std::string name, Eigen::VectorXd theta_star,
                                    Eigen::VectorXd mu_star, double C, BoxSet box,
                                    double R) {
  ProblemInstance inst;
  inst.name = std::move(name);
  inst.theta_star = std::move(theta_star);
  inst.mu_star = std::move(mu_star);
  inst.C = C;
  inst.box = std::move(box);
  inst.R = R;
  inst.S = 1.0;
  finalize(inst);
  return inst;
}

std::vector<std::string> fixed_instance_names() {
  return {"tight_pos", "tight_neg", "lucb_stress"};
}

ProblemInstance load_fixed_instance(const std::string& name, double R) {
  const BoxSet box = BoxSet::centered(2, 1.0);
  Eigen::Vector2d theta, mu;
  double C = 0.0;
  if (name == "tight_pos") {
    theta << 0.9, 0.23;
    mu << 0.55, 0.31;
    C = 0.11;
  } else if (name == "tight_neg") {
    theta << 0.9, 0.23;
    mu << 0.55, -0.31;
    C = 0.11;
  } else if (name == "lucb_stress") {
    theta << 0.5766, -0.1899;
    mu << 0.2138, -0.0020;
    C = 0.0615;
  } else {
    throw std::invalid_argument("load_fixed_instance: unknown instance '" + name + "'");
  }
  return make_fixed_instance(name, theta, mu, C, box, R);
}

LinearMaxResult optimal_safe_action(const ProblemInstance& inst) {
  return linear_max_single_linear_constraint(inst.theta_star, inst.mu_star, inst.C, inst.box);
}

StepResult env_step(const ProblemInstance& inst, const Eigen::VectorXd& x, RngStream& rng) {
  if (!inst.box.contains(x, 1e-9)) {
    throw std::runtime_error("env_step: action outside the action set");
  }
  StepResult out;
  const double mean_reward = x.dot(inst.theta_star);
  const double mean_side = x.dot(inst.mu_star);
  out.reward = mean_reward + inst.R * rng.normal();
  out.side_measurement = mean_side + inst.R * rng.normal();
  out.violated = mean_side > inst.C;
  out.inst_regret = inst.opt_value - mean_reward;
  return out;
}

}  // namespace safelts
