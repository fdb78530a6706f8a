#include "safelts/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "safelts/linalg.hpp"

namespace safelts {

namespace fs = std::filesystem;
using nlohmann::json;

BoxSet ExperimentConfig::box() const {
  if (box_lower.size() == 0) return BoxSet::centered(d, 1.0);
  return BoxSet(box_lower, box_upper);
}

double ExperimentConfig::effective_delta() const {
  return delta > 0.0 ? delta : 1.0 / (4.0 * static_cast<double>(T));
}

ExperimentConfig desk_profile() {
  ExperimentConfig cfg;
  cfg.T = 2000;
  cfg.d = 2;
  cfg.n_seeds = 20;
  return cfg;
}

ExperimentConfig full_profile() {
  ExperimentConfig cfg;
  cfg.T = 10000;
  cfg.d = 4;
  cfg.n_seeds = 20;
  cfg.policies = {PolicyKind::safe_lts, PolicyKind::oracle_lts, PolicyKind::dynamic_safe_lts};
  return cfg;
}

ExperimentConfig profile_by_name(const std::string& name) {
  if (name == "desk") return desk_profile();
  if (name == "full") return full_profile();
  throw std::invalid_argument("unknown profile '" + name + "' (expected desk or full)");
}

namespace {

Eigen::VectorXd parse_vector(const json& j) {
  if (!j.is_array()) throw std::invalid_argument("config: expected an array of numbers");
  Eigen::VectorXd v(j.size());
  for (std::size_t i = 0; i < j.size(); ++i) v(static_cast<int>(i)) = j[i].get<double>();
  return v;
}

}  // namespace

void apply_config_json(ExperimentConfig& cfg, const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file '" + path + "'");
  json j;
  in >> j;
  if (!j.is_object()) throw std::invalid_argument("config: top level must be an object");
  for (const auto& [key, value] : j.items()) {
    if (key == "T") {
      cfg.T = value.get<std::int64_t>();
    } else if (key == "d") {
      cfg.d = value.get<int>();
    } else if (key == "R") {
      cfg.R = value.get<double>();
    } else if (key == "lambda") {
      cfg.lambda = value.get<double>();
    } else if (key == "delta") {
      cfg.delta = value.get<double>();
    } else if (key == "n_seeds") {
      cfg.n_seeds = value.get<int>();
    } else if (key == "base_seed") {
      cfg.base_seed = value.get<std::uint64_t>();
    } else if (key == "schedule_floor") {
      cfg.schedule_floor = value.get<double>();
    } else if (key == "explore_horizon") {
      cfg.explore_horizon = value.get<std::int64_t>();
    } else if (key == "solver_tol") {
      cfg.solver_tol = value.get<double>();
    } else if (key == "out_dir") {
      cfg.out_dir = value.get<std::string>();
    } else if (key == "checkpoint_every") {
      cfg.checkpoint_every = value.get<std::int64_t>();
    } else if (key == "policies") {
      cfg.policies.clear();
      for (const auto& p : value) cfg.policies.push_back(policy_kind_from_string(p.get<std::string>()));
    } else if (key == "box") {
      if (value.is_number()) {
        const double w = value.get<double>();
        cfg.box_lower = Eigen::VectorXd::Constant(cfg.d, -w);
        cfg.box_upper = Eigen::VectorXd::Constant(cfg.d, w);
      } else {
        cfg.box_lower = parse_vector(value.at("lower"));
        cfg.box_upper = parse_vector(value.at("upper"));
      }
    } else if (key == "instance") {
      if (value.is_string()) {
        cfg.instance_name = value.get<std::string>();
      } else {
        cfg.has_inline_instance = true;
        cfg.inline_theta = parse_vector(value.at("theta_star"));
        cfg.inline_mu = parse_vector(value.at("mu_star"));
        cfg.inline_C = value.at("C").get<double>();
      }
    } else {
      throw std::invalid_argument("config: unknown key '" + key + "'");
    }
  }
}

namespace {

ProblemInstance instance_for_seed(const ExperimentConfig& cfg, std::uint64_t seed_index) {
  if (!cfg.instance_name.empty()) return load_fixed_instance(cfg.instance_name, cfg.R);
  if (cfg.has_inline_instance) {
    return make_fixed_instance("inline", cfg.inline_theta, cfg.inline_mu, cfg.inline_C,
                               cfg.box(), cfg.R);
  }
  RngStream rng(derive_seed(cfg.base_seed, "instance", seed_index));
  InstanceGenConfig gen;
  gen.d = cfg.d;
  gen.box = cfg.box();
  gen.R = cfg.R;
  return make_instance(gen, rng);
}

}  // namespace

EpisodeLog run_episode(const ExperimentConfig& cfg, PolicyKind kind,
                       std::uint64_t seed_index) {
  EpisodeLog log;
  log.policy = kind;
  log.seed_index = seed_index;
  log.run_id = to_string(kind) + "-s" + std::to_string(seed_index);

  RngStream noise_rng(derive_seed(cfg.base_seed, "noise", seed_index));
  RngStream policy_rng(derive_seed(cfg.base_seed, "policy/" + to_string(kind), seed_index));

  const ProblemInstance inst = instance_for_seed(cfg, seed_index);
  log.instance_name = inst.name;
  const ConfidenceConfig ccfg = make_confidence_config(
      cfg.R, inst.S, inst.L, inst.dim(), cfg.lambda, cfg.effective_delta(), cfg.T);
  PolicyOptions opts;
  opts.schedule_floor = cfg.schedule_floor;
  opts.explore_horizon = cfg.explore_horizon;
  opts.solver_tol = cfg.solver_tol;
  PolicyState ps = make_policy(kind, ccfg, inst, opts);
  log.potential_bound = elliptical_potential_bound(cfg.T, inst.dim(), inst.L, cfg.lambda);
  log.rounds.reserve(static_cast<std::size_t>(cfg.T));

  const bool sampling = is_sampling_policy(kind);
  double cum = 0.0;
  bool z_so_far = true;
  try {
    for (std::int64_t t = 1; t <= cfg.T; ++t) {
      const Eigen::VectorXd x = policy_step(ps, t, policy_rng);
      const StepResult env = env_step(inst, x, noise_rng);

      // Diagnostics evaluate against the state the decision was made with.
      const double beta = beta_radius(ccfg, t);
      const Eigen::VectorXd theta_hat = rls_estimate(ps.rls, Channel::reward);
      const Eigen::VectorXd mu_hat = rls_estimate(ps.rls, Channel::safety);
      RoundRecord rec;
      rec.t = t;
      rec.x = x;
      rec.reward = env.reward;
      rec.side_measurement = env.side_measurement;
      rec.true_margin = inst.C - x.dot(inst.mu_star);
      rec.inst_regret = env.inst_regret;
      cum += env.inst_regret;
      rec.cum_regret = cum;
      rec.violated = env.violated;
      rec.optimistic = ps.last_value >= inst.opt_value - 1e-9;
      rec.e_hat = weighted_norm(theta_hat - inst.theta_star, ps.rls.V) <= beta;
      rec.z_hat = weighted_norm(mu_hat - inst.mu_star, ps.rls.V) <= beta;
      rec.e_tilde =
          !sampling || weighted_norm(ps.theta_tilde - theta_hat, ps.rls.V) <=
                           gamma_radius(ccfg, t, inst.C);
      z_so_far = z_so_far && rec.e_hat && rec.z_hat;
      rec.z_event = z_so_far;
      const double pot = x.dot(ps.rls.V_inv * x);
      log.potential += pot > 0.0 ? pot : 0.0;
      if (env.violated) ++log.violations;

      policy_update(ps, x, env.reward, env.side_measurement);
      log.rounds.push_back(std::move(rec));
    }
  } catch (const std::exception& e) {
    log.failed = true;
    log.error = e.what();
  }
  log.final_regret = cum;
  log.coverage_all_rounds = z_so_far;
  return log;
}

const PolicySummary& BatchSummary::for_policy(PolicyKind kind) const {
  const std::string name = to_string(kind);
  for (const auto& p : policies) {
    if (p.policy == name) return p;
  }
  throw std::invalid_argument("BatchSummary: policy '" + name + "' not in batch");
}

BatchSummary run_batch(const ExperimentConfig& cfg,
                       const std::function<void(const EpisodeLog&)>& sink) {
  if (cfg.n_seeds < 1) throw std::invalid_argument("run_batch: need at least one seed");
  if (cfg.T < 1) throw std::invalid_argument("run_batch: need a positive horizon");
  BatchSummary summary;
  for (const PolicyKind kind : cfg.policies) {
    PolicySummary ps;
    ps.policy = to_string(kind);
    const std::size_t T = static_cast<std::size_t>(cfg.T);
    std::vector<double> sum(T, 0.0), sumsq(T, 0.0);
    std::int64_t opt_rounds = 0, z_rounds = 0;
    int covered = 0;
    const auto start = std::chrono::steady_clock::now();
    for (int seed = 0; seed < cfg.n_seeds; ++seed) {
      const EpisodeLog log = run_episode(cfg, kind, static_cast<std::uint64_t>(seed));
      ++ps.episodes;
      if (log.failed) {
        ++ps.failed_episodes;
        summary.any_failed = true;
        if (sink) sink(log);
        continue;
      }
      for (std::size_t i = 0; i < T; ++i) {
        const double v = log.rounds[i].cum_regret;
        sum[i] += v;
        sumsq[i] += v * v;
      }
      ps.violations += log.violations;
      for (const RoundRecord& rec : log.rounds) {
        if (rec.z_event) {
          ++z_rounds;
          if (rec.optimistic) ++opt_rounds;
        }
      }
      if (log.coverage_all_rounds) ++covered;
      const double ratio = log.potential / log.potential_bound;
      ps.max_potential_ratio = std::max(ps.max_potential_ratio, ratio);
      if (sink) sink(log);
    }
    const auto stop = std::chrono::steady_clock::now();
    ps.wall_clock_seconds = std::chrono::duration<double>(stop - start).count();
    const int n = ps.episodes - ps.failed_episodes;
    ps.regret_mean.resize(T, 0.0);
    ps.regret_std.resize(T, 0.0);
    if (n > 0) {
      for (std::size_t i = 0; i < T; ++i) {
        const double mean = sum[i] / n;
        ps.regret_mean[i] = mean;
        if (n > 1) {
          const double var = std::max(0.0, (sumsq[i] - n * mean * mean) / (n - 1));
          ps.regret_std[i] = std::sqrt(var);
        }
      }
      ps.final_regret_mean = ps.regret_mean[T - 1];
      ps.final_regret_std = ps.regret_std[T - 1];
      ps.coverage_rate = static_cast<double>(covered) / n;
    }
    ps.optimism_frequency =
        z_rounds > 0 ? static_cast<double>(opt_rounds) / static_cast<double>(z_rounds) : 0.0;
    summary.policies.push_back(std::move(ps));
  }
  return summary;
}

void write_csv_header(std::FILE* f) {
  std::fputs(
      "run_id,policy,seed,t,x,reward,side_measurement,true_margin,inst_regret,cum_regret,"
      "violated,optimistic,z_event\n",
      f);
}

void write_episode_rows(std::FILE* f, const EpisodeLog& log) {
  const std::string policy = to_string(log.policy);
  for (const RoundRecord& rec : log.rounds) {
    std::fprintf(f, "%s,%s,%llu,%lld,", log.run_id.c_str(), policy.c_str(),
                 static_cast<unsigned long long>(log.seed_index),
                 static_cast<long long>(rec.t));
    for (int i = 0; i < rec.x.size(); ++i) {
      std::fprintf(f, "%s%.17g", i == 0 ? "" : ";", rec.x(i));
    }
    std::fprintf(f, ",%.17g,%.17g,%.17g,%.17g,%.17g,%d,%d,%d\n", rec.reward,
                 rec.side_measurement, rec.true_margin, rec.inst_regret, rec.cum_regret,
                 rec.violated ? 1 : 0, rec.optimistic ? 1 : 0, rec.z_event ? 1 : 0);
  }
}

namespace {

json config_to_json(const ExperimentConfig& cfg) {
  json j;
  j["T"] = cfg.T;
  j["d"] = cfg.d;
  j["R"] = cfg.R;
  j["lambda"] = cfg.lambda;
  j["delta"] = cfg.effective_delta();
  j["n_seeds"] = cfg.n_seeds;
  j["base_seed"] = cfg.base_seed;
  j["schedule_floor"] = cfg.schedule_floor;
  j["explore_horizon"] = cfg.explore_horizon;
  j["solver_tol"] = cfg.solver_tol;
  std::vector<std::string> names;
  names.reserve(cfg.policies.size());
  for (const PolicyKind k : cfg.policies) names.push_back(to_string(k));
  j["policies"] = names;
  if (!cfg.instance_name.empty()) {
    j["instance"] = cfg.instance_name;
  } else if (cfg.has_inline_instance) {
    j["instance"] = "inline";
  } else {
    j["instance"] = "random";
  }
  return j;
}

}  // namespace

void write_summary_json(const ExperimentConfig& cfg, const BatchSummary& summary,
                        const std::string& path) {
  json j;
  j["schema_version"] = 1;
  j["config"] = config_to_json(cfg);
  j["any_failed"] = summary.any_failed;
  json pols = json::object();
  for (const PolicySummary& ps : summary.policies) {
    json p;
    p["episodes"] = ps.episodes;
    p["failed_episodes"] = ps.failed_episodes;
    p["violations"] = ps.violations;
    p["final_regret_mean"] = ps.final_regret_mean;
    p["final_regret_std"] = ps.final_regret_std;
    p["optimism_frequency"] = ps.optimism_frequency;
    p["coverage_rate"] = ps.coverage_rate;
    p["max_potential_ratio"] = ps.max_potential_ratio;
    p["wall_clock_seconds"] = ps.wall_clock_seconds;
    p["regret_mean"] = ps.regret_mean;
    p["regret_std"] = ps.regret_std;
    pols[ps.policy] = std::move(p);
  }
  j["policies"] = std::move(pols);
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write '" + path + "'");
  out << j.dump(2) << '\n';
}

namespace {

const char* policy_color(const std::string& name) {
  if (name == "safe_lts") return "#1f77b4";
  if (name == "oracle_lts") return "#2ca02c";
  if (name == "dynamic_safe_lts") return "#17becf";
  if (name == "naive_safe_lucb") return "#d62728";
  if (name == "inflated_safe_lucb") return "#ff7f0e";
  return "#9467bd";
}

std::string gp_escape(const std::string& name) {
  std::string out;
  for (const char c : name) {
    if (c == '_') out += "\\\\_";
    else out += c;
  }
  return out;
}

}  // namespace

void write_plot_script(const ExperimentConfig& cfg, const BatchSummary& summary,
                       const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write '" + path + "'");
  out << "# Mean cumulative pseudo-regret with a one-standard-deviation band.\n";
  out << "# Data blocks below are downsampled from summary.json.\n";
  out << "set terminal pngcairo size 960,640\n";
  out << "set output 'regret.png'\n";
  out << "set key top left\n";
  out << "set xlabel 'round t'\n";
  out << "set ylabel 'cumulative pseudo-regret'\n";
  const std::int64_t stride = std::max<std::int64_t>(1, cfg.T / 400);
  for (const PolicySummary& ps : summary.policies) {
    if (ps.regret_mean.empty()) continue;
    out << "$data_" << ps.policy << " << EOD\n";
    for (std::int64_t t = 1; t <= cfg.T; t += stride) {
      const std::size_t i = static_cast<std::size_t>(t - 1);
      out << t << ' ' << ps.regret_mean[i] << ' ' << ps.regret_std[i] << '\n';
    }
    const std::size_t last = static_cast<std::size_t>(cfg.T - 1);
    if ((cfg.T - 1) % stride != 0) {
      out << cfg.T << ' ' << ps.regret_mean[last] << ' ' << ps.regret_std[last] << '\n';
    }
    out << "EOD\n";
  }
  out << "plot \\\n";
  bool first = true;
  for (const PolicySummary& ps : summary.policies) {
    if (ps.regret_mean.empty()) continue;
    if (!first) out << ", \\\n";
    first = false;
    out << "  $data_" << ps.policy << " using 1:($2-$3):($2+$3) with filledcurves "
        << "fs transparent solid 0.15 lc rgb '" << policy_color(ps.policy)
        << "' notitle, \\\n";
    out << "  $data_" << ps.policy << " using 1:2 with lines lw 2 lc rgb '"
        << policy_color(ps.policy) << "' title '" << gp_escape(ps.policy) << "'";
  }
  out << "\n";
}

int run_batch_to_dir(const ExperimentConfig& cfg, bool force) {
  const fs::path dir(cfg.out_dir);
  const fs::path csv_path = dir / "curves.csv";
  const fs::path summary_path = dir / "summary.json";
  if (!force && fs::exists(csv_path) && fs::exists(summary_path)) {
    std::printf("outputs already exist in %s; skipping (use --force to rerun)\n",
                cfg.out_dir.c_str());
    return 0;
  }
  fs::create_directories(dir);
  std::FILE* f = std::fopen(csv_path.string().c_str(), "w");
  if (!f) throw std::runtime_error("cannot write '" + csv_path.string() + "'");
  write_csv_header(f);
  std::int64_t episodes_done = 0;
  const auto sink = [&](const EpisodeLog& log) {
    write_episode_rows(f, log);
    ++episodes_done;
    if (cfg.checkpoint_every > 0 && episodes_done % cfg.checkpoint_every == 0) {
      std::fflush(f);
    }
  };
  BatchSummary summary;
  try {
    summary = run_batch(cfg, sink);
  } catch (...) {
    std::fclose(f);
    throw;
  }
  std::fclose(f);
  write_summary_json(cfg, summary, summary_path.string());
  write_plot_script(cfg, summary, (dir / "plot.gp").string());
  for (const PolicySummary& ps : summary.policies) {
    std::printf("%-20s episodes=%d failed=%d violations=%lld final_regret=%.4g +- %.4g\n",
                ps.policy.c_str(), ps.episodes, ps.failed_episodes,
                static_cast<long long>(ps.violations), ps.final_regret_mean,
                ps.final_regret_std);
  }
  return summary.any_failed ? 1 : 0;
}

double loglog_slope(const std::vector<double>& regret_mean, std::int64_t t_lo,
                    std::int64_t t_hi) {
  if (t_lo < 1 || t_hi <= t_lo || static_cast<std::size_t>(t_hi) > regret_mean.size()) {
    throw std::invalid_argument("loglog_slope: bad window");
  }
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  std::int64_t n = 0;
  for (std::int64_t t = t_lo; t <= t_hi; ++t) {
    const double y = regret_mean[static_cast<std::size_t>(t - 1)];
    if (y <= 0.0) continue;
    const double lx = std::log(static_cast<double>(t));
    const double ly = std::log(y);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
    ++n;
  }
  if (n < 2) throw std::runtime_error("loglog_slope: not enough positive points");
  const double denom = n * sxx - sx * sx;
  return (n * sxy - sx * sy) / denom;
}

bool VerifyReport::all_pass() const {
  return std::all_of(entries.begin(), entries.end(),
                     [](const VerifyEntry& e) { return e.pass; });
}

SolverCase random_solver_case(RngStream& rng) {
  SolverCase sc;
  sc.box = BoxSet::centered(2, 1.0);
  sc.c = rng.normal_vector(2);
  Eigen::VectorXd a = rng.normal_vector(2);
  const double an = a.norm();
  a = an > 1e-12 ? Eigen::VectorXd(a / an) : Eigen::VectorXd(Eigen::Vector2d(1.0, 0.0));
  a *= rng.uniform(0.2, 1.0);
  const double level = rng.uniform(0.1, 1.0);
  RlsState state(2, 1.0);
  const int m = static_cast<int>(rng.uniform(0.0, 30.0));
  for (int i = 0; i < m; ++i) {
    Eigen::VectorXd y(2);
    y << rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0);
    gram_update(state, y, 0.0, 0.0);
  }
  const double radius = rng.uniform(0.0, 1.2);
  sc.con = SocConstraint::from_state(a, radius, state, level);
  return sc;
}

VerifyReport verify_properties(const ExperimentConfig& cfg) {
  VerifyReport report;
  const double p_target = normal_cdf(-1.0);

  {  // Anti-concentration at the one-sigma threshold of the static law.
    const PerturbationSpec spec = make_perturbation_spec(cfg.d, 5.0);
    Eigen::VectorXd u = Eigen::VectorXd::Ones(cfg.d);
    u /= u.norm();
    RngStream rng(derive_seed(cfg.base_seed, "verify/anti_conc"));
    const TailEstimate est = tail_probability_estimate(
        spec, TailQuery::anti_conc(u, spec.inflation), 1000000, rng);
    VerifyEntry e;
    e.name = "anti_concentration";
    e.value = est.estimate;
    e.threshold = 0.01;
    e.pass = std::abs(est.estimate - p_target) <= e.threshold;
    e.detail = "one-sigma upper tail vs " + std::to_string(p_target);
    report.entries.push_back(std::move(e));
  }

  for (const double delta : {0.1, 0.01}) {  // Norm-bound coverage of the law.
    const PerturbationSpec spec = make_perturbation_spec(cfg.d, 5.0);
    const double bound =
        spec.inflation * std::sqrt(2.0 * cfg.d * std::log(2.0 * cfg.d / delta));
    RngStream rng(derive_seed(cfg.base_seed, "verify/conc", static_cast<std::uint64_t>(1.0 / delta)));
    const TailEstimate est =
        tail_probability_estimate(spec, TailQuery::conc(bound), 1000000, rng);
    char label[32];
    std::snprintf(label, sizeof label, "concentration_delta_%g", delta);
    VerifyEntry e;
    e.name = label;
    e.value = 1.0 - est.estimate;  // violation rate
    e.threshold = delta;
    e.pass = e.value <= delta;
    e.detail = "norm bound " + std::to_string(bound);
    report.entries.push_back(std::move(e));
  }

  {  // Confidence coverage over full episodes, and the potential bound.
    ExperimentConfig sub = cfg;
    sub.T = 1000;
    sub.n_seeds = 100;
    sub.policies = {PolicyKind::safe_lts};
    sub.instance_name.clear();
    sub.has_inline_instance = false;
    sub.base_seed = derive_seed(cfg.base_seed, "verify/coverage");
    int covered = 0;
    double max_ratio = 0.0;
    for (int seed = 0; seed < sub.n_seeds; ++seed) {
      const EpisodeLog log = run_episode(sub, PolicyKind::safe_lts, seed);
      if (log.failed) continue;
      if (log.coverage_all_rounds) ++covered;
      max_ratio = std::max(max_ratio, log.potential / log.potential_bound);
    }
    VerifyEntry cov;
    cov.name = "coverage";
    cov.value = covered / 100.0;
    cov.threshold = 1.0 - sub.effective_delta() / 3.0;
    cov.pass = cov.value >= cov.threshold;
    cov.detail = "episodes with both estimates inside their regions at every round";
    report.entries.push_back(std::move(cov));
    VerifyEntry pot;
    pot.name = "elliptical_potential";
    pot.value = max_ratio;
    pot.threshold = 1.0;
    pot.pass = max_ratio < 1.0;
    pot.detail = "max observed potential over its deterministic bound";
    report.entries.push_back(std::move(pot));
  }

  {  // Optimism frequency conditioned on the confidence event.
    ExperimentConfig sub = cfg;
    sub.T = 2000;
    sub.n_seeds = 3;
    sub.policies = {PolicyKind::safe_lts};
    sub.instance_name = "tight_pos";
    sub.has_inline_instance = false;
    sub.d = 2;
    sub.base_seed = derive_seed(cfg.base_seed, "verify/optimism");
    std::int64_t z_rounds = 0, opt_rounds = 0;
    for (int seed = 0; seed < sub.n_seeds; ++seed) {
      const EpisodeLog log = run_episode(sub, PolicyKind::safe_lts, seed);
      for (const RoundRecord& rec : log.rounds) {
        if (rec.z_event) {
          ++z_rounds;
          if (rec.optimistic) ++opt_rounds;
        }
      }
    }
    VerifyEntry e;
    e.name = "optimism_given_z";
    e.value = z_rounds > 0 ? static_cast<double>(opt_rounds) / z_rounds : 0.0;
    e.threshold = p_target / 2.0 - 0.03;
    e.pass = z_rounds >= 5000 && e.value >= e.threshold;
    e.detail = std::to_string(z_rounds) + " conditioned rounds";
    report.entries.push_back(std::move(e));
  }

  {  // Solver versus exhaustive search.
    RngStream rng(derive_seed(cfg.base_seed, "verify/solver"));
    const double step = 0.005;
    double worst_soc = 0.0, worst_lp = 0.0;
    for (int k = 0; k < 100; ++k) {
      const SolverCase sc = random_solver_case(rng);
      const LinearMaxResult got = safe_linear_max(sc.c, sc.con, sc.box, 1e-6);
      const LinearMaxResult grid = grid_oracle(
          sc.c, [&](const Eigen::VectorXd& x) { return sc.con.margin(x) >= 0.0; }, sc.box,
          step);
      const double tol = std::max(1e-3, step * sc.c.lpNorm<1>());
      worst_soc = std::max(worst_soc, std::abs(got.value - grid.value) / tol);

      const LinearMaxResult lp =
          linear_max_single_linear_constraint(sc.c, sc.con.a, sc.con.level, sc.box);
      const LinearMaxResult lp_grid = grid_oracle(
          sc.c, [&](const Eigen::VectorXd& x) { return sc.con.a.dot(x) <= sc.con.level; },
          sc.box, step);
      const double lp_tol = step * std::max(1.0, sc.c.lpNorm<1>());
      worst_lp = std::max(worst_lp, std::abs(lp.value - lp_grid.value) / lp_tol);
    }
    VerifyEntry soc;
    soc.name = "solver_soc_vs_grid";
    soc.value = worst_soc;
    soc.threshold = 1.0;
    soc.pass = worst_soc <= 1.0;
    soc.detail = "worst |solver - grid| over its tolerance, 100 cases";
    report.entries.push_back(std::move(soc));
    VerifyEntry lp;
    lp.name = "solver_lp_vs_grid";
    lp.value = worst_lp;
    lp.threshold = 1.0;
    lp.pass = worst_lp <= 1.0;
    lp.detail = "worst |exact - grid| over one grid step, 100 cases";
    report.entries.push_back(std::move(lp));
  }

  return report;
}

void write_verify_json(const VerifyReport& report, const std::string& path) {
  json j;
  j["schema_version"] = 1;
  j["all_pass"] = report.all_pass();
  json entries = json::array();
  for (const VerifyEntry& e : report.entries) {
    json je;
    je["name"] = e.name;
    je["value"] = e.value;
    je["threshold"] = e.threshold;
    je["pass"] = e.pass;
    je["detail"] = e.detail;
    entries.push_back(std::move(je));
  }
  j["entries"] = std::move(entries);
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write '" + path + "'");
  out << j.dump(2) << '\n';
}

}  // namespace safelts
