#include <pybind11/eigen.h>
#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "safelts/confidence.hpp"
#include "safelts/environment.hpp"
#include "safelts/harness.hpp"
#include "safelts/linalg.hpp"
#include "safelts/perturbation.hpp"
#include "safelts/policies.hpp"
#include "safelts/rls.hpp"
#include "safelts/rng.hpp"
#include "safelts/solver.hpp"

namespace py = pybind11;
using namespace safelts;

// The python surface mirrors the C++ one closely; the only rename is the
// ridge weight, exposed as `lam` because `lambda` is a python keyword.

PYBIND11_MODULE(_core, m) {
  m.doc() = "Stochastic linear bandits under stage-wise linear safety constraints";

  py::class_<RngStream>(m, "RngStream")
      .def(py::init<std::uint64_t>(), py::arg("seed"))
      .def("normal", &RngStream::normal)
      .def("uniform01", &RngStream::uniform01)
      .def("uniform", &RngStream::uniform, py::arg("lo"), py::arg("hi"))
      .def("normal_vector", &RngStream::normal_vector, py::arg("d"))
      .def("uniform_in_ball", &RngStream::uniform_in_ball, py::arg("d"), py::arg("radius"));
  m.def("derive_seed", &derive_seed, py::arg("base"), py::arg("tag"), py::arg("index"));
  m.def("normal_cdf", &normal_cdf, py::arg("z"));

  py::enum_<Channel>(m, "Channel")
      .value("reward", Channel::reward)
      .value("safety", Channel::safety);

  py::class_<RlsState>(m, "RlsState")
      .def(py::init<int, double>(), py::arg("d"), py::arg("lam"))
      .def_readonly("d", &RlsState::d)
      .def_readonly("t", &RlsState::t)
      .def_readonly("V", &RlsState::V)
      .def_readonly("V_inv", &RlsState::V_inv);
  m.def("gram_update", &gram_update, py::arg("state"), py::arg("x"), py::arg("r"),
        py::arg("w"));
  m.def("rls_estimate", &rls_estimate, py::arg("state"), py::arg("channel"));

  py::class_<ConfidenceConfig>(m, "ConfidenceConfig")
      .def_readonly("R", &ConfidenceConfig::R)
      .def_readonly("S", &ConfidenceConfig::S)
      .def_readonly("L", &ConfidenceConfig::L)
      .def_readonly("d", &ConfidenceConfig::d)
      .def_readonly("lam", &ConfidenceConfig::lambda)
      .def_readonly("delta", &ConfidenceConfig::delta)
      .def_readonly("delta_prime", &ConfidenceConfig::delta_prime)
      .def_readonly("T", &ConfidenceConfig::T);
  m.def("make_confidence_config", &make_confidence_config, py::arg("R"), py::arg("S"),
        py::arg("L"), py::arg("d"), py::arg("lam"), py::arg("delta"), py::arg("T"));
  m.def("beta_radius", &beta_radius, py::arg("cfg"), py::arg("t"));
  m.def("gamma_radius", &gamma_radius, py::arg("cfg"), py::arg("t"), py::arg("C"));
  m.def("safe_margin", &safe_margin, py::arg("x"), py::arg("mu_hat"), py::arg("state"),
        py::arg("beta"), py::arg("C"));

  py::enum_<Schedule>(m, "Schedule")
      .value("static_scale", Schedule::static_scale)
      .value("linear_decay", Schedule::linear_decay);
  py::class_<PerturbationSpec>(m, "PerturbationSpec")
      .def_readonly("d", &PerturbationSpec::d)
      .def_readonly("inflation", &PerturbationSpec::inflation)
      .def_readonly("schedule", &PerturbationSpec::schedule)
      .def_readonly("T", &PerturbationSpec::T)
      .def_readonly("floor", &PerturbationSpec::floor);
  m.def("make_perturbation_spec", &make_perturbation_spec, py::arg("d"),
        py::arg("inflation"), py::arg("schedule") = Schedule::static_scale,
        py::arg("T") = 0, py::arg("floor") = 1.0);
  m.def("perturbation_scale", &perturbation_scale, py::arg("spec"), py::arg("t"));
  m.def("optimism_probability", &optimism_probability, py::arg("spec"));
  m.def("sample_eta", &sample_eta, py::arg("spec"), py::arg("t"), py::arg("rng"));
  m.def("sample_theta_tilde", &sample_theta_tilde, py::arg("theta_hat"), py::arg("beta"),
        py::arg("state"), py::arg("eta"));

  py::class_<BoxSet>(m, "BoxSet")
      .def(py::init<Eigen::VectorXd, Eigen::VectorXd>(), py::arg("lower"), py::arg("upper"))
      .def_static("centered", &BoxSet::centered, py::arg("d"), py::arg("half_width"))
      .def_readonly("lower", &BoxSet::lower)
      .def_readonly("upper", &BoxSet::upper)
      .def("dim", &BoxSet::dim)
      .def("corner_norm_bound", &BoxSet::corner_norm_bound)
      .def("contains", &BoxSet::contains, py::arg("x"), py::arg("tol") = 0.0)
      .def("clamp", &BoxSet::clamp, py::arg("x"));

  py::class_<SocConstraint>(m, "SocConstraint")
      .def(py::init<Eigen::VectorXd, double, Eigen::MatrixXd, double>(), py::arg("a"),
           py::arg("radius"), py::arg("V"), py::arg("level"))
      .def_static("from_state", &SocConstraint::from_state, py::arg("a"), py::arg("radius"),
                  py::arg("state"), py::arg("level"))
      .def_static("half_space", &SocConstraint::half_space, py::arg("a"), py::arg("level"))
      .def_readonly("a", &SocConstraint::a)
      .def_readonly("radius", &SocConstraint::radius)
      .def_readonly("level", &SocConstraint::level)
      .def("margin", &SocConstraint::margin, py::arg("x"));

  py::class_<LinearMaxResult>(m, "LinearMaxResult")
      .def_readonly("x", &LinearMaxResult::x)
      .def_readonly("value", &LinearMaxResult::value);
  m.def("linear_max_single_linear_constraint", &linear_max_single_linear_constraint,
        py::arg("c"), py::arg("a"), py::arg("level"), py::arg("box"));
  m.def("safe_linear_max", &safe_linear_max, py::arg("c"), py::arg("con"), py::arg("box"),
        py::arg("tol") = 1e-6);
  py::class_<LucbResult>(m, "LucbResult")
      .def_readonly("x", &LucbResult::x)
      .def_readonly("theta_vertex", &LucbResult::theta_vertex)
      .def_readonly("value", &LucbResult::value);
  m.def("lucb_vertex_argmax", &lucb_vertex_argmax, py::arg("theta_hat"),
        py::arg("beta_reward"), py::arg("state"), py::arg("con"), py::arg("box"),
        py::arg("tol") = 1e-6);

  py::class_<ProblemInstance>(m, "ProblemInstance")
      .def_readonly("name", &ProblemInstance::name)
      .def_readonly("theta_star", &ProblemInstance::theta_star)
      .def_readonly("mu_star", &ProblemInstance::mu_star)
      .def_readonly("C", &ProblemInstance::C)
      .def_readonly("R", &ProblemInstance::R)
      .def_readonly("S", &ProblemInstance::S)
      .def_readonly("L", &ProblemInstance::L)
      .def_readonly("x_star", &ProblemInstance::x_star)
      .def_readonly("opt_value", &ProblemInstance::opt_value)
      .def("dim", &ProblemInstance::dim);
  m.def("fixed_instance_names", &fixed_instance_names);
  m.def("load_fixed_instance", &load_fixed_instance, py::arg("name"), py::arg("R") = 0.1);
  m.def("make_fixed_instance", &make_fixed_instance, py::arg("name"), py::arg("theta_star"),
        py::arg("mu_star"), py::arg("C"), py::arg("box"), py::arg("R"));
  m.def("optimal_safe_action", &optimal_safe_action, py::arg("instance"));

  py::enum_<PolicyKind>(m, "PolicyKind")
      .value("safe_lts", PolicyKind::safe_lts)
      .value("oracle_lts", PolicyKind::oracle_lts)
      .value("dynamic_safe_lts", PolicyKind::dynamic_safe_lts)
      .value("naive_safe_lucb", PolicyKind::naive_safe_lucb)
      .value("inflated_safe_lucb", PolicyKind::inflated_safe_lucb)
      .value("safe_lucb", PolicyKind::safe_lucb);
  m.def("policy_kind_from_string", &policy_kind_from_string, py::arg("name"));
  m.def("policy_kind_name", [](PolicyKind kind) { return to_string(kind); },
        py::arg("kind"));

  py::class_<ExperimentConfig>(m, "ExperimentConfig")
      .def(py::init<>())
      .def_readwrite("T", &ExperimentConfig::T)
      .def_readwrite("d", &ExperimentConfig::d)
      .def_readwrite("R", &ExperimentConfig::R)
      .def_readwrite("lam", &ExperimentConfig::lambda)
      .def_readwrite("delta", &ExperimentConfig::delta)
      .def_property(
          "policies",
          [](const ExperimentConfig& cfg) { return cfg.policies; },
          [](ExperimentConfig& cfg, const py::sequence& values) {
            // Accepts either PolicyKind values or their string names.
            cfg.policies.clear();
            for (const auto& value : values) {
              if (py::isinstance<py::str>(value)) {
                cfg.policies.push_back(
                    policy_kind_from_string(value.cast<std::string>()));
              } else {
                cfg.policies.push_back(value.cast<PolicyKind>());
              }
            }
          })
      .def_readwrite("n_seeds", &ExperimentConfig::n_seeds)
      .def_readwrite("base_seed", &ExperimentConfig::base_seed)
      .def_readwrite("instance_name", &ExperimentConfig::instance_name)
      .def_readwrite("schedule_floor", &ExperimentConfig::schedule_floor)
      .def_readwrite("explore_horizon", &ExperimentConfig::explore_horizon)
      .def_readwrite("solver_tol", &ExperimentConfig::solver_tol)
      .def_readwrite("out_dir", &ExperimentConfig::out_dir)
      .def_readwrite("checkpoint_every", &ExperimentConfig::checkpoint_every)
      .def("effective_delta", &ExperimentConfig::effective_delta)
      .def("box", &ExperimentConfig::box);
  m.def("desk_profile", &desk_profile);
  m.def("full_profile", &full_profile);
  m.def("profile_by_name", &profile_by_name, py::arg("name"));
  m.def("apply_config_json", &apply_config_json, py::arg("cfg"), py::arg("path"));

  py::class_<RoundRecord>(m, "RoundRecord")
      .def_readonly("t", &RoundRecord::t)
      .def_readonly("x", &RoundRecord::x)
      .def_readonly("reward", &RoundRecord::reward)
      .def_readonly("side_measurement", &RoundRecord::side_measurement)
      .def_readonly("true_margin", &RoundRecord::true_margin)
      .def_readonly("inst_regret", &RoundRecord::inst_regret)
      .def_readonly("cum_regret", &RoundRecord::cum_regret)
      .def_readonly("violated", &RoundRecord::violated)
      .def_readonly("optimistic", &RoundRecord::optimistic)
      .def_readonly("z_event", &RoundRecord::z_event);
  py::class_<EpisodeLog>(m, "EpisodeLog")
      .def_readonly("run_id", &EpisodeLog::run_id)
      .def_readonly("policy", &EpisodeLog::policy)
      .def_readonly("seed_index", &EpisodeLog::seed_index)
      .def_readonly("instance_name", &EpisodeLog::instance_name)
      .def_readonly("rounds", &EpisodeLog::rounds)
      .def_readonly("violations", &EpisodeLog::violations)
      .def_readonly("final_regret", &EpisodeLog::final_regret)
      .def_readonly("potential", &EpisodeLog::potential)
      .def_readonly("potential_bound", &EpisodeLog::potential_bound)
      .def_readonly("coverage_all_rounds", &EpisodeLog::coverage_all_rounds)
      .def_readonly("failed", &EpisodeLog::failed)
      .def_readonly("error", &EpisodeLog::error);
  m.def("run_episode", &run_episode, py::arg("cfg"), py::arg("kind"),
        py::arg("seed_index"));

  py::class_<PolicySummary>(m, "PolicySummary")
      .def_readonly("policy", &PolicySummary::policy)
      .def_readonly("regret_mean", &PolicySummary::regret_mean)
      .def_readonly("regret_std", &PolicySummary::regret_std)
      .def_readonly("violations", &PolicySummary::violations)
      .def_readonly("optimism_frequency", &PolicySummary::optimism_frequency)
      .def_readonly("coverage_rate", &PolicySummary::coverage_rate)
      .def_readonly("max_potential_ratio", &PolicySummary::max_potential_ratio)
      .def_readonly("episodes", &PolicySummary::episodes)
      .def_readonly("failed_episodes", &PolicySummary::failed_episodes)
      .def_readonly("final_regret_mean", &PolicySummary::final_regret_mean)
      .def_readonly("final_regret_std", &PolicySummary::final_regret_std);
  py::class_<BatchSummary>(m, "BatchSummary")
      .def_readonly("policies", &BatchSummary::policies)
      .def_readonly("any_failed", &BatchSummary::any_failed)
      .def("for_policy", &BatchSummary::for_policy, py::arg("kind"),
           py::return_value_policy::copy);
  m.def("run_batch",
        [](const ExperimentConfig& cfg) { return run_batch(cfg, nullptr); },
        py::arg("cfg"));
  m.def("run_batch_to_dir", &run_batch_to_dir, py::arg("cfg"), py::arg("force"));
  m.def("loglog_slope", &loglog_slope, py::arg("regret_mean"), py::arg("t_lo"),
        py::arg("t_hi"));

  py::class_<VerifyEntry>(m, "VerifyEntry")
      .def_readonly("name", &VerifyEntry::name)
      .def_readonly("value", &VerifyEntry::value)
      .def_readonly("threshold", &VerifyEntry::threshold)
      .def_readonly("pass_", &VerifyEntry::pass)
      .def_readonly("detail", &VerifyEntry::detail);
  py::class_<VerifyReport>(m, "VerifyReport")
      .def_readonly("entries", &VerifyReport::entries)
      .def("all_pass", &VerifyReport::all_pass);
  m.def("verify_properties", &verify_properties, py::arg("cfg"));
}
