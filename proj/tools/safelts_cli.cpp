#include <cstdio>
#include <cstring>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include "safelts/harness.hpp"

namespace {

using namespace safelts;

int usage(std::FILE* f) {
  std::fputs(
      "usage: safelts <command> [options]\n"
      "\n"
      "commands:\n"
      "  run --policy <name>   run one policy on one seed and write outputs\n"
      "  batch                 run every configured policy over all seeds\n"
      "  verify                run the statistical property suite\n"
      "  instances list        list the built-in fixed instances\n"
      "\n"
      "options:\n"
      "  --config <path.json>  overlay settings from a JSON config file\n"
      "  --profile <name>      start from a named profile (desk, full)\n"
      "  --seed <n>            base seed (default 0)\n"
      "  --out <dir>           output directory (default out)\n"
      "  --force               rerun even if outputs already exist\n"
      "  --policy <name>       policy for the run command: safe_lts, oracle_lts,\n"
      "                        dynamic_safe_lts, naive_safe_lucb, inflated_safe_lucb,\n"
      "                        safe_lucb\n",
      f);
  return f == stdout ? 0 : 2;
}

struct CliArgs {
  std::string command;
  std::string config_path;
  std::string profile;
  std::string out_dir;
  std::string policy;
  std::uint64_t seed = 0;
  bool seed_set = false;
  bool force = false;
  std::vector<std::string> positional;
};

CliArgs parse_args(int argc, char** argv) {
  CliArgs args;
  if (argc < 2) throw std::invalid_argument("missing command");
  args.command = argv[1];
  if (args.command == "--help" || args.command == "-h") args.command = "help";
  for (int i = 2; i < argc; ++i) {
    const std::string arg = argv[i];
    const auto need_value = [&](const char* flag) -> std::string {
      if (i + 1 >= argc) throw std::invalid_argument(std::string(flag) + " needs a value");
      return argv[++i];
    };
    if (arg == "--config") {
      args.config_path = need_value("--config");
    } else if (arg == "--profile") {
      args.profile = need_value("--profile");
    } else if (arg == "--seed") {
      args.seed = std::stoull(need_value("--seed"));
      args.seed_set = true;
    } else if (arg == "--out") {
      args.out_dir = need_value("--out");
    } else if (arg == "--policy") {
      args.policy = need_value("--policy");
    } else if (arg == "--force") {
      args.force = true;
    } else if (arg == "--help" || arg == "-h") {
      args.command = "help";
    } else if (!arg.empty() && arg[0] == '-') {
      throw std::invalid_argument("unknown option '" + arg + "'");
    } else {
      args.positional.push_back(arg);
    }
  }
  return args;
}

ExperimentConfig build_config(const CliArgs& args) {
  ExperimentConfig cfg =
      args.profile.empty() ? ExperimentConfig{} : profile_by_name(args.profile);
  if (!args.config_path.empty()) apply_config_json(cfg, args.config_path);
  if (args.seed_set) cfg.base_seed = args.seed;
  if (!args.out_dir.empty()) cfg.out_dir = args.out_dir;
  return cfg;
}

int cmd_run(const CliArgs& args) {
  if (args.policy.empty()) {
    throw std::invalid_argument("run needs --policy <name>");
  }
  ExperimentConfig cfg = build_config(args);
  cfg.policies = {policy_kind_from_string(args.policy)};
  cfg.n_seeds = 1;
  return run_batch_to_dir(cfg, args.force);
}

int cmd_batch(const CliArgs& args) {
  const ExperimentConfig cfg = build_config(args);
  return run_batch_to_dir(cfg, args.force);
}

int cmd_verify(const CliArgs& args) {
  const ExperimentConfig cfg = build_config(args);
  const VerifyReport report = verify_properties(cfg);
  for (const VerifyEntry& e : report.entries) {
    std::printf("[%s] %-28s value=%.6g threshold=%.6g  %s\n", e.pass ? "PASS" : "FAIL",
                e.name.c_str(), e.value, e.threshold, e.detail.c_str());
  }
  std::filesystem::create_directories(cfg.out_dir);
  const std::string path = (std::filesystem::path(cfg.out_dir) / "verify.json").string();
  write_verify_json(report, path);
  std::printf("wrote %s\n", path.c_str());
  return report.all_pass() ? 0 : 1;
}

int cmd_instances(const CliArgs& args) {
  if (args.positional.size() != 1 || args.positional[0] != "list") {
    throw std::invalid_argument("usage: safelts instances list");
  }
  for (const std::string& name : fixed_instance_names()) {
    const ProblemInstance inst = load_fixed_instance(name);
    std::printf("%-12s d=%d C=%.4g opt_value=%.6g theta=[", name.c_str(), inst.dim(),
                inst.C, inst.opt_value);
    for (int i = 0; i < inst.theta_star.size(); ++i) {
      std::printf("%s%.4g", i == 0 ? "" : ",", inst.theta_star(i));
    }
    std::printf("] mu=[");
    for (int i = 0; i < inst.mu_star.size(); ++i) {
      std::printf("%s%.4g", i == 0 ? "" : ",", inst.mu_star(i));
    }
    std::printf("]\n");
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    const CliArgs args = parse_args(argc, argv);
    if (args.command == "help") return usage(stdout);
    if (args.command == "run") return cmd_run(args);
    if (args.command == "batch") return cmd_batch(args);
    if (args.command == "verify") return cmd_verify(args);
    if (args.command == "instances") return cmd_instances(args);
    std::fprintf(stderr, "error: unknown command '%s'\n\n", args.command.c_str());
    return usage(stderr);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
}
