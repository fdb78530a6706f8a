#include "safelts/harness.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>
#include <gtest/gtest.h>

#include "safelts/environment.hpp"

namespace safelts {
namespace {

namespace fs = std::filesystem;

fs::path fresh_dir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / name;
  fs::remove_all(dir);
  return dir;
}

ExperimentConfig tiny_config() {
  ExperimentConfig cfg = desk_profile();
  cfg.T = 25;
  cfg.n_seeds = 2;
  cfg.instance_name = "tight_pos";
  cfg.policies = {PolicyKind::safe_lts, PolicyKind::naive_safe_lucb};
  return cfg;
}

TEST(Profiles, DefaultsAndLookup) {
  const ExperimentConfig desk = desk_profile();
  EXPECT_EQ(desk.T, 2000);
  EXPECT_EQ(desk.d, 2);
  EXPECT_EQ(desk.n_seeds, 20);
  EXPECT_NEAR(desk.effective_delta(), 1.0 / 8000.0, 1e-18);

  const ExperimentConfig full = full_profile();
  EXPECT_EQ(full.T, 10000);
  EXPECT_EQ(full.d, 4);
  ASSERT_EQ(full.policies.size(), 3u);
  EXPECT_EQ(full.policies[2], PolicyKind::dynamic_safe_lts);

  EXPECT_EQ(profile_by_name("desk").T, desk.T);
  EXPECT_EQ(profile_by_name("full").T, full.T);
  EXPECT_THROW(profile_by_name("huge"), std::invalid_argument);

  ExperimentConfig cfg = desk;
  cfg.delta = 0.05;
  EXPECT_EQ(cfg.effective_delta(), 0.05);
  EXPECT_EQ(cfg.box().dim(), 2);
  EXPECT_EQ(cfg.box().upper(0), 1.0);
}

TEST(RunEpisode, ShapeBookkeepingAndDeterminism) {
  ExperimentConfig cfg = tiny_config();
  cfg.T = 10;
  const EpisodeLog log = run_episode(cfg, PolicyKind::safe_lts, 0);
  EXPECT_EQ(log.run_id, "safe_lts-s0");
  EXPECT_EQ(log.instance_name, "tight_pos");
  EXPECT_FALSE(log.failed);
  ASSERT_EQ(log.rounds.size(), 10u);
  double cum = 0.0;
  for (std::size_t i = 0; i < log.rounds.size(); ++i) {
    const RoundRecord& rec = log.rounds[i];
    EXPECT_EQ(rec.t, static_cast<std::int64_t>(i) + 1);
    cum += rec.inst_regret;
    EXPECT_DOUBLE_EQ(rec.cum_regret, cum);
  }
  EXPECT_DOUBLE_EQ(log.final_regret, cum);
  const double bound = 2.0 * 2.0 * std::log(1.0 + 10.0 * 2.0 / 1.0);
  EXPECT_NEAR(log.potential_bound, bound, 1e-12);
  EXPECT_LE(log.potential, log.potential_bound);

  const EpisodeLog again = run_episode(cfg, PolicyKind::safe_lts, 0);
  ASSERT_EQ(again.rounds.size(), log.rounds.size());
  for (std::size_t i = 0; i < log.rounds.size(); ++i) {
    EXPECT_EQ(again.rounds[i].reward, log.rounds[i].reward);
    EXPECT_EQ((again.rounds[i].x - log.rounds[i].x).norm(), 0.0);
    EXPECT_EQ(again.rounds[i].z_event, log.rounds[i].z_event);
  }
}

TEST(RunEpisode, NoiseStreamIsSharedAcrossPolicies) {
  // The reward noise at round t is recoverable on a fixed instance; identical
  // seeds must hand every policy the same draws.
  ExperimentConfig cfg = tiny_config();
  const ProblemInstance inst = load_fixed_instance("tight_pos");
  const EpisodeLog a = run_episode(cfg, PolicyKind::safe_lts, 1);
  const EpisodeLog b = run_episode(cfg, PolicyKind::naive_safe_lucb, 1);
  ASSERT_EQ(a.rounds.size(), b.rounds.size());
  for (std::size_t i = 0; i < a.rounds.size(); ++i) {
    const double na = (a.rounds[i].reward - inst.theta_star.dot(a.rounds[i].x)) / inst.R;
    const double nb = (b.rounds[i].reward - inst.theta_star.dot(b.rounds[i].x)) / inst.R;
    EXPECT_NEAR(na, nb, 1e-9);
  }
}

TEST(RunEpisode, InlineInstance) {
  ExperimentConfig cfg = tiny_config();
  cfg.instance_name.clear();
  cfg.has_inline_instance = true;
  cfg.inline_theta = Eigen::Vector2d(0.6, 0.2);
  cfg.inline_mu = Eigen::Vector2d(0.3, 0.4);
  cfg.inline_C = 0.5;
  const EpisodeLog log = run_episode(cfg, PolicyKind::safe_lts, 0);
  EXPECT_EQ(log.instance_name, "inline");
  EXPECT_FALSE(log.failed);
}

TEST(RunBatch, SummaryStatisticsShape) {
  const ExperimentConfig cfg = tiny_config();
  int sunk = 0;
  const BatchSummary summary = run_batch(cfg, [&](const EpisodeLog&) { ++sunk; });
  EXPECT_EQ(sunk, 4);  // 2 policies x 2 seeds
  ASSERT_EQ(summary.policies.size(), 2u);
  const PolicySummary& ps = summary.for_policy(PolicyKind::safe_lts);
  EXPECT_EQ(ps.policy, "safe_lts");
  EXPECT_EQ(ps.episodes, 2);
  EXPECT_EQ(ps.failed_episodes, 0);
  ASSERT_EQ(ps.regret_mean.size(), 25u);
  ASSERT_EQ(ps.regret_std.size(), 25u);
  EXPECT_FALSE(summary.any_failed);
  EXPECT_THROW(summary.for_policy(PolicyKind::safe_lucb), std::invalid_argument);

  ExperimentConfig solo = cfg;
  solo.n_seeds = 1;
  const BatchSummary single = run_batch(solo);
  for (const double s : single.for_policy(PolicyKind::safe_lts).regret_std) {
    EXPECT_EQ(s, 0.0);
  }
}

TEST(CsvOutput, HeaderAndRowShape) {
  ExperimentConfig cfg = tiny_config();
  cfg.T = 7;
  const EpisodeLog log = run_episode(cfg, PolicyKind::safe_lts, 0);
  const fs::path path = fs::temp_directory_path() / "safelts_csv_probe.csv";
  std::FILE* f = std::fopen(path.string().c_str(), "w");
  ASSERT_NE(f, nullptr);
  write_csv_header(f);
  write_episode_rows(f, log);
  std::fclose(f);

  std::ifstream in(path);
  std::string line;
  ASSERT_TRUE(std::getline(in, line));
  EXPECT_EQ(line,
            "run_id,policy,seed,t,x,reward,side_measurement,true_margin,inst_regret,"
            "cum_regret,violated,optimistic,z_event");
  int rows = 0;
  while (std::getline(in, line)) {
    ++rows;
    int commas = 0;
    for (const char ch : line) commas += ch == ',' ? 1 : 0;
    EXPECT_EQ(commas, 12);  // 13 columns; action coordinates join on ';'
    EXPECT_NE(line.find("safe_lts-s0"), std::string::npos);
  }
  EXPECT_EQ(rows, 7);
  fs::remove(path);
}

TEST(RunBatchToDir, WritesSkipsAndForces) {
  ExperimentConfig cfg = tiny_config();
  const fs::path dir = fresh_dir("safelts_batch_probe");
  cfg.out_dir = dir.string();
  EXPECT_EQ(run_batch_to_dir(cfg, false), 0);
  EXPECT_TRUE(fs::exists(dir / "curves.csv"));
  EXPECT_TRUE(fs::exists(dir / "summary.json"));
  EXPECT_TRUE(fs::exists(dir / "plot.gp"));

  {
    std::ofstream junk(dir / "curves.csv", std::ios::app);
    junk << "junk-row\n";
  }
  const auto tainted = fs::file_size(dir / "curves.csv");
  EXPECT_EQ(run_batch_to_dir(cfg, false), 0);
  EXPECT_EQ(fs::file_size(dir / "curves.csv"), tainted);  // untouched when skipped
  EXPECT_EQ(run_batch_to_dir(cfg, true), 0);
  EXPECT_NE(fs::file_size(dir / "curves.csv"), tainted);

  std::ifstream in(dir / "summary.json");
  std::stringstream buf;
  buf << in.rdbuf();
  EXPECT_NE(buf.str().find("\"schema_version\""), std::string::npos);
  EXPECT_NE(buf.str().find("\"safe_lts\""), std::string::npos);
  fs::remove_all(dir);
}

TEST(LoglogSlope, RecoversPolynomialRates) {
  std::vector<double> half(200), lin(200);
  for (int t = 1; t <= 200; ++t) {
    half[static_cast<std::size_t>(t - 1)] = 3.7 * std::sqrt(static_cast<double>(t));
    lin[static_cast<std::size_t>(t - 1)] = 0.4 * t;
  }
  EXPECT_NEAR(loglog_slope(half, 10, 200), 0.5, 1e-12);
  EXPECT_NEAR(loglog_slope(lin, 10, 200), 1.0, 1e-12);
  EXPECT_THROW(loglog_slope(half, 0, 200), std::invalid_argument);
  EXPECT_THROW(loglog_slope(half, 10, 500), std::invalid_argument);
  EXPECT_THROW(loglog_slope(half, 50, 50), std::invalid_argument);
  std::vector<double> zeros(100, 0.0);
  EXPECT_THROW(loglog_slope(zeros, 10, 100), std::runtime_error);
}

TEST(ApplyConfigJson, OverlaysAndRejectsUnknownKeys) {
  const fs::path path = fs::temp_directory_path() / "safelts_config_probe.json";
  {
    std::ofstream out(path);
    out << R"({"T": 123, "d": 2, "box": 0.8, "policies": ["safe_lts", "safe_lucb"],)"
        << R"( "instance": "tight_neg", "n_seeds": 3, "delta": 0.02})";
  }
  ExperimentConfig cfg = desk_profile();
  apply_config_json(cfg, path.string());
  EXPECT_EQ(cfg.T, 123);
  EXPECT_EQ(cfg.n_seeds, 3);
  EXPECT_EQ(cfg.delta, 0.02);
  EXPECT_EQ(cfg.instance_name, "tight_neg");
  ASSERT_EQ(cfg.policies.size(), 2u);
  EXPECT_EQ(cfg.policies[1], PolicyKind::safe_lucb);
  EXPECT_EQ(cfg.box().lower(0), -0.8);
  EXPECT_EQ(cfg.box().upper(1), 0.8);

  {
    std::ofstream out(path);
    out << R"({"box": {"lower": [-1.0, -0.5], "upper": [0.5, 1.0]},)"
        << R"( "instance": {"theta_star": [0.6, 0.2], "mu_star": [0.3, 0.4], "C": 0.5}})";
  }
  ExperimentConfig cfg2 = desk_profile();
  apply_config_json(cfg2, path.string());
  EXPECT_TRUE(cfg2.has_inline_instance);
  EXPECT_EQ(cfg2.inline_C, 0.5);
  EXPECT_EQ(cfg2.box().lower(1), -0.5);
  EXPECT_EQ(cfg2.box().upper(0), 0.5);

  {
    std::ofstream out(path);
    out << R"({"horizon": 99})";
  }
  ExperimentConfig cfg3 = desk_profile();
  EXPECT_THROW(apply_config_json(cfg3, path.string()), std::invalid_argument);
  EXPECT_THROW(apply_config_json(cfg3, "/nonexistent/config.json"), std::runtime_error);
  {
    std::ofstream out(path);
    out << R"({"policies": ["not_a_policy"]})";
  }
  EXPECT_THROW(apply_config_json(cfg3, path.string()), std::invalid_argument);
  fs::remove(path);
}

TEST(VerifyProperties, FullSuitePasses) {
  const VerifyReport report = verify_properties(desk_profile());
  ASSERT_EQ(report.entries.size(), 8u);
  for (const VerifyEntry& entry : report.entries) {
    EXPECT_TRUE(entry.pass) << entry.name << ": " << entry.value << " vs "
                            << entry.threshold << " (" << entry.detail << ")";
  }
  EXPECT_TRUE(report.all_pass());

  const fs::path path = fs::temp_directory_path() / "safelts_verify_probe.json";
  write_verify_json(report, path.string());
  std::ifstream in(path);
  std::stringstream buf;
  buf << in.rdbuf();
  EXPECT_NE(buf.str().find("anti_concentration"), std::string::npos);
  fs::remove(path);
}

}  // namespace
}  // namespace safelts
