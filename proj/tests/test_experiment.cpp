#include <filesystem>
#include <fstream>
#include <sstream>

#include <gtest/gtest.h>

#include "dqpt/experiment.hpp"

using namespace dqpt;

namespace {

KeyValues minimal(const std::string& kind) {
  return {{"kind", kind}, {"g0", "1.5"}, {"g1", "0.2"}, {"dt", "0.1"}, {"t_max", "0.3"}};
}

std::filesystem::path temp_dir(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / ("dqpt_test_experiment_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

const Trajectory& exact_short() {
  static const Trajectory t = [] {
    QuenchSpec q;
    q.t_max = 0.5;
    return evolve_exact_in_ansatz(q, Template::Reduced8);
  }();
  return t;
}

}  // namespace

TEST(Config, KindNames) {
  for (auto k : {ExperimentKind::Quench, ExperimentKind::ExactInAnsatz, ExperimentKind::Ensemble,
                 ExperimentKind::OracleCurve, ExperimentKind::GaugeAnalysis, ExperimentKind::TrotterStudy}) {
    EXPECT_EQ(experiment_kind_from_string(to_string(k)), k);
  }
  EXPECT_THROW(experiment_kind_from_string("plot"), InvalidArgument);
}

TEST(Config, MinimalDefaults) {
  const ExperimentConfig c = config_from_key_values(minimal("quench"));
  EXPECT_EQ(c.kind, ExperimentKind::Quench);
  EXPECT_EQ(c.quench.g0, 1.5);
  EXPECT_EQ(c.quench.J, 1.0);
  EXPECT_EQ(c.quench.trotter_order, 1);
  EXPECT_EQ(c.spsa.steps, 6);
  EXPECT_EQ(c.output, "quench");
}

TEST(Config, MissingFieldIsNamed) {
  for (const std::string field : {"kind", "g0", "g1", "dt", "t_max"}) {
    KeyValues kv = minimal("quench");
    std::erase_if(kv, [&](const auto& p) { return p.first == field; });
    try {
      config_from_key_values(kv);
      FAIL() << "accepted config without " << field;
    } catch (const InvalidArgument& e) {
      EXPECT_NE(std::string(e.what()).find("'" + field + "'"), std::string::npos) << e.what();
    }
  }
}

TEST(Config, RejectsBadValues) {
  auto with = [](const std::string& k, const std::string& v) {
    KeyValues kv = minimal("quench");
    kv.emplace_back(k, v);
    return kv;
  };
  EXPECT_THROW(config_from_key_values(with("colour", "red")), InvalidArgument);
  EXPECT_THROW(config_from_key_values(with("dt", "-0.1")), InvalidArgument);
  EXPECT_THROW(config_from_key_values(with("dt", "fast")), InvalidArgument);
  EXPECT_THROW(config_from_key_values(with("trotter_order", "3")), InvalidArgument);
  EXPECT_THROW(config_from_key_values(with("spsa.alpha", "0.2")), InvalidArgument);
  EXPECT_THROW(config_from_key_values(with("shots_per_eval", "-5")), InvalidArgument);
  EXPECT_THROW(config_from_key_values(with("seeds", "1,2")), InvalidArgument);
  EXPECT_THROW(config_from_key_values(with("ed_sites", "20")), InvalidArgument);
  EXPECT_THROW(config_from_key_values(with("parallel", "maybe")), InvalidArgument);
  EXPECT_THROW(config_from_key_values(minimal("ensemble")), InvalidArgument);  // n_runs defaults to 1
  EXPECT_THROW(config_from_key_values(minimal("gauge_analysis")), InvalidArgument);
  KeyValues trotter = minimal("trotter_study");
  trotter.emplace_back("coarse_dt", "0.25");
  EXPECT_THROW(config_from_key_values(trotter), InvalidArgument);
}

TEST(Config, ResolvedFormRoundTrips) {
  KeyValues kv = minimal("ensemble");
  kv.insert(kv.end(), {{"n_runs", "3"}, {"seeds", "4,5,6"}, {"spsa.steps", "9"}, {"spsa.a", "0.37"},
                       {"template", "full15"}, {"init_scheme", "copy"}, {"run.wall_seconds", "1.5"}});
  const ExperimentConfig c = config_from_key_values(kv);
  EXPECT_EQ(c.seeds, (std::vector<std::uint64_t>{4, 5, 6}));
  EXPECT_EQ(c.spsa.steps, 9);
  EXPECT_EQ(c.spsa.a, 0.37);
  const KeyValues resolved = config_to_key_values(c);
  EXPECT_EQ(config_to_key_values(config_from_key_values(resolved)), resolved);
}

TEST(Config, StochasticOptionsCarryTheConfig) {
  KeyValues kv = minimal("quench");
  kv.insert(kv.end(), {{"shots_per_eval", "123"}, {"seed", "9"}, {"spsa_seed", "11"}, {"auto_gain", "false"}});
  const StochasticOptions o = stochastic_options(config_from_key_values(kv));
  EXPECT_EQ(o.shots_per_eval, 123);
  EXPECT_EQ(o.seed, 9u);
  EXPECT_EQ(o.spsa_seed, 11u);
  EXPECT_FALSE(o.auto_gain);
}

TEST(Run, OracleCurveTableAndManifest) {
  const auto dir = temp_dir("oracle");
  KeyValues kv = minimal("oracle_curve");
  kv.insert(kv.end(), {{"ed_sites", "8"}, {"t_max", "1.0"}, {"output", "curves/oracle"}});
  const ExperimentConfig c = config_from_key_values(kv);
  const RunOutcome out = run_experiment(c, dir);
  EXPECT_TRUE(out.complete);
  EXPECT_EQ(out.table_path, dir / "curves" / "oracle.csv");
  const Table t = load_table(out.table_path);
  EXPECT_EQ(t.columns, (std::vector<std::string>{"t", "echo_ff", "echo_ed"}));
  EXPECT_EQ(t.rows.size(), 11u);
  EXPECT_NE(find_value(t.meta, "critical_time_0"), nullptr);
  EXPECT_NEAR(t.rows[5][1], loschmidt_exact_ff(1.5, 0.2, 0.5), 1e-15);

  const KeyValues manifest = load_key_values(out.manifest_path);
  for (const std::string key : {"run.code_version", "run.wall_seconds", "run.total_shots", "run.complete"}) {
    EXPECT_NE(find_value(manifest, key), nullptr) << key;
  }
  EXPECT_EQ(*find_value(manifest, "run.complete"), "true");
  EXPECT_EQ(config_from_key_values(manifest).quench.g1, 0.2);
}

TEST(Run, ManifestAloneReproducesTheTable) {
  const auto dir = temp_dir("rerun");
  KeyValues kv = minimal("quench");
  kv.insert(kv.end(), {{"shots_per_eval", "500"}, {"output", "first"}});
  const RunOutcome first = run_experiment(config_from_key_values(kv), dir);
  KeyValues manifest = load_key_values(first.manifest_path);
  manifest.emplace_back("output", "second");
  const RunOutcome second = run_experiment(config_from_key_values(manifest), dir);
  EXPECT_EQ(slurp(first.table_path), slurp(second.table_path));
  EXPECT_EQ(first.total_shots, second.total_shots);
  EXPECT_GT(first.total_shots, 0);
}

TEST(Run, TrotterStudyColumns) {
  KeyValues kv = minimal("trotter_study");
  kv.insert(kv.end(), {{"t_max", "1.0"}, {"coarse_dt", "0.5"}});
  std::string failure;
  const Table t = experiment_table(config_from_key_values(kv), nullptr, &failure);
  EXPECT_TRUE(failure.empty()) << failure;
  EXPECT_EQ(t.columns, (std::vector<std::string>{"t", "echo_order1", "echo_order2", "echo_ff"}));
  ASSERT_EQ(t.rows.size(), 3u);
  EXPECT_NEAR(t.rows[2][0], 1.0, 1e-12);
  EXPECT_LT(std::abs(t.rows[2][1] - t.rows[2][2]), 0.05);
}

TEST(Run, GaugeAnalysisOfAStoredTrajectory) {
  const auto dir = temp_dir("gauge");
  Trajectory stored = exact_short();
  for (auto& p : stored.points) p.params = x_gauge_rotate(p.params, 0.4);
  save_table(dir / "stored.csv", trajectory_table(stored));
  KeyValues kv = minimal("gauge_analysis");
  kv.back().second = "0.5";
  kv.emplace_back("input", (dir / "stored.csv").string());
  const Table t = experiment_table(config_from_key_values(kv));
  const auto raw = t.column_values("raw_distance");
  const auto aligned = t.column_values("aligned_distance");
  const auto angle = t.column_values("gauge_angle");
  for (std::size_t k = 0; k < raw.size(); ++k) {
    EXPECT_GT(raw[k], 0.1);
    EXPECT_LT(aligned[k], 1e-4) << "step " << k;
    EXPECT_NEAR(std::abs(angle[k]), 0.4, 1e-4);
  }
  KeyValues other = kv;
  for (auto& [k, v] : other) {
    if (k == "g1") v = "0.3";
  }
  EXPECT_THROW(experiment_table(config_from_key_values(other)), InvalidArgument);
}

TEST(Compare, SelfComparisonIsZero) {
  const CompareReport r = compare_trajectories(exact_short(), exact_short());
  EXPECT_EQ(r.rms_echo, 0.0);
  EXPECT_LT(r.raw, 1e-12);
  EXPECT_LT(r.aligned, 1e-12);
  EXPECT_NEAR(r.gauge_component + r.reparam_component + r.residual, r.raw, 1e-15);
}

TEST(Compare, GaugeRotatedCopyAlignsToZero) {
  Trajectory rotated = exact_short();
  for (auto& p : rotated.points) p.params = x_gauge_rotate(p.params, -0.9);
  const CompareReport r = compare_trajectories(exact_short(), rotated);
  EXPECT_LT(r.rms_echo, 1e-9);
  EXPECT_GT(r.raw, 0.1);
  EXPECT_LT(r.aligned, 1e-4);
  EXPECT_GT(r.gauge_component, 0.9 * r.raw);
  EXPECT_GE(r.gauge_component, r.reparam_component);
  const Table t = compare_table(r);
  EXPECT_EQ(t.rows.size(), r.rows.size());
  EXPECT_EQ(t.columns.size(), 12u);
}

TEST(Compare, RejectsMismatchedSpecs) {
  Trajectory other = exact_short();
  other.spec.g1 = 0.3;
  EXPECT_THROW(compare_trajectories(exact_short(), other), InvalidArgument);
  Trajectory full = exact_short();
  full.tmpl = Template::Full15;
  EXPECT_THROW(compare_trajectories(exact_short(), full), InvalidArgument);
}
