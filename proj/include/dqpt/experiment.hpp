#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "dqpt/evolve.hpp"
#include "dqpt/io.hpp"

// Configuration-driven experiments and the trajectory comparison report.
namespace dqpt {

enum class ExperimentKind { Quench, ExactInAnsatz, Ensemble, OracleCurve, GaugeAnalysis, TrotterStudy };

std::string to_string(ExperimentKind k);
ExperimentKind experiment_kind_from_string(std::string_view name);

struct ExperimentConfig {
  ExperimentKind kind = ExperimentKind::Quench;
  QuenchSpec quench;
  Template tmpl = Template::Reduced8;
  InitScheme scheme = InitScheme::Extrapolate;
  SpsaSchedule spsa = default_stochastic_schedule();
  bool auto_gain = true;
  double gain_max_move = 0.01;
  std::int64_t shots_per_eval = 100000;
  std::uint64_t seed = 1;
  std::uint64_t spsa_seed = 7;
  int n_runs = 1;
  std::vector<std::uint64_t> seeds;  // ensemble; empty = seed, seed+1, ...
  bool parallel = true;              // ensemble members across threads
  int ed_sites = 12;                 // oracle_curve
  int k_points = 2048;               // oracle_curve
  double coarse_dt = 0.5;            // trotter_study, second-order step
  std::string input;                 // gauge_analysis: stored trajectory table
  std::string output;                // path stem; .csv and .manifest are appended
};

/// Parses and validates a key-value document. Required: kind, g0, g1, dt,
/// t_max. Unknown keys are rejected; keys starting with "run." (manifest
/// bookkeeping) are ignored. Errors throw InvalidArgument naming the field.
ExperimentConfig config_from_key_values(const KeyValues& kv);

/// Fully resolved configuration; config_from_key_values inverts it exactly.
KeyValues config_to_key_values(const ExperimentConfig& config);

StochasticOptions stochastic_options(const ExperimentConfig& config);

struct RunOutcome {
  std::filesystem::path table_path;
  std::filesystem::path manifest_path;
  bool complete = true;
  std::string failure;
  std::int64_t total_shots = 0;
  double wall_seconds = 0.0;
};

/// Resolves the output stem against `output_dir` when it is relative.
std::filesystem::path resolve_output(const ExperimentConfig& config, const std::filesystem::path& output_dir);

/// Runs the experiment and writes <stem>.csv and <stem>.manifest.
RunOutcome run_experiment(const ExperimentConfig& config, const std::filesystem::path& output_dir);

/// Builds the data table without writing anything.
Table experiment_table(const ExperimentConfig& config, std::int64_t* total_shots = nullptr,
                       std::string* failure = nullptr);

struct AlignmentRow {
  int step = 0;
  double t = 0.0;
  double echo_a = 0.0;
  double echo_b = 0.0;
  double mixed_fidelity = 1.0;    // |lambda(E_{a,b})|
  double gauge_angle = 0.0;       // x-gauge angle taking b into a's gauge
  double gauge_residual = 0.0;    // 1 - |lambda| from match_gauge
  double reparam_defect = 0.0;    // fidelity lost by the reparametrisation step
  bool reparam_used = false;      // reparametrised params were closer and kept
  double raw_distance = 0.0;      // max-norm angle distance
  double gauge_distance = 0.0;    // after the x-gauge rotation
  double aligned_distance = 0.0;  // after gauge and reparametrisation
};

struct CompareReport {
  double rms_echo = 0.0;
  double raw = 0.0;  // mean over steps
  double gauge_aligned = 0.0;
  double aligned = 0.0;
  // raw = gauge_component + reparam_component + residual
  double gauge_component = 0.0;
  double reparam_component = 0.0;
  double residual = 0.0;
  std::vector<AlignmentRow> rows;
};

/// Aligns b onto a step by step: x-gauge from match_gauge, then a
/// reparametrisation pinning phi7 to a's value, kept only when it brings the
/// angles closer. Full15 trajectories skip both alignments. Throws
/// InvalidArgument when the quench specs differ.
CompareReport compare_trajectories(const Trajectory& a, const Trajectory& b);

Table compare_table(const CompareReport& report);

}  // namespace dqpt
