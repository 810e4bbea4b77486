// dqpt run <config> | compare <a> <b> --out <path> | validate <config>
// Exit codes: 0 success, 1 invalid input, 2 numeric failure, 3 I/O.
#include <cstdlib>
#include <iostream>

#include "CLI11.hpp"
#include "dqpt/experiment.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInvalid = 1;
constexpr int kExitNumeric = 2;
constexpr int kExitIo = 3;

std::filesystem::path default_output_dir() {
  const char* env = std::getenv("DQPT_OUTPUT_DIR");
  return env ? std::filesystem::path(env) : std::filesystem::path();
}

int cmd_run(const std::string& config_path, const std::string& out_dir) {
  const dqpt::ExperimentConfig config = dqpt::config_from_key_values(dqpt::load_key_values(config_path));
  const std::filesystem::path dir = out_dir.empty() ? default_output_dir() : std::filesystem::path(out_dir);
  const dqpt::RunOutcome out = dqpt::run_experiment(config, dir);
  std::cout << "table     " << out.table_path.string() << "\n"
            << "manifest  " << out.manifest_path.string() << "\n"
            << "shots     " << out.total_shots << "\n"
            << "seconds   " << out.wall_seconds << "\n";
  if (!out.complete) {
    std::cerr << "dqpt: run incomplete: " << out.failure << "\n";
    return kExitNumeric;
  }
  return kExitOk;
}

int cmd_compare(const std::string& a, const std::string& b, const std::string& out) {
  const dqpt::Trajectory ta = dqpt::trajectory_from_table(dqpt::load_table(a));
  const dqpt::Trajectory tb = dqpt::trajectory_from_table(dqpt::load_table(b));
  const dqpt::CompareReport r = dqpt::compare_trajectories(ta, tb);
  dqpt::save_table(out, dqpt::compare_table(r));
  std::cout << "rms_echo           " << r.rms_echo << "\n"
            << "raw_distance       " << r.raw << "\n"
            << "gauge_component    " << r.gauge_component << "\n"
            << "reparam_component  " << r.reparam_component << "\n"
            << "residual           " << r.residual << "\n";
  return kExitOk;
}

int cmd_validate(const std::string& config_path) {
  const dqpt::ExperimentConfig config = dqpt::config_from_key_values(dqpt::load_key_values(config_path));
  dqpt::write_key_values(std::cout, dqpt::config_to_key_values(config));
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Loschmidt-echo quench experiments on time-like iMPS circuits"};
  app.require_subcommand(1);

  std::string run_config, run_out;
  auto* run = app.add_subcommand("run", "run the experiment described by a config file");
  run->add_option("config", run_config, "key = value config")->required();
  run->add_option("--out-dir", run_out, "directory for relative output stems (default $DQPT_OUTPUT_DIR)");

  std::string cmp_a, cmp_b, cmp_out;
  auto* compare = app.add_subcommand("compare", "align two trajectory tables and report the deviation");
  compare->add_option("a", cmp_a, "reference trajectory table")->required();
  compare->add_option("b", cmp_b, "trajectory table to align onto a")->required();
  compare->add_option("--out", cmp_out, "report table path")->required();

  std::string val_config;
  auto* validate = app.add_subcommand("validate", "check a config and print it fully resolved");
  validate->add_option("config", val_config, "key = value config")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitInvalid;
  }

  try {
    if (*run) return cmd_run(run_config, run_out);
    if (*compare) return cmd_compare(cmp_a, cmp_b, cmp_out);
    if (*validate) return cmd_validate(val_config);
  } catch (const dqpt::IoError& e) {
    std::cerr << "dqpt: " << e.what() << "\n";
    return kExitIo;
  } catch (const dqpt::InvalidArgument& e) {
    std::cerr << "dqpt: " << e.what() << "\n";
    return kExitInvalid;
  } catch (const dqpt::NumericFailure& e) {
    std::cerr << "dqpt: " << e.what() << " (residual " << e.residual << ")\n";
    return kExitNumeric;
  } catch (const dqpt::ResourceLimit& e) {
    std::cerr << "dqpt: " << e.what() << "\n";
    return kExitNumeric;
  }
  return kExitInvalid;
}
