#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include "dqpt/ansatz.hpp"
#include "dqpt/spsa.hpp"
#include "dqpt/tfim.hpp"

namespace dqpt {

enum class InitScheme { Random, Copy, Extrapolate };

std::string to_string(InitScheme s);
InitScheme init_scheme_from_string(std::string_view name);

struct TrajectoryPoint {
  double t = 0.0;
  AnsatzParams params;
  double echo = 0.0;
  std::int64_t cumulative_shots = 0;
  double cost = 0.0;  // 1 - exact success probability (stochastic) or 1 - |lambda| (exact)
};

struct Trajectory {
  QuenchSpec spec;
  Template tmpl = Template::Reduced8;
  std::uint64_t seed = 0;
  InitScheme scheme = InitScheme::Extrapolate;
  std::vector<TrajectoryPoint> points;
  bool complete = true;
  std::string failure;  // set when complete is false

  std::vector<double> times() const;
  std::vector<double> echoes() const;
  std::int64_t total_shots() const { return points.empty() ? 0 : points.back().cumulative_shots; }
};

/// Minimizes the transfer-matrix energy density over `restarts` seeded
/// starts. Throws NumericFailure if no start converges.
AnsatzParams ground_state_optimize(double J, double g, Template t, std::uint64_t seed = 1, int restarts = 8);

/// 2 curr - prev, componentwise on unwrapped angles.
AnsatzParams extrapolate(const AnsatzParams& prev, const AnsatzParams& curr);

/// -log |lambda(E_{A(0), A(t)})|^2, the rate function per site.
double echo_density(const AnsatzParams& params_0, const AnsatzParams& params_t);

struct ExactOptions {
  enum class Cost { Eigenvalue, PowerMethod };
  Cost cost = Cost::Eigenvalue;
  int power_order = 2;
  bool boundary_from_candidate = false;  // power method: fixed points from W instead of U(t)
  std::optional<AnsatzParams> ground_state;
};

/// Deterministic reference: at each step maximizes |lambda| of the
/// evolution-inserted mixed transfer matrix with BFGS.
Trajectory evolve_exact_in_ansatz(const QuenchSpec& spec, Template tmpl, const ExactOptions& options = {});

/// Six SPSA updates per time step, each update clipped to 0.02 rad per angle.
SpsaSchedule default_stochastic_schedule(int steps = 6);

struct StochasticOptions {
  Template tmpl = Template::Reduced8;
  InitScheme scheme = InitScheme::Extrapolate;
  SpsaSchedule spsa = default_stochastic_schedule();
  bool auto_gain = true;                 // calibrate spsa.a once per run
  double gain_max_move = 0.01;           // radians; target first-step move for the calibration
  std::int64_t shots_per_eval = 100000;  // per circuit; 0 = exact cost, no shot noise
  std::uint64_t seed = 1;             // shot noise and random initialisation
  std::uint64_t spsa_seed = 7;        // perturbation directions
  int bootstrap_factor = 4;           // SPSA budget multiplier on the first two steps
  std::optional<AnsatzParams> ground_state;
};

/// Circuits sampled per cost evaluation (three-cell and two-cell blocks).
inline constexpr int kShotsCircuitsPerEval = 2;

/// The cost of one stochastic step: 1 - P3/P2 from the three- and two-cell
/// cost circuits, each sampled with `shots`, or the exact ratio when shots is 0.
double step_cost(const AnsatzParams& current, const AnsatzParams& candidate, const QuenchSpec& spec,
                 std::int64_t shots, std::mt19937_64& rng);

/// Stochastic time evolution. On an exception the trajectory so far is
/// returned with complete = false.
Trajectory evolve_stochastic(const QuenchSpec& spec, const StochasticOptions& options);

}  // namespace dqpt
