#include "dqpt/evolve.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "dqpt/circuits.hpp"
#include "dqpt/optimize.hpp"
#include "dqpt/transfer.hpp"

namespace dqpt {

namespace {

RVector random_angles(Template t, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> angle(-kPi, kPi);
  RVector x(static_cast<Eigen::Index>(angle_count(t)));
  for (Eigen::Index i = 0; i < x.size(); ++i) x(i) = angle(rng);
  return x;
}

MixedTransfer evolution_transfer(const MpsTensor& current, const MpsTensor& candidate, const QuenchSpec& spec) {
  if (spec.trotter_order == 1) {
    return transfer_matrix(current, candidate, trotter_gate_first_order(spec.J, spec.g1, spec.dt));
  }
  return transfer_matrix(current, candidate, trotter_gates_second_order(spec.J, spec.g1, spec.dt));
}

}  // namespace

std::string to_string(InitScheme s) {
  switch (s) {
    case InitScheme::Random: return "random";
    case InitScheme::Copy: return "copy";
    case InitScheme::Extrapolate: return "extrapolate";
  }
  return "extrapolate";
}

InitScheme init_scheme_from_string(std::string_view name) {
  if (name == "random") return InitScheme::Random;
  if (name == "copy") return InitScheme::Copy;
  if (name == "extrapolate") return InitScheme::Extrapolate;
  throw InvalidArgument("unknown init scheme '" + std::string(name) + "'");
}

std::vector<double> Trajectory::times() const {
  std::vector<double> out;
  for (const auto& p : points) out.push_back(p.t);
  return out;
}

std::vector<double> Trajectory::echoes() const {
  std::vector<double> out;
  for (const auto& p : points) out.push_back(p.echo);
  return out;
}

AnsatzParams ground_state_optimize(double J, double g, Template t, std::uint64_t seed, int restarts) {
  if (!std::isfinite(J) || !std::isfinite(g)) throw InvalidArgument("ground_state_optimize: non-finite coupling");
  if (restarts < 1) throw InvalidArgument("ground_state_optimize: need at least one restart");
  auto energy = [&](const RVector& x) { return energy_density(mps_tensor(AnsatzParams(t, x)), J, g); };
  std::mt19937_64 rng(seed);
  opt::BfgsOptions options;
  options.grad_tol = 1e-8;
  std::optional<opt::BfgsResult> best;
  double last = std::numeric_limits<double>::quiet_NaN();
  for (int r = 0; r < restarts; ++r) {
    try {
      const opt::BfgsResult fit = opt::minimize_bfgs(energy, random_angles(t, rng), options);
      last = fit.value;
      if (!best || fit.value < best->value) best = fit;
    } catch (const NumericFailure& e) {
      last = e.residual;
    }
  }
  if (!best) throw NumericFailure("ground_state_optimize: no restart converged", last);
  // Final polish from the best start.
  options.grad_tol = 1e-10;
  const opt::BfgsResult polished = opt::minimize_bfgs(energy, best->x, options);
  return AnsatzParams(t, polished.value <= best->value ? polished.x : best->x);
}

AnsatzParams extrapolate(const AnsatzParams& prev, const AnsatzParams& curr) {
  if (prev.tmpl != curr.tmpl) throw InvalidArgument("extrapolate: template mismatch");
  return AnsatzParams(curr.tmpl, 2.0 * curr.angles - prev.angles);
}

double echo_density(const AnsatzParams& params_0, const AnsatzParams& params_t) {
  const cplx lambda = fidelity_density(transfer_matrix(mps_tensor(params_0), mps_tensor(params_t)));
  return -std::log(std::norm(lambda));
}

Trajectory evolve_exact_in_ansatz(const QuenchSpec& spec, Template tmpl, const ExactOptions& options) {
  spec.validate();
  Trajectory traj;
  traj.spec = spec;
  traj.tmpl = tmpl;
  traj.scheme = InitScheme::Extrapolate;
  const AnsatzParams gs = options.ground_state ? *options.ground_state : ground_state_optimize(spec.J, spec.g0, tmpl);
  if (gs.tmpl != tmpl) throw InvalidArgument("evolve_exact_in_ansatz: ground state template mismatch");
  traj.points.push_back({0.0, gs, echo_density(gs, gs), 0, 0.0});

  opt::BfgsOptions bfgs;
  bfgs.grad_tol = 1e-10;
  AnsatzParams prev = gs, curr = gs;
  for (int k = 1; k <= spec.steps(); ++k) {
    const MpsTensor a = mps_tensor(curr);
    const FixedPointPair fixed = approx_fixed_points(a);
    auto cost = [&](const RVector& x) {
      const AnsatzParams w(tmpl, x);
      const MpsTensor b = mps_tensor(w);
      const MixedTransfer e = evolution_transfer(a, b, spec);
      if (options.cost == ExactOptions::Cost::Eigenvalue) return -std::abs(fidelity_density(e));
      if (e.matrix.rows() != fixed.right.size()) {
        throw InvalidArgument("evolve_exact_in_ansatz: power-method cost needs first-order Trotter");
      }
      const FixedPointPair fp = options.boundary_from_candidate ? approx_fixed_points(b) : fixed;
      // |lambda| <= 1, so an estimate above one means C_{n-1} is nearly
      // cancelling; fold it back so the optimiser cannot chase that pole.
      const double r = std::abs(power_method_ratio(e, fp, options.power_order));
      return r <= 1.0 ? -r : r - 2.0;
    };
    try {
      std::vector<RVector> seeds{curr.angles};
      if (k > 1) seeds.push_back(extrapolate(prev, curr).angles);
      std::optional<opt::BfgsResult> best;
      for (const auto& s : seeds) {
        const opt::BfgsResult fit = opt::minimize_bfgs(cost, s, bfgs);
        if (!best || fit.value < best->value) best = fit;
      }
      const AnsatzParams next = unwrap_to(curr, AnsatzParams(tmpl, best->x));
      prev = curr;
      curr = next;
      traj.points.push_back({k * spec.dt, curr, echo_density(gs, curr), 0, 1.0 + best->value});
    } catch (const std::exception& e) {
      traj.complete = false;
      traj.failure = "step " + std::to_string(k) + ": " + e.what();
      break;
    }
  }
  return traj;
}

SpsaSchedule default_stochastic_schedule(int steps) {
  SpsaSchedule s = SpsaSchedule::with_steps(steps);
  s.max_step = 0.02;
  return s;
}

double step_cost(const AnsatzParams& current, const AnsatzParams& candidate, const QuenchSpec& spec,
                 std::int64_t shots, std::mt19937_64& rng) {
  const CostCircuit upper =
      build_cost_circuit(current, candidate, spec.J, spec.g1, spec.dt, spec.trotter_order, kMaxCostCells);
  const CostCircuit lower =
      build_cost_circuit(current, candidate, spec.J, spec.g1, spec.dt, spec.trotter_order, kMaxCostCells - 1);
  if (shots == 0) {
    const double den = exact_success_probability(lower);
    if (den <= 0.0) return 1.0;
    return 1.0 - std::min(exact_success_probability(upper) / den, 1.0);
  }
  const ShotEstimate hi = sample(upper, shots, rng);
  const ShotEstimate lo = sample(lower, shots, rng);
  return 1.0 - ratio_estimate(hi, lo);
}

Trajectory evolve_stochastic(const QuenchSpec& spec, const StochasticOptions& options) {
  spec.validate();
  options.spsa.validate();
  if (options.shots_per_eval < 0) throw InvalidArgument("evolve_stochastic: shots_per_eval must be non-negative");
  if (options.bootstrap_factor < 1) throw InvalidArgument("evolve_stochastic: bootstrap_factor must be at least 1");

  Trajectory traj;
  traj.spec = spec;
  traj.tmpl = options.tmpl;
  traj.seed = options.seed;
  traj.scheme = options.scheme;
  const AnsatzParams gs =
      options.ground_state ? *options.ground_state : ground_state_optimize(spec.J, spec.g0, options.tmpl);
  if (gs.tmpl != options.tmpl) throw InvalidArgument("evolve_stochastic: ground state template mismatch");
  traj.points.push_back({0.0, gs, echo_density(gs, gs), 0, 0.0});

  std::mt19937_64 rng(options.seed);
  std::int64_t shots = 0;
  SpsaSchedule schedule = options.spsa;
  AnsatzParams prev = gs, curr = gs;
  try {
    for (int k = 1; k <= spec.steps(); ++k) {
      const AnsatzParams current = curr;
      auto cost = [&](const RVector& x) {
        return step_cost(current, AnsatzParams(options.tmpl, x), spec, options.shots_per_eval, rng);
      };
      const bool bootstrap = k <= 2;
      RVector seed;
      if (options.scheme == InitScheme::Random) {
        seed = random_angles(options.tmpl, rng);
      } else if (options.scheme == InitScheme::Copy || bootstrap) {
        seed = curr.angles;
      } else {
        seed = extrapolate(prev, curr).angles;
      }
      if (k == 1 && options.auto_gain) {
        const GainCalibration cal = calibrate_gain(cost, seed, schedule, options.spsa_seed, 4, options.gain_max_move);
        schedule.a = cal.a;
        shots += static_cast<std::int64_t>(cal.evaluations) * kShotsCircuitsPerEval * options.shots_per_eval;
      }
      SpsaSchedule step_schedule = schedule;
      if (bootstrap) {
        step_schedule.steps = schedule.steps * options.bootstrap_factor;
        step_schedule.A = schedule.A * options.bootstrap_factor;
      }
      const SpsaResult result = spsa_optimize(cost, seed, step_schedule, options.spsa_seed + static_cast<std::uint64_t>(k));
      shots += static_cast<std::int64_t>(result.evaluations) * kShotsCircuitsPerEval * options.shots_per_eval;

      const AnsatzParams next = unwrap_to(curr, AnsatzParams(options.tmpl, result.x));
      std::mt19937_64 unused(0);
      const double exact = step_cost(curr, next, spec, 0, unused);
      prev = curr;
      curr = next;
      traj.points.push_back({k * spec.dt, curr, echo_density(gs, curr), shots, exact});
    }
  } catch (const std::exception& e) {
    traj.complete = false;
    traj.failure = e.what();
  }
  return traj;
}

}  // namespace dqpt
