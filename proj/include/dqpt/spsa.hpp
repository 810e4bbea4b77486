#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "dqpt/qcore.hpp"

// Simultaneous-perturbation stochastic approximation.
namespace dqpt {

struct SpsaSchedule {
  double a = 0.2;
  double c = 0.1;
  double A = 0.6;
  double alpha = 0.602;
  double gamma = 0.101;
  int steps = 6;
  double max_step = 0.0;  // per-component clip on each update; 0 disables

  void validate() const;  // throws InvalidArgument naming the field

  /// Standard exponents, A = 10% of the iteration count.
  static SpsaSchedule with_steps(int steps);

  double gain(int k) const;         // a_k = a / (k + 1 + A)^alpha
  double perturbation(int k) const; // c_k = c / (k + 1)^gamma
};

using StochasticCost = std::function<double(const RVector&)>;

struct SpsaResult {
  RVector x;                          // final iterate
  std::vector<double> cost_history;   // mean of the two evaluations at each iteration
  int evaluations = 0;
};

/// Minimizes a noisy cost. Rademacher directions drawn from mt19937_64(rng_seed),
/// so the run is deterministic given the seed and a deterministic cost.
SpsaResult spsa_optimize(const StochasticCost& cost, RVector seed, const SpsaSchedule& schedule,
                         std::uint64_t rng_seed);

struct GainCalibration {
  double a = 0.0;
  int evaluations = 0;
};

/// Picks `a` so the first update moves each angle by about `max_move` on
/// average, from `samples` gradient estimates at x.
GainCalibration calibrate_gain(const StochasticCost& cost, const RVector& x, const SpsaSchedule& schedule,
                               std::uint64_t rng_seed, int samples = 4, double max_move = 0.1);

}  // namespace dqpt
