#pragma once

#include <cstdint>
#include <vector>

#include "dqpt/evolve.hpp"

// Repeated stochastic runs that differ only in their shot-noise seed.
namespace dqpt {

struct EnsembleStats {
  std::vector<double> times;
  std::vector<double> mean;
  std::vector<double> variance;  // unbiased, across runs
  std::vector<double> lower;     // pointwise min
  std::vector<double> upper;     // pointwise max
  int n_runs = 0;
  int complete_runs = 0;
  std::int64_t total_shots = 0;

  double std_dev(std::size_t i) const;
  /// Mean standard deviation over points with t in [t_lo, t_hi].
  double envelope_width(double t_lo, double t_hi) const;
  /// Mean variance over points with t in [t_lo, t_hi].
  double mean_variance(double t_lo, double t_hi) const;
};

/// Statistics over the common prefix of the runs' time grids.
EnsembleStats ensemble_statistics(const std::vector<Trajectory>& runs);

/// Run seed i is seeds[i] if given, otherwise base.seed + i. The ground state
/// is prepared once and shared; the SPSA direction seed is shared too, so
/// members differ only in sampling noise.
std::vector<std::uint64_t> ensemble_seeds(const StochasticOptions& base, int n_runs,
                                          const std::vector<std::uint64_t>& seeds);

namespace serial {
std::vector<Trajectory> ensemble_run(const QuenchSpec& spec, const StochasticOptions& base, int n_runs,
                                     const std::vector<std::uint64_t>& seeds = {});
}
namespace parallel {
std::vector<Trajectory> ensemble_run(const QuenchSpec& spec, const StochasticOptions& base, int n_runs,
                                     const std::vector<std::uint64_t>& seeds = {});
}

}  // namespace dqpt
