#include "dqpt/ensemble.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace dqpt {

namespace {

StochasticOptions prepared(const QuenchSpec& spec, const StochasticOptions& base, int n_runs,
                           const std::vector<std::uint64_t>& seeds) {
  spec.validate();
  if (n_runs < 2) throw InvalidArgument("ensemble_run: n_runs must be at least 2");
  if (!seeds.empty() && seeds.size() != static_cast<std::size_t>(n_runs)) {
    throw InvalidArgument("ensemble_run: seeds must be empty or have n_runs entries");
  }
  StochasticOptions opts = base;
  if (!opts.ground_state) opts.ground_state = ground_state_optimize(spec.J, spec.g0, opts.tmpl);
  return opts;
}

}  // namespace

double EnsembleStats::std_dev(std::size_t i) const { return std::sqrt(std::max(variance.at(i), 0.0)); }

double EnsembleStats::envelope_width(double t_lo, double t_hi) const {
  double sum = 0.0;
  int n = 0;
  for (std::size_t i = 0; i < times.size(); ++i) {
    if (times[i] < t_lo - 1e-12 || times[i] > t_hi + 1e-12) continue;
    sum += std_dev(i);
    ++n;
  }
  if (n == 0) throw InvalidArgument("envelope_width: empty time window");
  return sum / n;
}

double EnsembleStats::mean_variance(double t_lo, double t_hi) const {
  double sum = 0.0;
  int n = 0;
  for (std::size_t i = 0; i < times.size(); ++i) {
    if (times[i] < t_lo - 1e-12 || times[i] > t_hi + 1e-12) continue;
    sum += variance[i];
    ++n;
  }
  if (n == 0) throw InvalidArgument("mean_variance: empty time window");
  return sum / n;
}

EnsembleStats ensemble_statistics(const std::vector<Trajectory>& runs) {
  if (runs.size() < 2) throw InvalidArgument("ensemble_statistics: need at least two runs");
  std::size_t len = std::numeric_limits<std::size_t>::max();
  for (const auto& r : runs) len = std::min(len, r.points.size());
  EnsembleStats s;
  s.n_runs = static_cast<int>(runs.size());
  const double n = static_cast<double>(runs.size());
  for (std::size_t i = 0; i < len; ++i) {
    double sum = 0.0, lo = std::numeric_limits<double>::infinity(), hi = -lo;
    for (const auto& r : runs) {
      const double e = r.points[i].echo;
      sum += e;
      lo = std::min(lo, e);
      hi = std::max(hi, e);
    }
    const double mean = sum / n;
    double ss = 0.0;
    for (const auto& r : runs) ss += (r.points[i].echo - mean) * (r.points[i].echo - mean);
    s.times.push_back(runs.front().points[i].t);
    s.mean.push_back(mean);
    s.variance.push_back(ss / (n - 1.0));
    s.lower.push_back(lo);
    s.upper.push_back(hi);
  }
  for (const auto& r : runs) {
    s.complete_runs += r.complete ? 1 : 0;
    s.total_shots += r.total_shots();
  }
  return s;
}

std::vector<std::uint64_t> ensemble_seeds(const StochasticOptions& base, int n_runs,
                                          const std::vector<std::uint64_t>& seeds) {
  if (n_runs < 2) throw InvalidArgument("ensemble_seeds: n_runs must be at least 2");
  if (!seeds.empty()) {
    if (seeds.size() != static_cast<std::size_t>(n_runs)) {
      throw InvalidArgument("ensemble_seeds: seeds must be empty or have n_runs entries");
    }
    return seeds;
  }
  std::vector<std::uint64_t> out(static_cast<std::size_t>(n_runs));
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = base.seed + i;
  return out;
}

namespace serial {
std::vector<Trajectory> ensemble_run(const QuenchSpec& spec, const StochasticOptions& base, int n_runs,
                                     const std::vector<std::uint64_t>& seeds) {
  const StochasticOptions opts = prepared(spec, base, n_runs, seeds);
  const auto run_seeds = ensemble_seeds(base, n_runs, seeds);
  std::vector<Trajectory> runs;
  runs.reserve(run_seeds.size());
  for (std::uint64_t seed : run_seeds) {
    StochasticOptions o = opts;
    o.seed = seed;
    runs.push_back(evolve_stochastic(spec, o));
  }
  return runs;
}
}  // namespace serial

namespace parallel {
std::vector<Trajectory> ensemble_run(const QuenchSpec& spec, const StochasticOptions& base, int n_runs,
                                     const std::vector<std::uint64_t>& seeds) {
  const StochasticOptions opts = prepared(spec, base, n_runs, seeds);
  const auto run_seeds = ensemble_seeds(base, n_runs, seeds);
  std::vector<Trajectory> runs(run_seeds.size());
  const std::int64_t n = static_cast<std::int64_t>(run_seeds.size());
  // Members are independent and each owns its generators, so the result does
  // not depend on the thread count.
#pragma omp parallel for schedule(dynamic)
  for (std::int64_t i = 0; i < n; ++i) {
    StochasticOptions o = opts;
    o.seed = run_seeds[static_cast<std::size_t>(i)];
    runs[static_cast<std::size_t>(i)] = evolve_stochastic(spec, o);
  }
  return runs;
}
}  // namespace parallel

}  // namespace dqpt
