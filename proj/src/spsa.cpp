#include "dqpt/spsa.hpp"

#include <cmath>
#include <random>
#include <string>

namespace dqpt {

namespace {

RVector rademacher(Eigen::Index n, std::mt19937_64& rng) {
  std::bernoulli_distribution coin(0.5);
  RVector d(n);
  for (Eigen::Index i = 0; i < n; ++i) d(i) = coin(rng) ? 1.0 : -1.0;
  return d;
}

}  // namespace

void SpsaSchedule::validate() const {
  auto positive = [](double v, const char* name) {
    if (!(v > 0.0) || !std::isfinite(v)) throw InvalidArgument(std::string("spsa: field '") + name + "' must be positive");
  };
  positive(a, "a");
  positive(c, "c");
  if (!(A >= 0.0) || !std::isfinite(A)) throw InvalidArgument("spsa: field 'A' must be non-negative");
  if (!(alpha > 0.5 && alpha <= 1.0)) throw InvalidArgument("spsa: field 'alpha' must lie in (0.5, 1]");
  if (!(gamma > 0.0 && gamma <= 0.5)) throw InvalidArgument("spsa: field 'gamma' must lie in (0, 0.5]");
  if (steps < 0) throw InvalidArgument("spsa: field 'steps' must be non-negative");
  if (!(max_step >= 0.0) || !std::isfinite(max_step)) {
    throw InvalidArgument("spsa: field 'max_step' must be non-negative");
  }
}

SpsaSchedule SpsaSchedule::with_steps(int steps) {
  SpsaSchedule s;
  s.steps = steps;
  s.A = 0.1 * steps;
  return s;
}

double SpsaSchedule::gain(int k) const { return a / std::pow(k + 1 + A, alpha); }

double SpsaSchedule::perturbation(int k) const { return c / std::pow(k + 1, gamma); }

SpsaResult spsa_optimize(const StochasticCost& cost, RVector seed, const SpsaSchedule& schedule,
                         std::uint64_t rng_seed) {
  schedule.validate();
  std::mt19937_64 rng(rng_seed);
  SpsaResult out;
  out.x = std::move(seed);
  for (int k = 0; k < schedule.steps; ++k) {
    const double ak = schedule.gain(k);
    const double ck = schedule.perturbation(k);
    const RVector delta = rademacher(out.x.size(), rng);
    const double plus = cost(out.x + ck * delta);
    const double minus = cost(out.x - ck * delta);
    out.evaluations += 2;
    out.cost_history.push_back(0.5 * (plus + minus));
    // Rademacher entries are +-1, so dividing by delta is multiplying by it.
    RVector update = ak * (plus - minus) / (2.0 * ck) * delta;
    if (schedule.max_step > 0.0) update = update.cwiseMax(-schedule.max_step).cwiseMin(schedule.max_step);
    out.x -= update;
  }
  return out;
}

GainCalibration calibrate_gain(const StochasticCost& cost, const RVector& x, const SpsaSchedule& schedule,
                               std::uint64_t rng_seed, int samples, double max_move) {
  if (samples < 1) throw InvalidArgument("calibrate_gain: need at least one sample");
  std::mt19937_64 rng(rng_seed ^ 0x9e3779b97f4a7c15ULL);
  const double c0 = schedule.perturbation(0);
  double mean_abs = 0.0;
  for (int i = 0; i < samples; ++i) {
    const RVector delta = rademacher(x.size(), rng);
    mean_abs += std::abs(cost(x + c0 * delta) - cost(x - c0 * delta)) / (2.0 * c0);
  }
  mean_abs /= samples;
  GainCalibration out;
  out.evaluations = 2 * samples;
  // An all-zero gradient estimate gives no scale; fall back to the default gain.
  out.a = mean_abs > 1e-12 ? max_move * std::pow(1.0 + schedule.A, schedule.alpha) / mean_abs : schedule.a;
  return out;
}

}  // namespace dqpt
