#include <benchmark/benchmark.h>

#include <random>

#include "dqpt/circuits.hpp"
#include "dqpt/ensemble.hpp"
#include "dqpt/tfim.hpp"
#include "dqpt/transfer.hpp"

namespace {

using namespace dqpt;

RVector random_vector(Eigen::Index n) {
  std::mt19937_64 rng(3);
  std::normal_distribution<double> normal;
  RVector v(n);
  for (Eigen::Index i = 0; i < n; ++i) v(i) = normal(rng);
  return v;
}

template <void (*Apply)(const RVector&, double, int, const RVector&, RVector&)>
void BM_TfimApply(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const TfimOperator h(1.0, 0.2, n);
  RVector diag(h.dim());
  for (Eigen::Index x = 0; x < h.dim(); ++x) diag(x) = static_cast<double>(x % 7);
  const RVector in = random_vector(h.dim());
  RVector out;
  for (auto _ : state) {
    Apply(diag, 0.2, n, in, out);
    benchmark::DoNotOptimize(out.data());
  }
  state.SetItemsProcessed(state.iterations() * h.dim());
}
BENCHMARK_TEMPLATE(BM_TfimApply, serial::tfim_apply)->Arg(10)->Arg(12)->Arg(14);
BENCHMARK_TEMPLATE(BM_TfimApply, parallel::tfim_apply)->Arg(10)->Arg(12)->Arg(14);

void BM_CostCircuit(benchmark::State& state) {
  const int cells = static_cast<int>(state.range(0));
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> angle(-kPi, kPi);
  RVector u(8), w(8);
  for (int i = 0; i < 8; ++i) {
    u(i) = angle(rng);
    w(i) = angle(rng);
  }
  const CostCircuit c = build_cost_circuit(AnsatzParams(Template::Reduced8, u), AnsatzParams(Template::Reduced8, w),
                                           1.0, 0.2, 0.1, 1, cells);
  for (auto _ : state) benchmark::DoNotOptimize(exact_success_probability(c));
}
BENCHMARK(BM_CostCircuit)->Arg(2)->Arg(3);

void BM_FidelityDensity(benchmark::State& state) {
  RVector u(8);
  u << 0.3, -1.2, 0.7, 0.1, 2.0, -0.4, 0.9, 1.1;
  const MpsTensor a = mps_tensor(AnsatzParams(Template::Reduced8, u));
  const CMatrix g = trotter_gate_first_order(1.0, 0.2, 0.1);
  for (auto _ : state) benchmark::DoNotOptimize(fidelity_density(transfer_matrix(a, a, g)));
}
BENCHMARK(BM_FidelityDensity);

template <std::vector<Trajectory> (*Run)(const QuenchSpec&, const StochasticOptions&, int,
                                         const std::vector<std::uint64_t>&)>
void BM_Ensemble(benchmark::State& state) {
  QuenchSpec spec;
  spec.t_max = 0.5;
  StochasticOptions o;
  o.ground_state = ground_state_optimize(spec.J, spec.g0, o.tmpl);
  for (auto _ : state) benchmark::DoNotOptimize(Run(spec, o, 8, {}));
}
BENCHMARK_TEMPLATE(BM_Ensemble, serial::ensemble_run)->Unit(benchmark::kMillisecond);
BENCHMARK_TEMPLATE(BM_Ensemble, parallel::ensemble_run)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
