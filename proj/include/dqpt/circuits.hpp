#pragma once

#include <cmath>
#include <cstdint>
#include <iosfwd>
#include <random>
#include <string>
#include <vector>

#include "dqpt/ansatz.hpp"
#include "dqpt/statevector.hpp"

// The cost circuit whose all-zero probability estimates the fidelity of one
// time step, and its shot-noise sampler.
//
// Register (fixed size, independent of how long the diagram is):
//   q0       reference, Bell-paired with the auxiliary so it starts maximally mixed
//   q1       auxiliary (bond) qubit
//   q2       reused physical qubit for the left boundary region
//   q3..     two physical sites per cell of the block (q3..q6 for two cells)
//
// Left boundary: U_t on (q2, q1) then a discarded measure-and-reset of q2,
// twice. Block: U_t on each site, the Trotter layer, then U_{t+dt}^dag on the
// sites in reverse order. Success = all block qubits read 0.
//
// The two-cell circuit is the cost diagram proper. Its success probability
// P_n ~ |lambda|^{2n} carries a boundary bias at finite n; the ratio
// P_{n+1} / P_n cancels the boundary to leading order, so the optimiser uses
// the three-cell over two-cell ratio.
namespace dqpt {

enum class OpKind { Gate, MeasureReset };

struct CircuitOp {
  OpKind kind = OpKind::Gate;
  std::string name;             // h, cnot, ansatz, ansatz_dag, trotter1, wo, we, measure_reset
  std::vector<double> params;   // angles, or (J, g, dt) for evolution gates
  std::vector<int> targets;
  CMatrix matrix;               // empty for measure_reset
};

struct CostCircuit {
  int n_qubits = 0;
  std::vector<CircuitOp> ops;
  std::vector<int> measured;
};

inline constexpr int kCostQubits = 7;
inline constexpr int kMaxCostCells = 3;

/// Register size for a block of `cells` two-site cells.
int cost_qubits(int cells);

CostCircuit build_cost_circuit(const AnsatzParams& current, const AnsatzParams& candidate, double J, double g,
                               double dt, int trotter_order, int cells = 2);

/// Rebuilds an op's matrix from its name and parameters.
CMatrix op_matrix(const std::string& name, const std::vector<double>& params);

/// Exact probability that every measured qubit reads 0, with mid-circuit
/// measure-and-reset handled by branching.
double exact_success_probability(const CostCircuit& circuit);

struct ShotEstimate {
  std::int64_t successes = 0;
  std::int64_t shots = 0;
  double p_hat() const { return shots > 0 ? static_cast<double>(successes) / shots : 0.0; }
  double std_err() const { return shots > 0 ? std::sqrt(p_hat() * (1.0 - p_hat()) / shots) : 0.0; }
};

/// p_hat(upper) / p_hat(lower), clamped to [0, 1]; 0 when lower saw no successes.
double ratio_estimate(const ShotEstimate& upper, const ShotEstimate& lower);

/// Perfect-gate shot sampling: Binomial(shots, exact probability).
ShotEstimate sample(const CostCircuit& circuit, std::int64_t shots, std::mt19937_64& rng);

/// Shot-by-shot simulation with sampled mid-circuit outcomes. Same
/// distribution as sample(); used to cross-check it.
ShotEstimate sample_per_shot(const CostCircuit& circuit, std::int64_t shots, std::mt19937_64& rng);

/// Plain-text gate list, one op per line:  name params|- targets
void write_circuit(std::ostream& out, const CostCircuit& circuit);
CostCircuit read_circuit(std::istream& in);

}  // namespace dqpt
