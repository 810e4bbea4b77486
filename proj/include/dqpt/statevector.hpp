#pragma once

#include <span>
#include <vector>

#include "dqpt/qcore.hpp"

namespace dqpt {

inline constexpr int kMaxQubits = 16;

/// Pure state of n qubits. Qubit 0 is the most significant bit of the
/// amplitude index.
class StateVector {
 public:
  explicit StateVector(int n_qubits);  // |0...0>
  StateVector(int n_qubits, CVector amplitudes);

  static StateVector basis(int n_qubits, std::size_t index);

  int n_qubits() const { return n_qubits_; }
  const CVector& amplitudes() const { return amps_; }
  CVector& amplitudes() { return amps_; }
  double norm() const { return amps_.norm(); }

 private:
  int n_qubits_;
  CVector amps_;
};

void apply_gate_inplace(StateVector& state, const CMatrix& gate, std::span<const int> targets);
StateVector apply_gate(StateVector state, const CMatrix& gate, std::span<const int> targets);

/// Probability that `qubit` reads `outcome` in the computational basis.
double outcome_probability(const StateVector& state, int qubit, int outcome);

/// Zeroes the amplitudes where `qubit` differs from `outcome`; no renormalization.
void project_inplace(StateVector& state, int qubit, int outcome);

/// Serial kernels. Kept as the reference the OpenMP paths are tested against.
namespace serial {
void apply_gate_inplace(StateVector& state, const CMatrix& gate, std::span<const int> targets);
double outcome_probability(const StateVector& state, int qubit, int outcome);
}  // namespace serial

namespace parallel {
void apply_gate_inplace(StateVector& state, const CMatrix& gate, std::span<const int> targets);
double outcome_probability(const StateVector& state, int qubit, int outcome);
}  // namespace parallel

}  // namespace dqpt
