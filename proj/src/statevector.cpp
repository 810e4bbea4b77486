#include "dqpt/statevector.hpp"

#include <algorithm>
#include <cstdint>

namespace dqpt {

namespace {

// States below this size are not worth a parallel region.
constexpr int kParallelThresholdQubits = 12;

void validate_targets(const StateVector& state, const CMatrix& gate, std::span<const int> targets) {
  const int k = static_cast<int>(targets.size());
  if (k == 0) throw InvalidArgument("apply_gate: no target qubits");
  if (gate.rows() != (Eigen::Index{1} << k) || gate.cols() != gate.rows()) {
    throw InvalidArgument("apply_gate: gate dimension does not match target count");
  }
  for (int i = 0; i < k; ++i) {
    if (targets[i] < 0 || targets[i] >= state.n_qubits()) {
      throw InvalidArgument("apply_gate: target qubit out of range");
    }
    for (int j = 0; j < i; ++j) {
      if (targets[i] == targets[j]) throw InvalidArgument("apply_gate: duplicate target qubit");
    }
  }
}

void validate_qubit(const StateVector& state, int qubit, int outcome) {
  if (qubit < 0 || qubit >= state.n_qubits()) throw InvalidArgument("qubit index out of range");
  if (outcome != 0 && outcome != 1) throw InvalidArgument("outcome must be 0 or 1");
}

struct GateLayout {
  int n = 0;
  int k = 0;
  std::vector<std::uint64_t> offsets;  // amplitude offset of each local basis state
  std::uint64_t target_mask = 0;
};

GateLayout layout_for(int n, std::span<const int> targets) {
  GateLayout g;
  g.n = n;
  g.k = static_cast<int>(targets.size());
  g.offsets.assign(std::size_t{1} << g.k, 0);
  for (std::size_t local = 0; local < g.offsets.size(); ++local) {
    std::uint64_t off = 0;
    for (int t = 0; t < g.k; ++t) {
      // Local index: first target is the most significant bit.
      if ((local >> (g.k - 1 - t)) & 1u) off |= std::uint64_t{1} << (n - 1 - targets[t]);
    }
    g.offsets[local] = off;
  }
  for (int t = 0; t < g.k; ++t) g.target_mask |= std::uint64_t{1} << (n - 1 - targets[t]);
  return g;
}

// Expands a compact counter over the non-target bits into a full base index.
inline std::uint64_t scatter(std::uint64_t compact, std::uint64_t target_mask, int n) {
  std::uint64_t out = 0;
  int src = 0;
  for (int bit = 0; bit < n; ++bit) {
    const std::uint64_t m = std::uint64_t{1} << bit;
    if (target_mask & m) continue;
    if ((compact >> src) & 1u) out |= m;
    ++src;
  }
  return out;
}

inline void apply_block(CVector& amps, const CMatrix& gate, const GateLayout& g,
                        std::uint64_t base, cplx* scratch) {
  const std::size_t dim = g.offsets.size();
  for (std::size_t i = 0; i < dim; ++i) scratch[i] = amps(static_cast<Eigen::Index>(base | g.offsets[i]));
  for (std::size_t r = 0; r < dim; ++r) {
    cplx acc = 0.0;
    for (std::size_t c = 0; c < dim; ++c) acc += gate(r, c) * scratch[c];
    amps(static_cast<Eigen::Index>(base | g.offsets[r])) = acc;
  }
}

}  // namespace

StateVector::StateVector(int n_qubits) : n_qubits_(n_qubits) {
  if (n_qubits < 1 || n_qubits > kMaxQubits) throw ResourceLimit("StateVector: qubit count outside [1, 16]");
  amps_ = CVector::Zero(Eigen::Index{1} << n_qubits);
  amps_(0) = 1.0;
}

StateVector::StateVector(int n_qubits, CVector amplitudes) : n_qubits_(n_qubits), amps_(std::move(amplitudes)) {
  if (n_qubits < 1 || n_qubits > kMaxQubits) throw ResourceLimit("StateVector: qubit count outside [1, 16]");
  if (amps_.size() != (Eigen::Index{1} << n_qubits)) throw InvalidArgument("StateVector: amplitude count is not 2^n");
}

StateVector StateVector::basis(int n_qubits, std::size_t index) {
  StateVector s(n_qubits);
  if (index >= static_cast<std::size_t>(s.amps_.size())) throw InvalidArgument("StateVector::basis: index out of range");
  s.amps_(0) = 0.0;
  s.amps_(static_cast<Eigen::Index>(index)) = 1.0;
  return s;
}

namespace serial {

void apply_gate_inplace(StateVector& state, const CMatrix& gate, std::span<const int> targets) {
  validate_targets(state, gate, targets);
  const GateLayout g = layout_for(state.n_qubits(), targets);
  const std::uint64_t blocks = std::uint64_t{1} << (g.n - g.k);
  std::vector<cplx> scratch(g.offsets.size());
  for (std::uint64_t b = 0; b < blocks; ++b) {
    apply_block(state.amplitudes(), gate, g, scatter(b, g.target_mask, g.n), scratch.data());
  }
}

double outcome_probability(const StateVector& state, int qubit, int outcome) {
  validate_qubit(state, qubit, outcome);
  const int shift = state.n_qubits() - 1 - qubit;
  const auto& a = state.amplitudes();
  double p = 0.0;
  for (Eigen::Index i = 0; i < a.size(); ++i) {
    if (static_cast<int>((i >> shift) & 1) == outcome) p += std::norm(a(i));
  }
  return p / a.squaredNorm();
}

}  // namespace serial

namespace parallel {

void apply_gate_inplace(StateVector& state, const CMatrix& gate, std::span<const int> targets) {
  validate_targets(state, gate, targets);
  const GateLayout g = layout_for(state.n_qubits(), targets);
  const std::int64_t blocks = std::int64_t{1} << (g.n - g.k);
  CVector& amps = state.amplitudes();
#pragma omp parallel
  {
    std::vector<cplx> scratch(g.offsets.size());
#pragma omp for schedule(static)
    for (std::int64_t b = 0; b < blocks; ++b) {
      apply_block(amps, gate, g, scatter(static_cast<std::uint64_t>(b), g.target_mask, g.n), scratch.data());
    }
  }
}

double outcome_probability(const StateVector& state, int qubit, int outcome) {
  validate_qubit(state, qubit, outcome);
  const int shift = state.n_qubits() - 1 - qubit;
  const auto& a = state.amplitudes();
  const std::int64_t size = a.size();
  double p = 0.0;
  double total = 0.0;
#pragma omp parallel for reduction(+ : p, total) schedule(static)
  for (std::int64_t i = 0; i < size; ++i) {
    const double w = std::norm(a(i));
    total += w;
    if (static_cast<int>((i >> shift) & 1) == outcome) p += w;
  }
  return p / total;
}

}  // namespace parallel

void apply_gate_inplace(StateVector& state, const CMatrix& gate, std::span<const int> targets) {
  if (state.n_qubits() >= kParallelThresholdQubits) {
    parallel::apply_gate_inplace(state, gate, targets);
  } else {
    serial::apply_gate_inplace(state, gate, targets);
  }
}

StateVector apply_gate(StateVector state, const CMatrix& gate, std::span<const int> targets) {
  apply_gate_inplace(state, gate, targets);
  return state;
}

double outcome_probability(const StateVector& state, int qubit, int outcome) {
  if (state.n_qubits() >= kParallelThresholdQubits) return parallel::outcome_probability(state, qubit, outcome);
  return serial::outcome_probability(state, qubit, outcome);
}

void project_inplace(StateVector& state, int qubit, int outcome) {
  validate_qubit(state, qubit, outcome);
  const int shift = state.n_qubits() - 1 - qubit;
  auto& a = state.amplitudes();
  for (Eigen::Index i = 0; i < a.size(); ++i) {
    if (static_cast<int>((i >> shift) & 1) != outcome) a(i) = 0.0;
  }
}

}  // namespace dqpt
