#include "dqpt/circuits.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>

#include "dqpt/tfim.hpp"

namespace dqpt {

namespace {

CircuitOp gate_op(const std::string& name, std::vector<double> params, std::vector<int> targets) {
  CircuitOp op;
  op.kind = OpKind::Gate;
  op.name = name;
  op.params = std::move(params);
  op.targets = std::move(targets);
  op.matrix = op_matrix(op.name, op.params);
  return op;
}

CircuitOp reset_op(int qubit) {
  CircuitOp op;
  op.kind = OpKind::MeasureReset;
  op.name = "measure_reset";
  op.targets = {qubit};
  return op;
}

std::vector<double> to_vector(const RVector& v) { return {v.data(), v.data() + v.size()}; }

AnsatzParams params_from(const std::vector<double>& p) {
  const RVector v = Eigen::Map<const RVector>(p.data(), static_cast<Eigen::Index>(p.size()));
  if (p.size() == angle_count(Template::Reduced8)) return AnsatzParams(Template::Reduced8, v);
  if (p.size() == angle_count(Template::Full15)) return AnsatzParams(Template::Full15, v);
  throw InvalidArgument("ansatz gate: expects 8 or 15 angles, got " + std::to_string(p.size()));
}

void require_params(const std::string& name, const std::vector<double>& p, std::size_t n) {
  if (p.size() != n) throw InvalidArgument("gate '" + name + "' expects " + std::to_string(n) + " parameters");
}

double zero_mask_probability(const StateVector& s, const std::vector<int>& measured) {
  const int n = s.n_qubits();
  std::size_t mask = 0;
  for (int q : measured) mask |= std::size_t{1} << (n - 1 - q);
  double p = 0.0;
  const CVector& a = s.amplitudes();
  for (Eigen::Index i = 0; i < a.size(); ++i) {
    if ((static_cast<std::size_t>(i) & mask) == 0) p += std::norm(a(i));
  }
  return p;
}

void flip(StateVector& s, int qubit) {
  const int q[1] = {qubit};
  apply_gate_inplace(s, pauli(Axis::X), q);
}

}  // namespace

CMatrix op_matrix(const std::string& name, const std::vector<double>& p) {
  if (name == "h") {
    require_params(name, p, 0);
    CMatrix h(2, 2);
    h << 1, 1, 1, -1;
    return h / std::sqrt(2.0);
  }
  if (name == "cnot") {
    require_params(name, p, 0);
    CMatrix c = CMatrix::Zero(4, 4);
    c(0, 0) = c(1, 1) = c(2, 3) = c(3, 2) = 1.0;
    return c;
  }
  if (name == "x") {
    require_params(name, p, 0);
    return pauli(Axis::X);
  }
  if (name == "ansatz") return build_unitary(params_from(p));
  if (name == "ansatz_dag") return build_unitary(params_from(p)).adjoint();
  if (name == "trotter1") {
    require_params(name, p, 3);
    return trotter_gate_first_order(p[0], p[1], p[2]);
  }
  if (name == "wo" || name == "we") {
    require_params(name, p, 3);
    const SecondOrderGates g = trotter_gates_second_order(p[0], p[1], p[2]);
    return name == "wo" ? g.odd : g.even;
  }
  throw InvalidArgument("unknown gate '" + name + "'");
}

int cost_qubits(int cells) { return 3 + 2 * cells; }

CostCircuit build_cost_circuit(const AnsatzParams& current, const AnsatzParams& candidate, double J, double g,
                               double dt, int trotter_order, int cells) {
  if (trotter_order != 1 && trotter_order != 2) throw InvalidArgument("build_cost_circuit: trotter_order must be 1 or 2");
  if (cells < 1 || cells > kMaxCostCells) throw InvalidArgument("build_cost_circuit: cells must be in 1..3");
  if (!std::isfinite(J) || !std::isfinite(g) || !(dt >= 0.0)) {
    throw InvalidArgument("build_cost_circuit: invalid Hamiltonian or time step");
  }
  const std::vector<double> u = to_vector(current.angles);
  const std::vector<double> w = to_vector(candidate.angles);
  const std::vector<double> h{J, g, dt};
  const int first = 3;
  const int last = first + 2 * cells - 1;

  CostCircuit c;
  c.n_qubits = cost_qubits(cells);
  c.ops.push_back(gate_op("h", {}, {0}));
  c.ops.push_back(gate_op("cnot", {}, {0, 1}));
  for (int rep = 0; rep < 2; ++rep) {
    c.ops.push_back(gate_op("ansatz", u, {2, 1}));
    c.ops.push_back(reset_op(2));
  }
  for (int q = first; q <= last; ++q) c.ops.push_back(gate_op("ansatz", u, {q, 1}));
  if (trotter_order == 1) {
    for (int q = first; q < last; q += 2) c.ops.push_back(gate_op("trotter1", h, {q, q + 1}));
  } else {
    for (int q = first + 1; q < last; q += 2) c.ops.push_back(gate_op("wo", h, {q, q + 1}));
    for (int q = first; q < last; q += 2) c.ops.push_back(gate_op("we", h, {q, q + 1}));
    for (int q = first + 1; q < last; q += 2) c.ops.push_back(gate_op("wo", h, {q, q + 1}));
  }
  for (int q = last; q >= first; --q) c.ops.push_back(gate_op("ansatz_dag", w, {q, 1}));
  for (int q = first; q <= last; ++q) c.measured.push_back(q);
  return c;
}

double exact_success_probability(const CostCircuit& circuit) {
  struct Branch {
    double weight;
    StateVector state;
  };
  std::vector<Branch> branches{{1.0, StateVector(circuit.n_qubits)}};
  for (const auto& op : circuit.ops) {
    if (op.kind == OpKind::Gate) {
      for (auto& b : branches) apply_gate_inplace(b.state, op.matrix, op.targets);
      continue;
    }
    const int q = op.targets.at(0);
    std::vector<Branch> next;
    next.reserve(2 * branches.size());
    for (auto& b : branches) {
      for (int outcome = 0; outcome < 2; ++outcome) {
        const double p = outcome_probability(b.state, q, outcome);
        if (p < 1e-300) continue;
        StateVector s = b.state;
        project_inplace(s, q, outcome);
        s.amplitudes() /= std::sqrt(p);
        if (outcome == 1) flip(s, q);
        next.push_back({b.weight * p, std::move(s)});
      }
    }
    branches = std::move(next);
  }
  double p = 0.0;
  for (const auto& b : branches) p += b.weight * zero_mask_probability(b.state, circuit.measured);
  return std::clamp(p, 0.0, 1.0);
}

ShotEstimate sample(const CostCircuit& circuit, std::int64_t shots, std::mt19937_64& rng) {
  if (shots <= 0) throw InvalidArgument("sample: shots must be positive");
  const double p = exact_success_probability(circuit);
  std::binomial_distribution<std::int64_t> binom(shots, p);
  return {binom(rng), shots};
}

double ratio_estimate(const ShotEstimate& upper, const ShotEstimate& lower) {
  const double den = lower.p_hat();
  if (den <= 0.0) return 0.0;
  return std::min(upper.p_hat() / den, 1.0);
}

ShotEstimate sample_per_shot(const CostCircuit& circuit, std::int64_t shots, std::mt19937_64& rng) {
  if (shots <= 0) throw InvalidArgument("sample_per_shot: shots must be positive");
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  ShotEstimate est{0, shots};
  for (std::int64_t shot = 0; shot < shots; ++shot) {
    StateVector s(circuit.n_qubits);
    for (const auto& op : circuit.ops) {
      if (op.kind == OpKind::Gate) {
        apply_gate_inplace(s, op.matrix, op.targets);
        continue;
      }
      const int q = op.targets.at(0);
      const double p1 = outcome_probability(s, q, 1);
      const int outcome = unit(rng) < p1 ? 1 : 0;
      project_inplace(s, q, outcome);
      s.amplitudes() /= std::sqrt(outcome ? p1 : 1.0 - p1);
      if (outcome == 1) flip(s, q);
    }
    if (unit(rng) < zero_mask_probability(s, circuit.measured)) ++est.successes;
  }
  return est;
}

void write_circuit(std::ostream& out, const CostCircuit& circuit) {
  auto join_ints = [](const std::vector<int>& v) {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + std::to_string(v[i]);
    return s;
  };
  out << "qubits " << circuit.n_qubits << "\n";
  out << "measured " << join_ints(circuit.measured) << "\n";
  char buf[32];
  for (const auto& op : circuit.ops) {
    out << op.name << ' ';
    if (op.params.empty()) out << '-';
    for (std::size_t i = 0; i < op.params.size(); ++i) {
      std::snprintf(buf, sizeof buf, "%.17g", op.params[i]);
      out << (i ? "," : "") << buf;
    }
    out << ' ' << join_ints(op.targets) << "\n";
  }
}

CostCircuit read_circuit(std::istream& in) {
  auto split = [](const std::string& s) {
    std::vector<std::string> parts;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) parts.push_back(item);
    return parts;
  };
  auto to_ints = [&](const std::string& s) {
    std::vector<int> v;
    for (const auto& p : split(s)) v.push_back(std::stoi(p));
    return v;
  };
  CostCircuit c;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    std::stringstream ss(line);
    std::string name, a, b;
    ss >> name >> a;
    try {
      if (name == "qubits") {
        c.n_qubits = std::stoi(a);
        continue;
      }
      if (name == "measured") {
        c.measured = to_ints(a);
        continue;
      }
      ss >> b;
      if (b.empty()) throw InvalidArgument("missing targets");
      if (name == "measure_reset") {
        c.ops.push_back(reset_op(to_ints(b).at(0)));
        continue;
      }
      std::vector<double> params;
      if (a != "-") {
        for (const auto& p : split(a)) params.push_back(std::stod(p));
      }
      c.ops.push_back(gate_op(name, params, to_ints(b)));
    } catch (const InvalidArgument& e) {
      throw InvalidArgument("read_circuit: line " + std::to_string(lineno) + ": " + e.what());
    } catch (const std::logic_error&) {
      throw InvalidArgument("read_circuit: line " + std::to_string(lineno) + ": malformed number");
    }
  }
  if (c.n_qubits <= 0) throw InvalidArgument("read_circuit: missing qubit count");
  return c;
}

}  // namespace dqpt
