#pragma once

#include <utility>
#include <vector>

#include "dqpt/qcore.hpp"

// Transverse-field Ising chain H = sum_i [J Z_i Z_{i+1} + g X_i]: Hamiltonians,
// Trotter gates and exact Loschmidt-echo references.
namespace dqpt {

struct QuenchSpec {
  double J = 1.0;
  double g0 = 1.5;
  double g1 = 0.2;
  double dt = 0.1;
  double t_max = 2.5;
  int trotter_order = 1;

  void validate() const;  // throws InvalidArgument naming the offending field
  int steps() const;      // number of dt steps up to t_max
};

inline constexpr int kMaxDenseSites = 10;
inline constexpr int kMaxEdSites = 14;

/// Dense 2^n x 2^n Hamiltonian, limited to kMaxDenseSites sites.
CMatrix tfim_hamiltonian(double J, double g, int n_sites, bool periodic);

/// One bond term with the field split evenly onto its two sites:
/// J Z(x)Z + (g/2)(X(x)I + I(x)X).
CMatrix bond_hamiltonian(double J, double g);

/// exp(-i 2dt h_bond): the even-bond gate with doubled step, which carries the
/// full first-order update for translation-invariant states.
CMatrix trotter_gate_first_order(double J, double g, double dt);

struct SecondOrderGates {
  CMatrix odd;   // exp(-i h_bond dt/2)
  CMatrix even;  // exp(-i h_bond dt)
};
SecondOrderGates trotter_gates_second_order(double J, double g, double dt);

/// Matrix-free periodic TFIM on up to kMaxEdSites sites. The Hamiltonian is
/// real in the Z basis so vectors are real.
class TfimOperator {
 public:
  TfimOperator(double J, double g, int n_sites);

  int n_sites() const { return n_; }
  Eigen::Index dim() const { return Eigen::Index{1} << n_; }
  void apply(const RVector& in, RVector& out) const;

 private:
  double J_;
  double g_;
  int n_;
  RVector diag_;
};

namespace serial {
void tfim_apply(const RVector& diag, double g, int n, const RVector& in, RVector& out);
}
namespace parallel {
void tfim_apply(const RVector& diag, double g, int n, const RVector& in, RVector& out);
}

/// Ground state of a TfimOperator by Lanczos with full reorthogonalization.
std::pair<double, RVector> ed_ground_state(const TfimOperator& h);

/// -(1/n) log |<psi0| exp(-i H(g1) t) |psi0>|^2 with psi0 the ground state of
/// H(g0) on a periodic chain of n sites. Vector form reuses one Krylov basis.
double loschmidt_exact_ed(const QuenchSpec& spec, int n_sites, double t);
std::vector<double> loschmidt_exact_ed(const QuenchSpec& spec, int n_sites, const std::vector<double>& times);

/// Thermodynamic-limit rate function from the Bogoliubov momentum integral,
/// trapezoidal on k in [0, pi] with k_points intervals.
double loschmidt_exact_ff(double g0, double g1, double t, int k_points = 2048, double J = 1.0);
std::vector<double> loschmidt_exact_ff(double g0, double g1, const std::vector<double>& times,
                                       int k_points = 2048, double J = 1.0);

/// Times t*_m = (m + 1/2) pi / eps(k*) of the non-analytic cusps; empty when
/// the quench does not cross the critical point.
std::vector<double> critical_times(double g0, double g1, int count, double J = 1.0);

/// Free-fermion ground-state energy per site, thermodynamic limit.
double ground_energy_density_ff(double J, double g);

}  // namespace dqpt
