#include <cmath>
#include <random>
#include <vector>

#include <Eigen/Eigenvalues>
#include <gtest/gtest.h>

#include "dqpt/tfim.hpp"
#include "test_util.hpp"

using namespace dqpt;

namespace {

// Jordan-Wigner ground energy per site of the periodic chain in the even
// parity sector: antiperiodic momenta k = (2m + 1) pi / n.
double ground_energy_ff_finite(double J, double g, int n) {
  double e = 0.0;
  for (int m = 0; m < n; ++m) {
    const double k = (2.0 * m + 1.0) * kPi / n;
    e -= std::sqrt(J * J + g * g - 2.0 * J * g * std::cos(k));
  }
  return e / n;
}

double fitted_exponent(const std::vector<double>& x, const std::vector<double>& y) {
  Eigen::MatrixXd a(x.size(), 2);
  Eigen::VectorXd b(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    a(i, 0) = std::log(x[i]);
    a(i, 1) = 1.0;
    b(i) = std::log(y[i]);
  }
  return a.colPivHouseholderQr().solve(b)(0);
}

}  // namespace

TEST(QuenchSpec, Validation) {
  QuenchSpec q;
  EXPECT_NO_THROW(q.validate());
  EXPECT_EQ(q.steps(), 25);
  QuenchSpec bad = q;
  bad.dt = 0.0;
  EXPECT_THROW(bad.validate(), InvalidArgument);
  bad = q;
  bad.t_max = 0.05;
  EXPECT_THROW(bad.validate(), InvalidArgument);
  bad = q;
  bad.J = 0.0;
  EXPECT_THROW(bad.validate(), InvalidArgument);
  bad = q;
  bad.trotter_order = 3;
  EXPECT_THROW(bad.validate(), InvalidArgument);
  bad = q;
  bad.g1 = std::nan("");
  EXPECT_THROW(bad.validate(), InvalidArgument);
}

TEST(Hamiltonian, TwoSiteLimits) {
  const CMatrix z = pauli(Axis::Z), x = pauli(Axis::X);
  EXPECT_LT(max_abs(tfim_hamiltonian(1.0, 0.0, 2, false) - kron(z, z)), 1e-15);
  EXPECT_LT(max_abs(tfim_hamiltonian(0.0, 1.0, 2, false) - (kron(x, identity(2)) + kron(identity(2), x))), 1e-15);
}

TEST(Hamiltonian, HermitianAndSizeLimited) {
  EXPECT_TRUE(is_hermitian(tfim_hamiltonian(0.7, 1.3, 6, true)));
  EXPECT_THROW(tfim_hamiltonian(1.0, 1.0, kMaxDenseSites + 1, true), ResourceLimit);
}

TEST(Hamiltonian, CriticalGroundEnergyMatchesJordanWigner) {
  const int n = 8;
  const Eigen::SelfAdjointEigenSolver<CMatrix> es(tfim_hamiltonian(1.0, 1.0, n, true), Eigen::EigenvaluesOnly);
  EXPECT_NEAR(es.eigenvalues()(0) / n, ground_energy_ff_finite(1.0, 1.0, n), 1e-6);
}

TEST(Hamiltonian, MatrixFreeOperatorAgreesWithDense) {
  std::mt19937_64 rng(1);
  std::normal_distribution<double> normal;
  const int n = 6;
  const CMatrix h = tfim_hamiltonian(0.8, 1.4, n, true);
  const TfimOperator op(0.8, 1.4, n);
  RVector v(64), out;
  for (int i = 0; i < 64; ++i) v(i) = normal(rng);
  op.apply(v, out);
  EXPECT_LT((h.real() * v - out).norm(), 1e-12);
}

TEST(Hamiltonian, SerialAndParallelApplyAgree) {
  std::mt19937_64 rng(2);
  std::normal_distribution<double> normal;
  const int n = 12;
  RVector diag(1 << n), v(1 << n), a, b;
  for (int i = 0; i < (1 << n); ++i) {
    diag(i) = normal(rng);
    v(i) = normal(rng);
  }
  serial::tfim_apply(diag, 0.3, n, v, a);
  parallel::tfim_apply(diag, 0.3, n, v, b);
  EXPECT_LT((a - b).norm(), 1e-12);
}

TEST(Hamiltonian, LanczosGroundStateMatchesJordanWigner) {
  for (int n : {8, 12}) {
    const auto [e, v] = ed_ground_state(TfimOperator(1.0, 1.5, n));
    EXPECT_NEAR(e / n, ground_energy_ff_finite(1.0, 1.5, n), 1e-9) << "n " << n;
    EXPECT_NEAR(v.norm(), 1.0, 1e-12);
  }
}

TEST(Hamiltonian, ThermodynamicGroundEnergy) {
  // Large-n finite chain converges to the closed form.
  EXPECT_NEAR(ground_energy_density_ff(1.0, 1.5), ground_energy_ff_finite(1.0, 1.5, 4000), 1e-9);
  EXPECT_NEAR(ground_energy_density_ff(1.0, 1.0), -4.0 / kPi, 1e-9);
}

TEST(TrotterFirstOrder, SmallStepBound) {
  const CMatrix h = bond_hamiltonian(1.0, 0.2);
  const double hnorm = h.operatorNorm();
  for (double dt : {1e-2, 1e-4, 1e-6}) {
    const CMatrix g = trotter_gate_first_order(1.0, 0.2, dt);
    EXPECT_LE((g - identity(4)).operatorNorm(), 2.0 * hnorm * 2.0 * dt);
  }
}

TEST(TrotterFirstOrder, ZeroFieldIsDiagonal) {
  const double J = 0.9, dt = 0.13;
  CMatrix expected = CMatrix::Zero(4, 4);
  expected(0, 0) = expected(3, 3) = std::exp(-2.0 * kI * J * dt);
  expected(1, 1) = expected(2, 2) = std::exp(2.0 * kI * J * dt);
  EXPECT_LT(max_abs(trotter_gate_first_order(J, 0.0, dt) - expected), 1e-14);
}

TEST(TrotterFirstOrder, MatchesExponentialOracle) {
  const CMatrix x = pauli(Axis::X);
  const CMatrix h2 = kron(pauli(Axis::Z), pauli(Axis::Z)) + 0.1 * (kron(x, identity(2)) + kron(identity(2), x));
  EXPECT_LT(max_abs(trotter_gate_first_order(1.0, 0.2, 0.1) - two_site_exp(h2, 0.2)), 1e-12);
  EXPECT_LT(max_abs(trotter_gate_first_order(1.0, 0.2, 0.1) - test::taylor_expm(-kI * 0.2 * h2)), 1e-12);
}

TEST(TrotterFirstOrder, UpdateErrorIsSecondOrder) {
  // Even-then-odd bond layers on a periodic 6-site ring vs the exact step.
  const int n = 6;
  const double J = 1.0, g = 0.2;
  const CMatrix h = tfim_hamiltonian(J, g, n, true);
  std::vector<double> dts = {0.2, 0.1, 0.05}, errs;
  for (double dt : dts) {
    const CMatrix gate = two_site_exp(bond_hamiltonian(J, g), dt);
    const CMatrix even = kron(kron(gate, gate), gate);
    // odd bonds (1,2), (3,4), (5,0): cyclic shift of the even layer
    CMatrix shift = CMatrix::Zero(64, 64);
    for (int s = 0; s < 64; ++s) shift(((s >> 1) | ((s & 1) << 5)), s) = 1.0;
    const CMatrix odd = shift.adjoint() * even * shift;
    const CMatrix exact = test::taylor_expm(-kI * dt * h, 30, 6);
    errs.push_back((odd * even - exact).operatorNorm());
  }
  EXPECT_NEAR(fitted_exponent(dts, errs), 2.0, 0.3);
}

TEST(TrotterSecondOrder, LimitsAndCommutingCase) {
  const auto tiny = trotter_gates_second_order(1.0, 0.2, 1e-9);
  EXPECT_LT(max_abs(tiny.odd - identity(4)), 1e-8);
  EXPECT_LT(max_abs(tiny.even - identity(4)), 1e-8);
  const double dt = 0.37;
  const auto g = trotter_gates_second_order(1.0, 0.0, dt);
  const CMatrix zz = kron(pauli(Axis::Z), pauli(Axis::Z));
  EXPECT_LT(max_abs(g.odd * g.even * g.odd - two_site_exp(zz, 2.0 * dt)), 1e-13);
}

TEST(TrotterSecondOrder, LocalErrorIsThirdOrder) {
  const int n = 6;
  const double J = 1.0, g = 0.2;
  const CMatrix h = tfim_hamiltonian(J, g, n, true);
  CMatrix shift = CMatrix::Zero(64, 64);
  for (int s = 0; s < 64; ++s) shift(((s >> 1) | ((s & 1) << 5)), s) = 1.0;
  std::vector<double> dts = {0.5, 0.25, 0.125}, errs;
  for (double dt : dts) {
    const auto gates = trotter_gates_second_order(J, g, dt);
    const CMatrix even = kron(kron(gates.even, gates.even), gates.even);
    const CMatrix half = kron(kron(gates.odd, gates.odd), gates.odd);
    const CMatrix odd = shift.adjoint() * half * shift;
    const CMatrix exact = test::taylor_expm(-kI * dt * h, 30, 6);
    errs.push_back((odd * even * odd - exact).operatorNorm());
  }
  EXPECT_NEAR(fitted_exponent(dts, errs), 3.0, 0.3);
}

TEST(LoschmidtEd, VanishesAtZeroTimeAndWithoutQuench) {
  QuenchSpec q;
  EXPECT_NEAR(loschmidt_exact_ed(q, 8, 0.0), 0.0, 1e-12);
  q.g1 = q.g0;
  for (double e : loschmidt_exact_ed(q, 10, {0.3, 1.1, 2.7})) EXPECT_NEAR(e, 0.0, 1e-10);
}

TEST(LoschmidtEd, AgreesWithDenseEvolution) {
  QuenchSpec q;
  const int n = 8;
  const Eigen::SelfAdjointEigenSolver<CMatrix> e0(tfim_hamiltonian(q.J, q.g0, n, true));
  const CVector psi0 = e0.eigenvectors().col(0);
  const Eigen::SelfAdjointEigenSolver<CMatrix> e1(tfim_hamiltonian(q.J, q.g1, n, true));
  for (double t : {0.4, 1.3}) {
    const CVector c = e1.eigenvectors().adjoint() * psi0;
    cplx amp = 0.0;
    for (Eigen::Index j = 0; j < c.size(); ++j) amp += std::norm(c(j)) * std::exp(-kI * e1.eigenvalues()(j) * t);
    EXPECT_NEAR(loschmidt_exact_ed(q, n, t), -std::log(std::norm(amp)) / n, 1e-9);
  }
}

TEST(LoschmidtEd, RejectsTooManySites) {
  EXPECT_THROW(loschmidt_exact_ed(QuenchSpec{}, kMaxEdSites + 1, 0.1), ResourceLimit);
}

TEST(LoschmidtFf, VanishesAtZeroTimeAndWithoutQuench) {
  EXPECT_NEAR(loschmidt_exact_ff(1.5, 0.2, 0.0), 0.0, 1e-10);
  for (double t : {0.2, 1.0, 3.0}) EXPECT_NEAR(loschmidt_exact_ff(0.7, 0.7, t), 0.0, 1e-12);
  EXPECT_THROW(loschmidt_exact_ff(1.5, 0.2, 0.1, 32), InvalidArgument);
}

TEST(LoschmidtFf, CuspsAtTheCriticalTimes) {
  const auto tc = critical_times(1.5, 0.2, 2);
  ASSERT_EQ(tc.size(), 2u);
  // Independent root: cos k* from the zero of the Bogoliubov overlap.
  const double kstar = std::acos((1.0 + 1.5 * 0.2) / (1.5 + 0.2));
  const double eps = 2.0 * std::sqrt(1.0 + 0.04 - 0.4 * std::cos(kstar));
  EXPECT_NEAR(tc[0], 0.5 * kPi / eps, 1e-12);
  EXPECT_NEAR(tc[1], 1.5 * kPi / eps, 1e-12);

  // Grid maximum of the curve near each critical time.
  for (double t0 : tc) {
    double best_t = 0.0, best = -1.0;
    for (int i = -400; i <= 400; ++i) {
      const double t = t0 + i * 1e-4 * 2.0;
      const double v = loschmidt_exact_ff(1.5, 0.2, t, 1 << 14);
      if (v > best) {
        best = v;
        best_t = t;
      }
    }
    EXPECT_NEAR(best_t, t0, 1e-3);
    // one-sided slopes differ: a cusp, not a smooth maximum
    const double h = 5e-3;
    const double left = (best - loschmidt_exact_ff(1.5, 0.2, best_t - h, 1 << 14)) / h;
    const double right = (loschmidt_exact_ff(1.5, 0.2, best_t + h, 1 << 14) - best) / h;
    EXPECT_GT(left, 0.02);
    EXPECT_LT(right, -0.02);
  }
  EXPECT_TRUE(critical_times(1.5, 1.2, 2).empty());
}

TEST(LoschmidtFf, VectorFormMatchesScalar) {
  const std::vector<double> ts = {0.1, 0.7, 1.9};
  const auto v = loschmidt_exact_ff(1.5, 0.2, ts);
  for (std::size_t i = 0; i < ts.size(); ++i) EXPECT_EQ(v[i], loschmidt_exact_ff(1.5, 0.2, ts[i]));
}

TEST(LoschmidtCross, EdConvergesToFreeFermions) {
  QuenchSpec q;
  const double t = 0.5;  // away from the first cusp
  const double ff = loschmidt_exact_ff(q.g0, q.g1, t);
  double previous = 1e9;
  for (int n : {8, 10, 12}) {
    const double gap = std::abs(loschmidt_exact_ed(q, n, t) - ff);
    EXPECT_LT(gap, previous) << "n " << n;
    previous = gap;
  }
  EXPECT_LT(previous, 0.05);
}
