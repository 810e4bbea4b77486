#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "dqpt/statevector.hpp"
#include "test_util.hpp"

using namespace dqpt;

namespace {

// Full 2^n matrix of `gate` on `targets` by explicit basis enumeration.
CMatrix embed(const CMatrix& gate, const std::vector<int>& targets, int n) {
  const Eigen::Index dim = Eigen::Index{1} << n;
  const int k = static_cast<int>(targets.size());
  CMatrix full = CMatrix::Zero(dim, dim);
  for (Eigen::Index col = 0; col < dim; ++col) {
    int sub_in = 0;
    for (int j = 0; j < k; ++j) sub_in = (sub_in << 1) | static_cast<int>((col >> (n - 1 - targets[j])) & 1);
    for (int sub_out = 0; sub_out < (1 << k); ++sub_out) {
      Eigen::Index row = col;
      for (int j = 0; j < k; ++j) {
        const Eigen::Index bit = Eigen::Index{1} << (n - 1 - targets[j]);
        row = ((sub_out >> (k - 1 - j)) & 1) ? (row | bit) : (row & ~bit);
      }
      full(row, col) += gate(sub_out, sub_in);
    }
  }
  return full;
}

}  // namespace

TEST(StateVector, StartsInAllZero) {
  const StateVector s(3);
  EXPECT_EQ(s.amplitudes().size(), 8);
  EXPECT_EQ(s.amplitudes()(0), cplx(1.0));
  EXPECT_NEAR(s.norm(), 1.0, 1e-15);
}

TEST(StateVector, RejectsTooManyQubits) {
  EXPECT_THROW(StateVector(kMaxQubits + 1), ResourceLimit);
  EXPECT_THROW(StateVector(0), ResourceLimit);
}

TEST(ApplyGate, IdentityLeavesStateUnchanged) {
  std::mt19937_64 rng(1);
  const StateVector s(4, test::random_state(rng, 16));
  const int t[2] = {1, 3};
  const StateVector out = apply_gate(s, identity(4), t);
  EXPECT_LT((out.amplitudes() - s.amplitudes()).norm(), 1e-15);
}

TEST(ApplyGate, XSetsTheTargetBit) {
  for (int k = 0; k < 5; ++k) {
    const int t[1] = {k};
    const StateVector out = apply_gate(StateVector(5), pauli(Axis::X), t);
    const std::size_t expected = std::size_t{1} << (4 - k);  // qubit 0 is the MSB
    EXPECT_NEAR(std::abs(out.amplitudes()(static_cast<Eigen::Index>(expected))), 1.0, 1e-15);
  }
}

TEST(ApplyGate, MatchesDenseKroneckerOracle) {
  std::mt19937_64 rng(2);
  const std::vector<std::vector<int>> target_sets = {{0, 1}, {1, 2}, {3, 0}, {2, 1}, {0, 3}};
  for (const auto& targets : target_sets) {
    const CMatrix u = test::random_unitary(rng, 4);
    const StateVector s(4, test::random_state(rng, 16));
    const StateVector out = apply_gate(s, u, targets);
    const CVector oracle = embed(u, targets, 4) * s.amplitudes();
    EXPECT_LT((out.amplitudes() - oracle).norm(), 1e-10);
    EXPECT_NEAR(out.norm(), 1.0, 1e-10);
  }
  // Adjacent ordered targets reduce to a plain Kronecker product.
  const CMatrix u = test::random_unitary(rng, 4);
  const StateVector s(4, test::random_state(rng, 16));
  const int t[2] = {1, 2};
  const CVector oracle = kron(kron(identity(2), u), identity(2)) * s.amplitudes();
  EXPECT_LT((apply_gate(s, u, t).amplitudes() - oracle).norm(), 1e-10);
}

TEST(ApplyGate, Composition) {
  std::mt19937_64 rng(3);
  const CMatrix a = test::random_unitary(rng, 4);
  const CMatrix b = test::random_unitary(rng, 4);
  const StateVector s(5, test::random_state(rng, 32));
  const int t[2] = {4, 1};
  const StateVector twice = apply_gate(apply_gate(s, a, t), b, t);
  const StateVector once = apply_gate(s, b * a, t);
  EXPECT_LT((twice.amplitudes() - once.amplitudes()).norm(), 1e-10);
}

TEST(ApplyGate, NormPreservedOverLongSequences) {
  std::mt19937_64 rng(4);
  StateVector s(6);
  std::uniform_int_distribution<int> pick(0, 5);
  for (int i = 0; i < 500; ++i) {
    int q0 = pick(rng), q1 = pick(rng);
    while (q1 == q0) q1 = pick(rng);
    const int t[2] = {q0, q1};
    apply_gate_inplace(s, test::random_unitary(rng, 4), t);
  }
  EXPECT_NEAR(s.norm(), 1.0, 1e-9);
}

TEST(ApplyGate, Errors) {
  StateVector s(3);
  const int dup[2] = {1, 1};
  const int out_of_range[1] = {3};
  const int one[1] = {0};
  EXPECT_THROW(apply_gate_inplace(s, identity(4), dup), InvalidArgument);
  EXPECT_THROW(apply_gate_inplace(s, identity(2), out_of_range), InvalidArgument);
  EXPECT_THROW(apply_gate_inplace(s, identity(4), one), InvalidArgument);
}

TEST(ApplyGate, SerialAndParallelKernelsAgree) {
  std::mt19937_64 rng(5);
  for (int n : {3, 8, 14}) {
    const StateVector s(n, test::random_state(rng, Eigen::Index{1} << n));
    const CMatrix u = test::random_unitary(rng, 4);
    const int t[2] = {n - 1, 0};
    StateVector a = s, b = s;
    serial::apply_gate_inplace(a, u, t);
    parallel::apply_gate_inplace(b, u, t);
    EXPECT_LT((a.amplitudes() - b.amplitudes()).norm(), 1e-12);
    for (int q = 0; q < n; ++q) {
      EXPECT_NEAR(serial::outcome_probability(a, q, 1), parallel::outcome_probability(a, q, 1), 1e-12);
    }
  }
}

TEST(OutcomeProbability, BasisAndSuperposition) {
  EXPECT_NEAR(outcome_probability(StateVector(1), 0, 0), 1.0, 1e-15);
  CVector plus(2);
  plus << 1.0 / std::sqrt(2.0), 1.0 / std::sqrt(2.0);
  EXPECT_NEAR(outcome_probability(StateVector(1, plus), 0, 1), 0.5, 1e-15);
}

TEST(OutcomeProbability, MatchesAmplitudeMask) {
  std::mt19937_64 rng(6);
  for (int trial = 0; trial < 20; ++trial) {
    const StateVector s(3, test::random_state(rng, 8));
    for (int q = 0; q < 3; ++q) {
      double p1 = 0.0;
      for (int x = 0; x < 8; ++x) {
        if ((x >> (2 - q)) & 1) p1 += std::norm(s.amplitudes()(x));
      }
      EXPECT_NEAR(outcome_probability(s, q, 1), p1, 1e-12);
      EXPECT_NEAR(outcome_probability(s, q, 0) + outcome_probability(s, q, 1), 1.0, 1e-12);
    }
  }
}

TEST(OutcomeProbability, RejectsBadIndex) {
  const StateVector s(2);
  EXPECT_THROW(outcome_probability(s, 2, 0), InvalidArgument);
  EXPECT_THROW(outcome_probability(s, 0, 2), InvalidArgument);
}

TEST(Project, ZeroesTheOtherBranch) {
  std::mt19937_64 rng(7);
  StateVector s(3, test::random_state(rng, 8));
  const double p0 = outcome_probability(s, 1, 0);
  project_inplace(s, 1, 0);
  EXPECT_NEAR(s.norm() * s.norm(), p0, 1e-12);
  EXPECT_NEAR(outcome_probability(s, 1, 1), 0.0, 1e-15);
}
