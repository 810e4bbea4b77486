#include "dqpt/qcore.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Eigenvalues>

namespace dqpt {

namespace {

constexpr int kPowerMaxIter = 10000;
constexpr double kPowerTol = 1e-10;
constexpr int kTaylorOrder = 20;

void require_square(const CMatrix& m, const char* who) {
  if (m.rows() != m.cols() || m.rows() == 0) {
    throw InvalidArgument(std::string(who) + ": matrix must be square and non-empty");
  }
}

// Shifted inverse iteration around `shift`, starting from v. Returns the
// Rayleigh-refined pair.
EigenPair polish(const CMatrix& m, cplx shift, CVector v) {
  const int n = static_cast<int>(m.rows());
  const double scale = std::max(m.norm(), 1e-300);
  // Nudge the shift off the spectrum so the factorization stays regular.
  const cplx nudged = shift + cplx(1e-13 * scale, 1e-13 * scale);
  Eigen::PartialPivLU<CMatrix> lu(m - nudged * CMatrix::Identity(n, n));
  for (int it = 0; it < 3; ++it) {
    CVector w = lu.solve(v);
    const double nw = w.norm();
    if (!std::isfinite(nw) || nw == 0.0) break;
    v = w / nw;
  }
  const cplx value = v.dot(m * v);
  return {value, v};
}

std::vector<cplx> all_eigenvalues(const CMatrix& m) {
  if (m.rows() == 4) return monic_roots(char_poly_4(m));
  Eigen::ComplexEigenSolver<CMatrix> solver(m, false);
  std::vector<cplx> out(solver.eigenvalues().data(),
                        solver.eigenvalues().data() + solver.eigenvalues().size());
  return out;
}

}  // namespace

CMatrix pauli(Axis axis) {
  CMatrix p(2, 2);
  switch (axis) {
    case Axis::X: p << 0, 1, 1, 0; break;
    case Axis::Y: p << 0, -kI, kI, 0; break;
    case Axis::Z: p << 1, 0, 0, -1; break;
  }
  return p;
}

CMatrix identity(int dim) { return CMatrix::Identity(dim, dim); }

CMatrix kron(const CMatrix& a, const CMatrix& b) {
  CMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return out;
}

CMatrix rot_gate(Axis axis, double angle) {
  if (!std::isfinite(angle)) throw InvalidArgument("rot_gate: non-finite angle");
  const double c = std::cos(angle / 2.0);
  const double s = std::sin(angle / 2.0);
  return c * identity(2) - kI * s * pauli(axis);
}

double max_abs(const CMatrix& m) { return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff(); }

bool is_unitary(const CMatrix& u, double tol) {
  if (u.rows() != u.cols()) return false;
  return max_abs(u.adjoint() * u - identity(static_cast<int>(u.rows()))) < tol;
}

bool is_hermitian(const CMatrix& h, double tol) {
  if (h.rows() != h.cols()) return false;
  return max_abs(h - h.adjoint()) < tol;
}

CMatrix expm(const CMatrix& m) {
  require_square(m, "expm");
  const double norm = m.cwiseAbs().rowwise().sum().maxCoeff();
  int squarings = 0;
  if (norm > 0.5) squarings = static_cast<int>(std::ceil(std::log2(norm / 0.5)));
  const CMatrix a = m / std::ldexp(1.0, squarings);

  const int n = static_cast<int>(m.rows());
  CMatrix result = identity(n);
  CMatrix term = identity(n);
  for (int k = 1; k <= kTaylorOrder; ++k) {
    term = term * a / static_cast<double>(k);
    result += term;
  }
  for (int i = 0; i < squarings; ++i) result = result * result;
  return result;
}

CMatrix two_site_exp(const CMatrix& h, double tau) {
  require_square(h, "two_site_exp");
  if (!is_hermitian(h, 1e-12)) throw InvalidArgument("two_site_exp: generator is not Hermitian");
  if (!std::isfinite(tau)) throw InvalidArgument("two_site_exp: non-finite time step");
  return expm(-kI * tau * h);
}

std::vector<cplx> char_poly_4(const CMatrix& m) {
  if (m.rows() != 4 || m.cols() != 4) throw InvalidArgument("char_poly_4: expects a 4x4 matrix");
  // Faddeev-LeVerrier recursion.
  std::vector<cplx> c(5);
  c[4] = 1.0;
  CMatrix mk = CMatrix::Zero(4, 4);
  for (int k = 1; k <= 4; ++k) {
    mk = m * mk + c[4 - k + 1] * identity(4);
    c[4 - k] = -(m * mk).trace() / static_cast<double>(k);
  }
  return {c[0], c[1], c[2], c[3]};
}

std::vector<cplx> monic_roots(const std::vector<cplx>& coeffs) {
  const int n = static_cast<int>(coeffs.size());
  if (n == 0) return {};
  auto eval = [&](cplx x) {
    cplx acc = 1.0;
    for (int i = n - 1; i >= 0; --i) acc = acc * x + coeffs[i];
    return acc;
  };
  double bound = 0.0;
  for (const auto& c : coeffs) bound = std::max(bound, std::abs(c));
  bound = 1.0 + bound;

  // Durand-Kerner with the usual non-symmetric starting spiral.
  std::vector<cplx> z(n);
  const cplx seed(0.4, 0.9);
  cplx p = 1.0;
  for (int i = 0; i < n; ++i) {
    p *= seed;
    z[i] = bound * p / std::abs(p) * (0.5 + 0.5 * static_cast<double>(i + 1) / n);
  }
  for (int it = 0; it < 2000; ++it) {
    double delta = 0.0;
    for (int i = 0; i < n; ++i) {
      cplx denom = 1.0;
      for (int j = 0; j < n; ++j) {
        if (j != i) denom *= (z[i] - z[j]);
      }
      if (std::abs(denom) < 1e-300) denom = 1e-300;
      const cplx step = eval(z[i]) / denom;
      z[i] -= step;
      delta = std::max(delta, std::abs(step));
    }
    if (delta < 1e-15 * bound) break;
  }
  return z;
}

EigenPair leading_eig(const CMatrix& m) {
  require_square(m, "leading_eig");
  const int n = static_cast<int>(m.rows());
  const double scale = m.norm();
  if (scale == 0.0) throw InvalidArgument("leading_eig: zero matrix");

  CVector v(n);
  for (int i = 0; i < n; ++i) v(i) = cplx(1.0 + 0.1 * i, 0.05 * i);
  v.normalize();

  cplx value = 0.0;
  bool converged = false;
  for (int it = 0; it < kPowerMaxIter; ++it) {
    CVector w = m * v;
    value = v.dot(w);
    const double residual = (w - value * v).norm();
    if (residual < kPowerTol * scale) {
      converged = true;
      break;
    }
    const double nw = w.norm();
    if (nw == 0.0) break;
    v = w / nw;
  }

  if (!converged) {
    const auto eigenvalues = all_eigenvalues(m);
    value = *std::max_element(eigenvalues.begin(), eigenvalues.end(),
                              [](cplx a, cplx b) { return std::abs(a) < std::abs(b); });
  }

  EigenPair out = polish(m, value, v);
  double residual = (m * out.vector - out.value * out.vector).norm();
  if (residual < 1e-9 * scale) return out;

  // Defective or tied leading eigenvalues: take the Schur eigenvector. A Jordan
  // block limits the attainable residual to ~sqrt(eps).
  Eigen::ComplexEigenSolver<CMatrix> solver(m, true);
  Eigen::Index lead = 0;
  solver.eigenvalues().cwiseAbs().maxCoeff(&lead);
  EigenPair schur{solver.eigenvalues()(lead), solver.eigenvectors().col(lead).normalized()};
  const double schur_residual = (m * schur.vector - schur.value * schur.vector).norm();
  if (schur_residual < residual) {
    out = schur;
    residual = schur_residual;
  }
  if (!(residual < 1e-7 * scale)) throw NumericFailure("leading_eig: residual above tolerance", residual);
  return out;
}

EigenPair leading_left_eig(const CMatrix& m) {
  EigenPair right = leading_eig(m.adjoint());
  return {std::conj(right.value), right.vector};
}

}  // namespace dqpt
