#pragma once

#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace dqpt {

using cplx = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using RVector = Eigen::VectorXd;

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr cplx kI{0.0, 1.0};

struct InvalidArgument : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

/// Iterative or root-finding routine did not reach its tolerance.
/// `residual` carries the best value reached so callers can report it.
struct NumericFailure : std::runtime_error {
  NumericFailure(const std::string& what, double residual)
      : std::runtime_error(what), residual(residual) {}
  double residual;
};

struct ResourceLimit : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// File could not be opened, read or written.
struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

enum class Axis { X, Y, Z };

CMatrix pauli(Axis axis);
CMatrix identity(int dim);
CMatrix kron(const CMatrix& a, const CMatrix& b);

/// exp(-i angle P / 2) for the Pauli P on `axis`.
CMatrix rot_gate(Axis axis, double angle);

double max_abs(const CMatrix& m);
bool is_unitary(const CMatrix& u, double tol = 1e-10);
bool is_hermitian(const CMatrix& h, double tol = 1e-12);

/// exp(m) by scaling and squaring with a truncated Taylor series.
CMatrix expm(const CMatrix& m);

/// exp(-i h tau) for Hermitian h. Used for all two-site evolution gates.
CMatrix two_site_exp(const CMatrix& h, double tau);

struct EigenPair {
  cplx value;
  CVector vector;  // unit 2-norm
};

/// Eigenpair with the largest |eigenvalue|. Power iteration first; when it
/// stalls (near-degenerate moduli) falls back to characteristic-polynomial
/// roots for 4x4 input, or a dense Schur solve for other sizes. The result is
/// polished by shifted inverse iteration.
EigenPair leading_eig(const CMatrix& m);

/// Leading eigenpair of m acting from the left: w^H m = value w^H.
EigenPair leading_left_eig(const CMatrix& m);

/// Coefficients c0..c3 of det(x I - m) = x^4 + c3 x^3 + c2 x^2 + c1 x + c0.
std::vector<cplx> char_poly_4(const CMatrix& m);

/// All roots of the monic polynomial x^n + c[n-1] x^{n-1} + ... + c[0].
std::vector<cplx> monic_roots(const std::vector<cplx>& coeffs);

}  // namespace dqpt
