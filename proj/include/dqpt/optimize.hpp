#pragma once

#include <functional>

#include "dqpt/qcore.hpp"

// Small deterministic optimizers for the classical (dense) paths: ground-state
// preparation, exact-in-ansatz updates, reparametrisation solves.
namespace dqpt::opt {

using Objective = std::function<double(const RVector&)>;
using Residuals = std::function<RVector(const RVector&)>;

RVector numeric_gradient(const Objective& f, const RVector& x, double step);

struct BfgsOptions {
  int max_iter = 1000;
  double grad_tol = 1e-9;
  double fd_step = 1e-6;
  double max_step = 0.5;  // radians, caps each line-search trial
  double stall_tol = 1e-15;       // relative decrease counted as no progress
  double stall_grad_tol = 1e-6;   // gradient accepted as converged after a stall
};

struct BfgsResult {
  RVector x;
  double value = 0.0;
  double grad_norm = 0.0;
  int iterations = 0;
  bool converged = false;
};

/// Quasi-Newton minimization with central-difference gradients and Armijo
/// backtracking.
BfgsResult minimize_bfgs(const Objective& f, RVector x0, const BfgsOptions& options = {});

struct LsqOptions {
  int max_iter = 200;
  double residual_tol = 1e-10;
  double stationary_tol = 1e-12;
  double fd_step = 1e-7;
};

struct LsqResult {
  RVector x;
  double residual_norm = 0.0;
  int iterations = 0;
  bool solved = false;      // residual below residual_tol
  bool stationary = false;  // least-squares stationary point reached
};

/// Damped Gauss-Newton (Levenberg-Marquardt) on r(x) = 0 with a
/// finite-difference Jacobian. Handles under-determined systems via the
/// damped normal equations.
LsqResult least_squares(const Residuals& r, RVector x0, const LsqOptions& options = {});

}  // namespace dqpt::opt
