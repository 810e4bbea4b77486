#include "dqpt/optimize.hpp"

#include <cmath>

namespace dqpt::opt {

RVector numeric_gradient(const Objective& f, const RVector& x, double step) {
  RVector g(x.size());
  RVector probe = x;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    probe(i) = x(i) + step;
    const double fp = f(probe);
    probe(i) = x(i) - step;
    const double fm = f(probe);
    probe(i) = x(i);
    g(i) = (fp - fm) / (2.0 * step);
  }
  return g;
}

BfgsResult minimize_bfgs(const Objective& f, RVector x0, const BfgsOptions& options) {
  const Eigen::Index n = x0.size();
  BfgsResult out;
  out.x = std::move(x0);
  out.value = f(out.x);
  if (n == 0) {
    out.converged = true;
    return out;
  }

  Eigen::MatrixXd hinv = Eigen::MatrixXd::Identity(n, n);
  RVector g = numeric_gradient(f, out.x, options.fd_step);
  bool just_reset = false;
  int stalled = 0;

  for (out.iterations = 0; out.iterations < options.max_iter; ++out.iterations) {
    out.grad_norm = g.lpNorm<Eigen::Infinity>();
    if (out.grad_norm < options.grad_tol) {
      out.converged = true;
      return out;
    }
    if (!g.allFinite()) throw NumericFailure("minimize_bfgs: non-finite gradient", out.value);
    RVector p = -hinv * g;
    if (!(p.dot(g) < 0.0)) {
      hinv.setIdentity();
      p = -g;
    }
    const double pmax = p.lpNorm<Eigen::Infinity>();
    if (pmax > options.max_step) p *= options.max_step / pmax;

    double alpha = 1.0;
    const double slope = p.dot(g);
    double trial_value = 0.0;
    RVector trial;
    bool accepted = false;
    for (int ls = 0; ls < 60; ++ls) {
      trial = out.x + alpha * p;
      trial_value = f(trial);
      if (std::isfinite(trial_value) && trial_value <= out.value + 1e-4 * alpha * slope) {
        accepted = true;
        break;
      }
      alpha *= 0.5;
    }
    if (!accepted) {
      if (just_reset) {
        // Descent direction exhausted at finite-difference resolution.
        out.converged = out.grad_norm < 1e3 * options.grad_tol;
        return out;
      }
      hinv.setIdentity();
      just_reset = true;
      continue;
    }
    just_reset = false;

    const RVector s = trial - out.x;
    const RVector g_new = numeric_gradient(f, trial, options.fd_step);
    const RVector y = g_new - g;
    const double sy = s.dot(y);
    if (sy > 1e-14) {
      const double rho = 1.0 / sy;
      const Eigen::MatrixXd id = Eigen::MatrixXd::Identity(n, n);
      hinv = (id - rho * s * y.transpose()) * hinv * (id - rho * y * s.transpose()) + rho * s * s.transpose();
    }
    const double drop = out.value - trial_value;
    out.x = trial;
    out.value = trial_value;
    g = g_new;
    // Value no longer moves at double precision: the gradient is at the
    // finite-difference noise floor.
    stalled = drop <= options.stall_tol * std::max(1.0, std::abs(out.value)) ? stalled + 1 : 0;
    if (stalled >= 3) {
      out.grad_norm = g.lpNorm<Eigen::Infinity>();
      out.converged = out.grad_norm < options.stall_grad_tol;
      ++out.iterations;
      return out;
    }
  }
  out.grad_norm = g.lpNorm<Eigen::Infinity>();
  out.converged = out.grad_norm < options.grad_tol;
  return out;
}

LsqResult least_squares(const Residuals& r, RVector x0, const LsqOptions& options) {
  LsqResult out;
  out.x = std::move(x0);
  RVector res = r(out.x);
  double cost = res.squaredNorm();
  double damping = 1e-3;
  const Eigen::Index n = out.x.size();

  for (out.iterations = 0; out.iterations < options.max_iter; ++out.iterations) {
    out.residual_norm = std::sqrt(cost);
    if (out.residual_norm < options.residual_tol) {
      out.solved = true;
      out.stationary = true;
      return out;
    }
    Eigen::MatrixXd jac(res.size(), n);
    RVector probe = out.x;
    for (Eigen::Index i = 0; i < n; ++i) {
      probe(i) = out.x(i) + options.fd_step;
      const RVector rp = r(probe);
      probe(i) = out.x(i) - options.fd_step;
      const RVector rm = r(probe);
      probe(i) = out.x(i);
      jac.col(i) = (rp - rm) / (2.0 * options.fd_step);
    }
    const RVector grad = jac.transpose() * res;
    if (grad.lpNorm<Eigen::Infinity>() < options.stationary_tol) {
      out.stationary = true;
      return out;
    }
    const Eigen::MatrixXd jtj = jac.transpose() * jac;
    bool improved = false;
    for (int tries = 0; tries < 30; ++tries) {
      Eigen::MatrixXd lhs = jtj;
      lhs.diagonal().array() += damping * (1.0 + jtj.diagonal().array());
      const RVector step = lhs.ldlt().solve(-grad);
      const RVector trial = out.x + step;
      const RVector trial_res = r(trial);
      const double trial_cost = trial_res.squaredNorm();
      if (std::isfinite(trial_cost) && trial_cost < cost) {
        out.x = trial;
        res = trial_res;
        cost = trial_cost;
        damping = std::max(damping * 0.3, 1e-12);
        improved = true;
        break;
      }
      damping *= 10.0;
    }
    if (!improved) {
      // No damped step lowers the cost: treat as stationary at FD resolution.
      out.stationary = true;
      out.residual_norm = std::sqrt(cost);
      return out;
    }
  }
  out.residual_norm = std::sqrt(cost);
  return out;
}

}  // namespace dqpt::opt
