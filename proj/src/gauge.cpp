#include "dqpt/gauge.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Eigenvalues>

#include "dqpt/optimize.hpp"

namespace dqpt {

cplx mixed_fidelity(const AnsatzParams& a, const AnsatzParams& b) {
  return fidelity_density(transfer_matrix(mps_tensor(a), mps_tensor(b)));
}

GaugeMatch match_gauge(const AnsatzParams& a, const AnsatzParams& b) {
  const CMatrix e = transfer_matrix(mps_tensor(a), mps_tensor(b)).matrix;
  Eigen::ComplexEigenSolver<CMatrix> solver(e, false);
  std::vector<double> moduli;
  for (Eigen::Index i = 0; i < solver.eigenvalues().size(); ++i) moduli.push_back(std::abs(solver.eigenvalues()(i)));
  std::sort(moduli.rbegin(), moduli.rend());
  if (moduli.size() > 1 && moduli[0] - moduli[1] < 1e-8) {
    throw NumericFailure("match_gauge: leading eigenvalue is degenerate, gauge is ambiguous", moduli[0] - moduli[1]);
  }
  const EigenPair p = leading_eig(e);
  // Fixed point of X -> sum B^dag X A is g^dag when B = g^dag A g.
  const CMatrix x = unvec(p.vector, 2, 2);
  Eigen::JacobiSVD<CMatrix> svd(x, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const CMatrix polar = svd.matrixU() * svd.matrixV().adjoint();
  return {polar.adjoint(), p.value, 1.0 - std::abs(p.value)};
}

double x_gauge_angle(const CMatrix& g) {
  // Tr(Rx(theta)^dag g) = cos(theta/2) Tr g + sin(theta/2) i Tr(X g)
  const cplx alpha = g.trace();
  const cplx beta = kI * (pauli(Axis::X) * g).trace();
  Eigen::Matrix2d q;
  q << std::norm(alpha), std::real(alpha * std::conj(beta)), std::real(alpha * std::conj(beta)), std::norm(beta);
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(q);
  const Eigen::Vector2d v = es.eigenvectors().col(1);
  return wrap_angle(2.0 * std::atan2(v(1), v(0)));
}

ReparamResult reparametrise(const AnsatzParams& params, double phi7_target) {
  return reparametrise(params, phi7_target, {params.angles(3), params.angles(4), params.angles(6)});
}

ReparamResult reparametrise(const AnsatzParams& params, double phi7_target, const std::array<double, 3>& seed) {
  if (params.tmpl != Template::Reduced8) throw InvalidArgument("reparametrise: only defined for the reduced8 template");
  if (!std::isfinite(phi7_target)) throw InvalidArgument("reparametrise: target angle is not finite");
  const MpsTensor a = mps_tensor(params);
  auto assemble = [&](const RVector& x) {
    RVector f = params.angles;
    f(3) = x(0);
    f(4) = x(1);
    f(6) = x(2);
    f(7) = phi7_target;
    return AnsatzParams(Template::Reduced8, f);
  };
  auto residual = [&](const RVector& x) {
    const MpsTensor b = mps_tensor(assemble(x));
    const CMatrix m = b.a[0].adjoint() * a.a[0] + b.a[1].adjoint() * a.a[1];
    RVector r(2);
    r << m(0, 0).real() - 1.0, m(1, 1).real() - 1.0;
    return r;
  };
  RVector x0(3);
  x0 << seed[0], seed[1], seed[2];
  const opt::LsqResult fit = opt::least_squares(residual, x0);
  if (!fit.solved && !fit.stationary) {
    throw NumericFailure("reparametrise: least-squares solve did not converge", fit.residual_norm);
  }
  ReparamResult out{assemble(fit.x), 0.0, fit.residual_norm, fit.solved};
  out.params = unwrap_to(params, out.params);
  out.fidelity_defect = 1.0 - std::abs(mixed_fidelity(params, out.params));
  return out;
}

std::vector<ReparamPoint> reparam_sweep(const AnsatzParams& params, int points) {
  if (points < 2) throw InvalidArgument("reparam_sweep: need at least two points");
  std::vector<ReparamPoint> out;
  out.reserve(static_cast<std::size_t>(points));
  std::array<double, 3> seed{params.angles(3), params.angles(4), params.angles(6)};
  for (int k = 0; k < points; ++k) {
    const double phi7 = params.angles(7) + 2.0 * kPi * k / points;
    try {
      const ReparamResult r = reparametrise(params, phi7, seed);
      seed = {r.params.angles(3), r.params.angles(4), r.params.angles(6)};
      out.push_back({phi7, r.fidelity_defect, r.residual_norm, r.exact});
    } catch (const NumericFailure& e) {
      out.push_back({phi7, 1.0, e.residual, false});
    }
  }
  return out;
}

}  // namespace dqpt
