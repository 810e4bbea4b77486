#include "dqpt/ansatz.hpp"

#include <cmath>
#include <limits>
#include <random>

#include "dqpt/optimize.hpp"

namespace dqpt {

namespace {

double nearest_branch(double angle, double reference) {
  const double twopi = 2.0 * kPi;
  return angle + twopi * std::round((reference - angle) / twopi);
}

CMatrix entangler(double xx, double yy, double zz) {
  // XX, YY, ZZ commute, so the exponential factorizes.
  const CMatrix px = kron(pauli(Axis::X), pauli(Axis::X));
  const CMatrix py = kron(pauli(Axis::Y), pauli(Axis::Y));
  const CMatrix pz = kron(pauli(Axis::Z), pauli(Axis::Z));
  auto pauli_exp = [](const CMatrix& p, double angle) -> CMatrix {
    return std::cos(angle) * identity(4) - kI * std::sin(angle) * p;
  };
  return pauli_exp(px, xx) * pauli_exp(py, yy) * pauli_exp(pz, zz);
}

}  // namespace

std::size_t angle_count(Template t) { return t == Template::Reduced8 ? 8 : 15; }

std::string to_string(Template t) { return t == Template::Reduced8 ? "reduced8" : "full15"; }

Template template_from_string(std::string_view name) {
  if (name == "reduced8") return Template::Reduced8;
  if (name == "full15") return Template::Full15;
  throw InvalidArgument("unknown ansatz template '" + std::string(name) + "'");
}

AnsatzParams::AnsatzParams(Template t, RVector a) : tmpl(t), angles(std::move(a)) {
  if (static_cast<std::size_t>(angles.size()) != angle_count(t)) {
    throw InvalidArgument("AnsatzParams: " + to_string(t) + " expects " + std::to_string(angle_count(t)) +
                          " angles, got " + std::to_string(angles.size()));
  }
  for (Eigen::Index i = 0; i < angles.size(); ++i) {
    if (!std::isfinite(angles(i))) throw InvalidArgument("AnsatzParams: non-finite angle");
  }
}

AnsatzParams AnsatzParams::zeros(Template t) {
  return AnsatzParams(t, RVector::Zero(static_cast<Eigen::Index>(angle_count(t))));
}

CMatrix euler_zxz(double a, double b, double c) {
  return rot_gate(Axis::Z, a) * rot_gate(Axis::X, b) * rot_gate(Axis::Z, c);
}

std::array<double, 3> euler_zxz_angles(const CMatrix& m, const std::array<double, 3>& hint) {
  if (m.rows() != 2 || m.cols() != 2 || !is_unitary(m, 1e-8)) {
    throw InvalidArgument("euler_zxz_angles: expects a 2x2 unitary");
  }
  const double cb = std::abs(m(0, 0));
  const double sb = std::abs(m(1, 0));
  const double b0 = 2.0 * std::atan2(sb, cb);
  // Ratios of entries are blind to the global phase.
  const double sum = cb > 1e-9 ? std::arg(m(1, 1) * std::conj(m(0, 0))) : hint[0] + hint[2];
  const double diff = sb > 1e-9 ? std::arg(m(1, 0) * std::conj(m(0, 1))) : hint[0] - hint[2];
  const double a0 = 0.5 * (sum + diff);
  const double c0 = 0.5 * (sum - diff);

  const std::array<std::array<double, 3>, 4> candidates{{
      {a0, b0, c0}, {a0, -b0, c0}, {a0 + kPi, b0, c0 + kPi}, {a0 + kPi, -b0, c0 + kPi}}};

  std::array<double, 3> best{};
  double best_dist = std::numeric_limits<double>::infinity();
  for (const auto& cand : candidates) {
    const CMatrix r = euler_zxz(cand[0], cand[1], cand[2]);
    const double overlap = std::abs((m.adjoint() * r).trace()) / 2.0;
    if (overlap < 1.0 - 1e-9) continue;
    std::array<double, 3> shifted{};
    double dist = 0.0;
    for (int i = 0; i < 3; ++i) {
      shifted[i] = nearest_branch(cand[i], hint[i]);
      dist += std::abs(shifted[i] - hint[i]);
    }
    if (dist < best_dist) {
      best_dist = dist;
      best = shifted;
    }
  }
  if (!std::isfinite(best_dist)) throw NumericFailure("euler_zxz_angles: no consistent branch", 1.0);
  return best;
}

CMatrix build_unitary(const AnsatzParams& p) {
  const RVector& f = p.angles;
  if (static_cast<std::size_t>(f.size()) != angle_count(p.tmpl)) {
    throw InvalidArgument("build_unitary: wrong angle count");
  }
  if (p.tmpl == Template::Reduced8) {
    const CMatrix w = entangler(0.0, 0.0, kPi / 4.0);
    const CMatrix out = kron(rot_gate(Axis::Y, f(6)), rot_gate(Axis::X, f(7)));
    const CMatrix mid = kron(rot_gate(Axis::Y, f(5)), rot_gate(Axis::X, f(2)));
    const CMatrix in = kron(rot_gate(Axis::X, f(3)), euler_zxz(f(0), f(1), f(4)));
    return out * w * mid * w * in;
  }
  const CMatrix out = kron(euler_zxz(f(0), f(1), f(2)), euler_zxz(f(3), f(4), f(5)));
  const CMatrix in = kron(euler_zxz(f(9), f(10), f(11)), euler_zxz(f(12), f(13), f(14)));
  return out * entangler(f(6), f(7), f(8)) * in;
}

MpsTensor mps_tensor(const CMatrix& u) {
  if (u.rows() != 4 || u.cols() != 4) throw InvalidArgument("mps_tensor: expects a 4x4 unitary");
  if (!is_unitary(u, 1e-10)) throw InvalidArgument("mps_tensor: input is not unitary");
  MpsTensor t;
  for (int s = 0; s < 2; ++s) {
    t.a[s].resize(2, 2);
    for (int a = 0; a < 2; ++a) {
      for (int b = 0; b < 2; ++b) t.a[s](a, b) = u(2 * s + a, b);  // physical input fixed to |0>
    }
  }
  return t;
}

MpsTensor mps_tensor(const AnsatzParams& params) { return mps_tensor(build_unitary(params)); }

AnsatzParams x_gauge_rotate(const AnsatzParams& params, double theta) {
  if (params.tmpl != Template::Reduced8) {
    throw InvalidArgument("x_gauge_rotate: only defined for the reduced8 template");
  }
  RVector f = params.angles;
  const CMatrix chain = euler_zxz(f(0), f(1), f(4)) * rot_gate(Axis::X, theta);
  const auto e = euler_zxz_angles(chain, {f(0), f(1), f(4)});
  f(0) = e[0];
  f(1) = e[1];
  f(4) = e[2];
  f(7) -= theta;
  return AnsatzParams(Template::Reduced8, f);
}

AnsatzParams embed_full15(const AnsatzParams& r) {
  if (r.tmpl != Template::Reduced8) throw InvalidArgument("embed_full15: expects reduced8 parameters");
  const CMatrix target = build_unitary(r);
  auto infidelity = [&](const RVector& x) {
    const CMatrix u = build_unitary(AnsatzParams(Template::Full15, x));
    return 1.0 - std::norm((target.adjoint() * u).trace()) / 16.0;
  };
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> angle(-kPi, kPi);
  opt::BfgsOptions options;
  options.grad_tol = 1e-12;
  double best = 1.0;
  RVector best_x;
  for (int attempt = 0; attempt < 40 && best > 1e-12; ++attempt) {
    RVector x0(15);
    for (Eigen::Index i = 0; i < 15; ++i) x0(i) = angle(rng);
    const opt::BfgsResult fit = opt::minimize_bfgs(infidelity, x0, options);
    if (fit.value < best) {
      best = fit.value;
      best_x = fit.x;
    }
  }
  if (best > 1e-12) throw NumericFailure("embed_full15: fit did not reach unit fidelity", best);
  return AnsatzParams(Template::Full15, best_x);
}

AnsatzParams unwrap_to(const AnsatzParams& reference, const AnsatzParams& params) {
  if (reference.tmpl != params.tmpl) throw InvalidArgument("unwrap_to: template mismatch");
  RVector f = params.angles;
  for (Eigen::Index i = 0; i < f.size(); ++i) f(i) = nearest_branch(f(i), reference.angles(i));
  return AnsatzParams(params.tmpl, f);
}

double wrap_angle(double angle) {
  double w = std::remainder(angle, 2.0 * kPi);  // [-pi, pi]
  if (w <= -kPi) w += 2.0 * kPi;
  return w;
}

AnsatzParams wrap_angles(const AnsatzParams& params) {
  RVector f = params.angles;
  for (Eigen::Index i = 0; i < f.size(); ++i) f(i) = wrap_angle(f(i));
  return AnsatzParams(params.tmpl, f);
}

double angle_distance(const AnsatzParams& a, const AnsatzParams& b) {
  if (a.tmpl != b.tmpl) throw InvalidArgument("angle_distance: template mismatch");
  double d = 0.0;
  for (Eigen::Index i = 0; i < a.angles.size(); ++i) {
    d = std::max(d, std::abs(wrap_angle(a.angles(i) - b.angles(i))));
  }
  return d;
}

}  // namespace dqpt
