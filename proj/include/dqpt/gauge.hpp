#pragma once

#include <array>
#include <vector>

#include "dqpt/ansatz.hpp"
#include "dqpt/transfer.hpp"

// Gauge freedom of the auxiliary qubit and the reparametrisation of the
// reduced template that moves between gauge-equivalent parameter sets.
namespace dqpt {

/// Leading eigenvalue of the single-site E_{A,B}; modulus 1 iff the two
/// parameter sets describe the same state.
cplx mixed_fidelity(const AnsatzParams& a, const AnsatzParams& b);

struct GaugeMatch {
  CMatrix gauge;       // unitary g with B^s = g^dag A^s g (up to a phase)
  cplx eigenvalue;     // leading eigenvalue of E_{A,B}
  double residual;     // 1 - |eigenvalue|
};

/// Unitary part of the leading eigenvector of E_{A,B}. Throws NumericFailure
/// when the two leading moduli are too close to pick a fixed point.
GaugeMatch match_gauge(const AnsatzParams& a, const AnsatzParams& b);

/// theta maximising |Tr(Rx(theta)^dag g)|, i.e. the X-rotation closest to g.
double x_gauge_angle(const CMatrix& gauge);

struct ReparamResult {
  AnsatzParams params;
  double fidelity_defect = 0.0;  // 1 - |lambda(E_{old,new})|
  double residual_norm = 0.0;    // norm of the diagonal identity-preservation residual
  bool exact = false;            // residual solved to tolerance
};

/// Pin phi7 to `phi7_target` and re-solve (phi3, phi4, phi6) so that the
/// diagonal of sum_s B^s^dag A^s stays at one (least squares, Levenberg-Marquardt).
/// Exact solutions exist only on a measure-zero set, so a stationary point is
/// accepted; the fidelity defect reports how far the state moved.
ReparamResult reparametrise(const AnsatzParams& params, double phi7_target);
/// Same, starting the solve from `seed` = (phi3, phi4, phi6).
ReparamResult reparametrise(const AnsatzParams& params, double phi7_target, const std::array<double, 3>& seed);

struct ReparamPoint {
  double phi7 = 0.0;
  double fidelity_defect = 0.0;
  double residual_norm = 0.0;
  bool solved = false;  // identity conditions met to tolerance
};

/// phi7 stepped once around the circle from its current value, each solve
/// seeded by the previous one, so the points trace a continuous curve.
std::vector<ReparamPoint> reparam_sweep(const AnsatzParams& params, int points = 64);

}  // namespace dqpt
