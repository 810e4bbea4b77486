#pragma once

#include <array>
#include <string>
#include <string_view>

#include "dqpt/qcore.hpp"

namespace dqpt {

/// Parameter templates for the two-qubit unitary U that generates the iMPS.
///
/// Project-wide leg convention: U acts on (physical, auxiliary) with the
/// physical qubit as the first tensor factor.
///
/// Reduced8, angles phi0..phi7, with W = exp(-i pi/4 Z(x)Z):
///   U = [Ry(phi6) (x) Rx(phi7)] . W . [Ry(phi5) (x) Rx(phi2)] . W
///       . [Rx(phi3) (x) Rz(phi0) Rx(phi1) Rz(phi4)]
/// The auxiliary leg is closed by Rx(phi7) on output and opened by the ZXZ
/// chain (phi0, phi1, phi4) on input, so x-rotations of the bond are absorbed
/// exactly. Two entanglers are needed: with a single W every A^s^dag A^t is
/// diagonal in one basis and the g = 1.5 ground state is out of reach.
/// All-zero angles give U = -i Z(x)Z, which generates the same product state
/// as the identity.
///
/// Full15: generic two-qubit unitary in canonical (KAK) form,
///   U = [E(p0,p1,p2) (x) E(p3,p4,p5)] . exp(-i(p6 XX + p7 YY + p8 ZZ))
///       . [E(p9,p10,p11) (x) E(p12,p13,p14)],   E(a,b,c) = Rz(a) Rx(b) Rz(c).
enum class Template { Reduced8, Full15 };

std::size_t angle_count(Template t);
std::string to_string(Template t);
Template template_from_string(std::string_view name);

struct AnsatzParams {
  AnsatzParams(Template t, RVector angles);
  static AnsatzParams zeros(Template t);

  Template tmpl;
  RVector angles;  // radians, unwrapped
};

/// Site tensor of an MPS: a[s] maps the incoming bond (columns) to the
/// outgoing bond (rows). Bond dimensions are general so split two-site
/// objects can reuse the type; ansatz tensors have D = 2.
struct MpsTensor {
  std::array<CMatrix, 2> a;

  Eigen::Index bond_out() const { return a[0].rows(); }
  Eigen::Index bond_in() const { return a[0].cols(); }
};

/// Rz(a) Rx(b) Rz(c).
CMatrix euler_zxz(double a, double b, double c);

/// Angles (a, b, c) with m = e^{i delta} Rz(a) Rx(b) Rz(c). Among equivalent
/// branches returns the one closest to `hint`.
std::array<double, 3> euler_zxz_angles(const CMatrix& m, const std::array<double, 3>& hint = {0.0, 0.0, 0.0});

CMatrix build_unitary(const AnsatzParams& params);

/// A^s_{ab} = <s, a| U |0, b>.
MpsTensor mps_tensor(const CMatrix& u);
MpsTensor mps_tensor(const AnsatzParams& params);

/// Exact x-gauge transformation of a Reduced8 parameter set: phi7 -> phi7 - theta
/// and the input ZXZ chain absorbs Rx(theta). Physical state unchanged.
AnsatzParams x_gauge_rotate(const AnsatzParams& params, double theta);

/// Full15 parameters reproducing a Reduced8 unitary up to global phase,
/// found by a seeded fit; throws NumericFailure if the unitary infidelity
/// stays above 1e-12.
AnsatzParams embed_full15(const AnsatzParams& reduced);

/// Shifts every angle by multiples of 2 pi to sit nearest `reference`.
AnsatzParams unwrap_to(const AnsatzParams& reference, const AnsatzParams& params);

/// Maps each angle to (-pi, pi]. Only used at serialization boundaries.
AnsatzParams wrap_angles(const AnsatzParams& params);
double wrap_angle(double angle);

/// Max-norm distance between angle vectors modulo 2 pi.
double angle_distance(const AnsatzParams& a, const AnsatzParams& b);

}  // namespace dqpt
