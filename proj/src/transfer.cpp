#include "dqpt/transfer.hpp"

#include <cmath>
#include <vector>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

namespace dqpt {

namespace {

// String operator A_L^{sL} ... A_1^{s1}; s1 is the most significant bit of s.
CMatrix string_op(std::span<const MpsTensor> sites, std::size_t s) {
  const std::size_t len = sites.size();
  CMatrix acc = sites[0].a[(s >> (len - 1)) & 1u];
  for (std::size_t i = 1; i < len; ++i) acc = sites[i].a[(s >> (len - 1 - i)) & 1u] * acc;
  return acc;
}

}  // namespace

CVector vec(const CMatrix& m) { return Eigen::Map<const CVector>(m.data(), m.size()); }

CMatrix unvec(const CVector& v, Eigen::Index rows, Eigen::Index cols) {
  if (v.size() != rows * cols) throw InvalidArgument("unvec: size mismatch");
  return Eigen::Map<const CMatrix>(v.data(), rows, cols);
}

MixedTransfer cell_transfer(std::span<const MpsTensor> ket, std::span<const MpsTensor> bra, const CMatrix& gate,
                            Insertion insertion) {
  if (ket.empty() || ket.size() != bra.size()) throw InvalidArgument("cell_transfer: ket/bra cell size mismatch");
  const std::size_t dim = std::size_t{1} << ket.size();
  if (static_cast<std::size_t>(gate.rows()) != dim || gate.cols() != gate.rows()) {
    throw InvalidArgument("cell_transfer: gate dimension does not match cell");
  }
  std::vector<CMatrix> kets(dim), bras(dim);
  for (std::size_t s = 0; s < dim; ++s) {
    kets[s] = string_op(ket, s);
    bras[s] = string_op(bra, s);
  }
  if (kets[0].rows() != kets[0].cols() || bras[0].rows() != bras[0].cols()) {
    throw InvalidArgument("cell_transfer: cell must map a bond space to itself");
  }
  const Eigen::Index n = kets[0].rows() * bras[0].rows();
  MixedTransfer e;
  e.matrix = CMatrix::Zero(n, n);
  e.insertion = insertion;
  e.sites_per_cell = static_cast<int>(ket.size());
  for (std::size_t t = 0; t < dim; ++t) {
    const CMatrix bdag = bras[t].adjoint();
    for (std::size_t s = 0; s < dim; ++s) {
      const cplx w = gate(static_cast<Eigen::Index>(t), static_cast<Eigen::Index>(s));
      if (w == 0.0) continue;
      e.matrix += w * kron(kets[s].transpose(), bdag);
    }
  }
  return e;
}

MixedTransfer transfer_matrix(const MpsTensor& ket, const MpsTensor& bra) {
  const MpsTensor k[1] = {ket};
  const MpsTensor b[1] = {bra};
  return cell_transfer(k, b, identity(2), Insertion::None);
}

MixedTransfer transfer_matrix(const MpsTensor& ket, const MpsTensor& bra, const CMatrix& gate) {
  if (gate.rows() != 4 || gate.cols() != 4) throw InvalidArgument("transfer_matrix: first-order gate must be 4x4");
  const MpsTensor k[2] = {ket, ket};
  const MpsTensor b[2] = {bra, bra};
  return cell_transfer(k, b, gate, Insertion::FirstOrder);
}

std::pair<MpsTensor, MpsTensor> split_two_site(const MpsTensor& site, const CMatrix& gate) {
  const Eigen::Index d = site.bond_out();
  if (site.bond_in() != d) throw InvalidArgument("split_two_site: expects a square bond");
  // R_{(out,t2),(t1,in)} = sum_s gate[t,s] (A^{s2} A^{s1})_{out,in}
  CMatrix r = CMatrix::Zero(2 * d, 2 * d);
  for (int t1 = 0; t1 < 2; ++t1) {
    for (int t2 = 0; t2 < 2; ++t2) {
      CMatrix block = CMatrix::Zero(d, d);
      for (int s1 = 0; s1 < 2; ++s1) {
        for (int s2 = 0; s2 < 2; ++s2) block += gate(2 * t1 + t2, 2 * s1 + s2) * (site.a[s2] * site.a[s1]);
      }
      for (Eigen::Index o = 0; o < d; ++o) {
        for (Eigen::Index i = 0; i < d; ++i) r(o * 2 + t2, t1 * d + i) = block(o, i);
      }
    }
  }
  Eigen::JacobiSVD<CMatrix> svd(r, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const Eigen::VectorXd root = svd.singularValues().cwiseSqrt();
  const CMatrix left = svd.matrixU() * root.asDiagonal();             // (out,t2) x c
  const CMatrix right = root.asDiagonal() * svd.matrixV().adjoint();  // c x (t1,in)
  const Eigen::Index chi = root.size();
  MpsTensor x, y;
  for (int t = 0; t < 2; ++t) {
    y.a[t].resize(d, chi);
    x.a[t].resize(chi, d);
    for (Eigen::Index o = 0; o < d; ++o) y.a[t].row(o) = left.row(o * 2 + t);
    for (Eigen::Index i = 0; i < d; ++i) x.a[t].col(i) = right.col(t * d + i);
  }
  return {x, y};
}

MixedTransfer transfer_matrix(const MpsTensor& ket, const MpsTensor& bra, const SecondOrderGates& gates) {
  const auto [kx, ky] = split_two_site(ket, gates.odd);
  const auto [bx, by] = split_two_site(bra, gates.odd.adjoint());
  const MpsTensor k[2] = {ky, kx};
  const MpsTensor b[2] = {by, bx};
  return cell_transfer(k, b, gates.even, Insertion::SecondOrder);
}

cplx fidelity_density(const MixedTransfer& e) { return leading_eig(e.matrix).value; }

FixedPointPair approx_fixed_points(const MpsTensor& current) {
  const CMatrix e = transfer_matrix(current, current).matrix;
  const Eigen::Index d = current.bond_out();
  const CVector right = vec(identity(static_cast<int>(d)));
  const CVector left = e.adjoint() * (e.adjoint() * right);
  return {left, right};
}

FixedPointPair approx_fixed_points(const AnsatzParams& current) { return approx_fixed_points(mps_tensor(current)); }

cplx power_method_ratio(const MixedTransfer& e, const FixedPointPair& fp, int n) {
  if (n < 1) throw InvalidArgument("power_method_ratio: order must be at least 1");
  if (fp.left.size() != e.matrix.rows() || fp.right.size() != e.matrix.rows()) {
    throw InvalidArgument("power_method_ratio: fixed-point dimension mismatch");
  }
  CVector v = fp.right;
  for (int i = 0; i < n - 1; ++i) v = e.matrix * v;
  const cplx denom = fp.left.dot(v);
  const cplx numer = fp.left.dot(e.matrix * v);
  if (std::abs(denom) < 1e-300 || std::abs(denom) < 1e-14 * std::abs(numer)) {
    throw NumericFailure("power_method_ratio: vanishing denominator", std::abs(denom));
  }
  return numer / denom;
}

CMatrix channel(const MpsTensor& a, const CMatrix& rho) {
  return a.a[0] * rho * a.a[0].adjoint() + a.a[1] * rho * a.a[1].adjoint();
}

CMatrix steady_state(const MpsTensor& a) {
  const CMatrix s = kron(a.a[0].conjugate(), a.a[0]) + kron(a.a[1].conjugate(), a.a[1]);
  // The channel's fixed space can be degenerate; take the eigenvector with the
  // largest trace among the unit-modulus eigenvalues.
  Eigen::ComplexEigenSolver<CMatrix> es(s);
  Eigen::Index best = -1;
  double best_trace = 0.0;
  for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) {
    if (std::abs(es.eigenvalues()(i) - 1.0) > 1e-8) continue;
    const double tr = std::abs(unvec(es.eigenvectors().col(i), a.bond_out(), a.bond_out()).trace());
    if (tr > best_trace) {
      best_trace = tr;
      best = i;
    }
  }
  if (best < 0 || best_trace < 1e-12) throw NumericFailure("steady_state: no trace-carrying fixed point", best_trace);
  CMatrix rho = unvec(es.eigenvectors().col(best), a.bond_out(), a.bond_out());
  rho /= rho.trace();
  return 0.5 * (rho + rho.adjoint());
}

double energy_density(const MpsTensor& a, double J, double g) {
  const CMatrix rho = steady_state(a);
  const CMatrix h = bond_hamiltonian(J, g);
  const MpsTensor pair[2] = {a, a};
  std::vector<CMatrix> strings(4);
  for (std::size_t s = 0; s < 4; ++s) strings[s] = string_op(pair, s);
  cplx e = 0.0;
  for (int t = 0; t < 4; ++t) {
    for (int s = 0; s < 4; ++s) {
      if (h(t, s) == 0.0) continue;
      e += h(t, s) * (strings[s] * rho * strings[t].adjoint()).trace();
    }
  }
  return e.real();
}

CMatrix block_operator(const MpsTensor& ket, const MpsTensor& bra, const CMatrix& layer, int sites) {
  const std::size_t dim = std::size_t{1} << sites;
  if (static_cast<std::size_t>(layer.rows()) != dim) throw InvalidArgument("block_operator: layer size mismatch");
  const std::vector<MpsTensor> kc(static_cast<std::size_t>(sites), ket);
  const std::vector<MpsTensor> bc(static_cast<std::size_t>(sites), bra);
  std::vector<CMatrix> kets(dim), bras(dim);
  for (std::size_t s = 0; s < dim; ++s) {
    kets[s] = string_op(kc, s);
    bras[s] = string_op(bc, s);
  }
  CMatrix k = CMatrix::Zero(bras[0].cols(), kets[0].cols());
  for (std::size_t t = 0; t < dim; ++t) {
    for (std::size_t s = 0; s < dim; ++s) {
      const cplx w = layer(static_cast<Eigen::Index>(t), static_cast<Eigen::Index>(s));
      if (w != 0.0) k += w * bras[t].adjoint() * kets[s];
    }
  }
  return k;
}

CMatrix first_order_layer(const CMatrix& gate, int cells) {
  if (cells < 1) throw InvalidArgument("first_order_layer: need at least one cell");
  CMatrix layer = gate;
  for (int c = 1; c < cells; ++c) layer = kron(layer, gate);
  return layer;
}

CMatrix second_order_layer(const SecondOrderGates& gates, int cells) {
  if (cells < 1) throw InvalidArgument("second_order_layer: need at least one cell");
  const CMatrix even = first_order_layer(gates.even, cells);
  if (cells == 1) return even;
  CMatrix odd = identity(2);
  for (int c = 1; c < cells; ++c) odd = kron(odd, gates.odd);
  odd = kron(odd, identity(2));
  return odd * even * odd;
}

namespace {
double boundary_probability(const MpsTensor& current, const CMatrix& k) {
  const CMatrix rho_l = channel(current, channel(current, 0.5 * identity(static_cast<int>(current.bond_out()))));
  return (k * rho_l * k.adjoint()).trace().real();
}
}  // namespace

double cost_contraction_first_order(const MpsTensor& current, const MpsTensor& candidate, const CMatrix& gate,
                                    int cells) {
  if (cells < 1) throw InvalidArgument("cost_contraction_first_order: need at least one cell");
  const CMatrix e = transfer_matrix(current, candidate, gate).matrix;
  const Eigen::Index d = current.bond_out();
  CVector vk = vec(identity(static_cast<int>(d)));
  for (int c = 0; c < cells; ++c) vk = e * vk;
  return boundary_probability(current, unvec(vk, d, d));
}

double cost_contraction_block(const MpsTensor& current, const MpsTensor& candidate, const CMatrix& layer) {
  int sites = 0;
  while ((Eigen::Index{1} << sites) < layer.rows()) ++sites;
  if ((Eigen::Index{1} << sites) != layer.rows()) throw InvalidArgument("cost_contraction_block: layer is not 2^n");
  return boundary_probability(current, block_operator(current, candidate, layer, sites));
}

}  // namespace dqpt
