#pragma once

#include <span>
#include <utility>

#include "dqpt/ansatz.hpp"
#include "dqpt/qcore.hpp"
#include "dqpt/tfim.hpp"

// Mixed transfer matrices and fidelity densities.
//
// Convention. Sites are ordered as the sequential circuit visits them; the
// ket amplitude of a string s1..sL is the bond operator A^{sL} ... A^{s1}.
// The transfer matrix is the Heisenberg-picture map on bond operators
//
//     X  ->  sum_{t,s} G[t,s] Bt_t^dag X Kt_s ,
//
// with Kt (Bt) the ket (bra) string and G the gate inserted between them,
// written on column-stacked vec(X):  E = sum G[t,s] Kt_s^T (x) Bt_t^dag.
// This is the transpose of sum_s A^s (x) conj(B^s); the spectrum is the same
// and vec(I) is a right fixed point of E_{U,U} (the open auxiliary leg).
//
//                 bra:  B^dag --- B^dag ---            (conj, later on the left)
//                        |         |
//                      [     G      ]                  one cell, two sites
//                        |         |
//                 ket:  A ------- A -------  X         X sits at the later end
//
namespace dqpt {

enum class Insertion { None, FirstOrder, SecondOrder };

struct MixedTransfer {
  CMatrix matrix;
  Insertion insertion = Insertion::None;
  int sites_per_cell = 1;
};

CVector vec(const CMatrix& m);
CMatrix unvec(const CVector& v, Eigen::Index rows, Eigen::Index cols);

/// Single-site E_{A,B} with no gate.
MixedTransfer transfer_matrix(const MpsTensor& ket, const MpsTensor& bra);

/// Two-site cell with the first-order even-bond gate between ket and bra.
MixedTransfer transfer_matrix(const MpsTensor& ket, const MpsTensor& bra, const CMatrix& gate);

/// Second-order cell: W_o is folded into ket and bra pairs, which are split
/// by SVD so that W_e sits inside the new cell. Bond dimension 4, E is 16x16.
MixedTransfer transfer_matrix(const MpsTensor& ket, const MpsTensor& bra, const SecondOrderGates& gates);

/// General cell: ket/bra tensors for each site of the cell, gate on the
/// cell's physical legs (first site = most significant).
MixedTransfer cell_transfer(std::span<const MpsTensor> ket, std::span<const MpsTensor> bra, const CMatrix& gate,
                            Insertion insertion);

/// Two-site object G(A (x) A) split as Y^{t2} X^{t1}; returns {X, Y}.
std::pair<MpsTensor, MpsTensor> split_two_site(const MpsTensor& site, const CMatrix& gate);

/// Leading eigenvalue of E.
cplx fidelity_density(const MixedTransfer& e);

struct FixedPointPair {
  CVector left;   // used as left^H E^n right
  CVector right;
};

/// right = vec(I); left = (E_{U,U}^dag)^2 vec(I), two copies of the current
/// state's tensor acting on the open boundary.
FixedPointPair approx_fixed_points(const MpsTensor& current);
FixedPointPair approx_fixed_points(const AnsatzParams& current);

/// C_n / C_{n-1}, C_n = left^H E^n right.
cplx power_method_ratio(const MixedTransfer& e, const FixedPointPair& fp, int n);

/// Schrodinger-picture channel rho -> sum_s A^s rho A^s^dag.
CMatrix channel(const MpsTensor& a, const CMatrix& rho);

/// Trace-one fixed point of the channel (bond density at the early end).
CMatrix steady_state(const MpsTensor& a);

/// Energy per site of the TFIM in the iMPS generated by `a`.
double energy_density(const MpsTensor& a, double J, double g);

/// Finite-block overlap operator K = sum_{t,s} layer[t,s] Bt_t^dag Kt_s over
/// `sites` sites with the same ket (bra) tensor on every site.
CMatrix block_operator(const MpsTensor& ket, const MpsTensor& bra, const CMatrix& layer, int sites);

/// Gate layer of a cost block of `cells` two-site cells (four sites by default).
CMatrix first_order_layer(const CMatrix& gate, int cells = 2);
CMatrix second_order_layer(const SecondOrderGates& gates, int cells = 2);

/// Success probability of the cost diagram by dense contraction:
///   P = Tr(K rho_L K^dag),  rho_L = channel^2(I/2) of the current state,
/// K the block operator (sites read off the layer size). The first-order form
/// goes through E^cells vec(I).
double cost_contraction_first_order(const MpsTensor& current, const MpsTensor& candidate, const CMatrix& gate,
                                    int cells = 2);
double cost_contraction_block(const MpsTensor& current, const MpsTensor& candidate, const CMatrix& layer);

}  // namespace dqpt
