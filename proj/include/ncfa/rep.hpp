#pragma once

#include "ncfa/group.hpp"
#include "ncfa/label.hpp"
#include "ncfa/operator.hpp"

namespace ncfa {

struct RepOptions {
  int trunc_n = 16;    // trig window for the M(2) family
  int grid_n = 129;    // nodes for line models
  double window_L = 8.0;
};

// The model-space basis this library uses for a given irrep label.
BasisDescriptor model_basis(const GroupId& id, const IrrepLabel& l,
                            const RepOptions& o);

// pi_l(g) as a truncated block on basis b.  Grid models require shift
// coordinates to lie on the basis lattice (GridIncompatibleError otherwise).
//
// Model conventions (composition pi(gh) = pi(g) pi(h) throughout):
//   SU2      homogeneous polynomials, (pi(g)f)(z) = f(g^{-1} z)
//   AXB      on L^2(R_+, d psi/psi):  (pi_{+-}(beta(x) alpha(t)) xi)(psi) =
//            e^{+- i x psi} xi(e^t psi)
//   HEIS     (pi_t(y,z,x) xi)(psi) = e^{it(z - y psi)} xi(psi - x)
//   M2       (pi_rho(v, alpha) xi)(psi) = e^{i rho v.u(psi)} xi(psi - alpha),
//            u(psi) = (cos psi, sin psi); entries i^{m-n} e^{-i(m-n)phi}
//            J_{m-n}(rho r) e^{-i n alpha}
//   GRELAUD  (pi_b(z,t) xi)(psi) = e^{i b Re(conj(z) e^{-conj(w) psi})}
//            xi(psi - t)
TruncatedOperator rep_matrix(const GroupId& id, const IrrepLabel& l,
                             const GroupElement& g, const BasisDescriptor& b);

// Diagonal of the Duflo-Moore operator K_pi in basis b (identity for
// unimodular groups; psi for ax+b; e^{-2 a psi} for Grelaud).
RealVector duflo_moore_diag(const GroupId& id, const IrrepLabel& l,
                            const BasisDescriptor& b);

// Derived representation d pi(X) of su(2) on the weight basis of dimension d
// (X skew-Hermitian traceless).
TruncatedOperator su2_dpi(int dim, const Eigen::Matrix2cd& X);

}  // namespace ncfa
