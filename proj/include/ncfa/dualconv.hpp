#pragma once

#include <vector>

#include "ncfa/field.hpp"
#include "ncfa/kernel.hpp"
#include "ncfa/quadrature.hpp"

namespace ncfa {

// Result of a single theta evaluation: the operator block (trig path) or an
// integral kernel (grid/line path), plus the branch bookkeeping (the angles
// mu and phi that entered, and a tail estimate where branches are truncated).
struct ThetaResult {
  TruncatedOperator op;
  KernelFunction kernel;
  bool has_op = false;
  bool has_kernel = false;
  std::vector<double> mus;
  std::vector<double> phis;
  int branch_count = 0;
  double tail_estimate = 0.0;
};

struct DualConvOptions {
  int outer_n = 32;   // node budget across the smooth pieces of each input support
  int mu_n = 32;      // node budget for the mu-substituted inner rho integral
  int out_n = 32;     // node budget across the smooth pieces of the output chart
  int s_n = 64;       // Heisenberg partial-trace quadrature
  double heis_prefactor = 1.0 / kFourPiSq;  // see heis_dualconv
};

// ---- M(2) ----------------------------------------------------------------
// Polar split rho1 + rho2 e^{i mu} = rho e^{i phi}; throws
// DegenerateGeometryError at rho = 0 (rho1 = rho2, mu = pi).
struct PolarPoint {
  double rho;
  double phi;
};
PolarPoint m2_angle(double rho1, double rho2, double mu);

// theta_0 at angle mu for trig-window operators: the kernel-product formula
//   k(psi, psi1) = k1(psi - phi, psi1 - phi) k2(psi - phi + mu, psi1 - phi + mu)
// evaluated as a closed-form coefficient convolution (output window N1 + N2).
ThetaResult m2_theta0(const TruncatedOperator& a1, const TruncatedOperator& a2,
                      double rho1, double rho2, double mu);

// theta(rho) = theta_0(mu) + theta_0(2pi - mu) with phi(2pi - mu) = -phi(mu);
// rho must lie in the open interval (|rho1 - rho2|, rho1 + rho2).
ThetaResult m2_theta(const TruncatedOperator& a1, const TruncatedOperator& a2,
                     double rho1, double rho2, double rho);

// Kernel-level theta for arbitrary circle kernels (the L^1 / L^inf
// inequality checks); callable backing, both branches summed.
KernelFunction m2_theta_kernel(const KernelFunction& a1,
                               const KernelFunction& a2, double rho1,
                               double rho2, double rho);

// (S # T)_rho = iint_{D_rho} 1/2 theta(S_rho1, T_rho2)(rho) K rho1 rho2.
// The rho2 integral runs in the mu variable through the substituted rule;
// the output carries an evaluator closure so it can be re-evaluated at any
// rho (nested convolutions stay accurate).
OperatorField m2_dualconv(const OperatorField& s, const OperatorField& t,
                          const DualConvOptions& o = {});

// ---- Heisenberg ----------------------------------------------------------
// theta(A1, A2, t1, t2) = (1 (x) tr)(W (A1 (x) A2) W*) for grid kernels,
// with (W f)(p1, p2) = f(p1 - t2/(t1+t2) p2, p1 + t1/(t1+t2) p2); the
// partial trace is a 1-D quadrature in the traced variable.
TruncatedOperator heis_theta(const KernelFunction& k1,
                             const KernelFunction& k2, double t1, double t2,
                             const BasisDescriptor& grid, int s_n = 64);

// |t| (S # T)_t = c * integral theta(|s| S_s, |t-s| T_{t-s}, s, t-s) ds.
// The constant c consistent with the Plancherel normalization
// d nu = |t| dt / 4 pi^2 works out to 1/(4 pi^2); it is kept as an option
// and the suite calibrates it empirically against the pointwise-product
// oracle instead of trusting either derivation.
OperatorField heis_dualconv(const OperatorField& s, const OperatorField& t,
                            const DualConvOptions& o = {});

// ---- twisted variants (M2-tilde, M2-K) ------------------------------------
// Section sigma: Gamma -> R_Gamma and the integer cocycle
// n(t1, t2) = sigma(t1) + sigma(t2) - sigma(t1 + t2).
struct TwistCocycle {
  std::function<double(double)> section;
  int n(double t1, double t2) const;
  static TwistCocycle standard();  // sigma(t) = {t}, n = [t1 + t2]
};

// (S # T)^(t) = sum/integral over t1 of M_[t - t1] (S^(t1) # T^({t - t1})):
// component-wise M(2) dual convolution followed by the M_n twist.  M2_K
// components pair by exact generator-coefficient arithmetic; M2_TILDE
// requires both fields on the same periodic t grid.
OperatorField twisted_dualconv(const OperatorField& s, const OperatorField& t,
                               const GroupId& id,
                               const TwistCocycle& c = TwistCocycle::standard(),
                               const DualConvOptions& o = {});

// ---- Grelaud ---------------------------------------------------------------
// b1 + b2 e^{-(a+i) mu} = r e^{-i phi} with phi normalized by 2 pi shifts so
// that b = r e^{a phi} lands in the fundamental domain [1, e^{2 pi a}).
struct SpiralPoint {
  double r;
  double phi;
  double b;
};
SpiralPoint grelaud_spiral(double b1, double b2, double mu, double a);

// d b / d mu along the spiral (the closed-form Jacobian).
double grelaud_spiral_jacobian(double b1, double b2, double mu, double a);

// theta(b) = ((2 pi)^2 / b) sum_{b(mu) = b} theta_0(mu) |db/dmu|^{-1} with
// the solutions taken from mu in [-M pi, M pi] (one per monotonic piece);
// inputs are line kernels, the output kernel is a callable branch sum.
ThetaResult grelaud_theta(const KernelFunction& k1, const KernelFunction& k2,
                          double b1, double b2, double b, double a,
                          int branch_window = 6);

}  // namespace ncfa
