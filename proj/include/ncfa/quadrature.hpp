#pragma once

#include <functional>

#include "ncfa/types.hpp"

namespace ncfa {

// A one-dimensional rule: integral f(x) dm(x) ~ sum_i w_i f(x_i).
struct QuadratureRule {
  RealVector nodes;
  RealVector weights;

  int size() const { return static_cast<int>(nodes.size()); }

  template <class F>
  auto integrate(F&& f) const {
    using R = decltype(f(0.0) * 1.0);
    R acc = R{};
    for (int i = 0; i < size(); ++i) acc += weights[i] * f(nodes[i]);
    return acc;
  }
};

// Gauss-Legendre on [a, b] via the Golub-Welsch Jacobi matrix.
QuadratureRule gauss_legendre(int n, double a, double b);

// n equispaced nodes on [a, b) with equal weights (b-a)/n; spectrally
// accurate for smooth (b-a)-periodic integrands.
QuadratureRule periodic_trapezoid(int n, double a, double b);

// Uniform lattice a, a+h, ..., b with weight h per node (left-closed,
// right-closed); used for line-group grids.
QuadratureRule uniform_lattice(int n, double a, double b);

// Bessel-Kingman triangle kernel: density of the "random triangle side"
// measure, positive iff |r1 - r2| < r < r1 + r2.
double bk_kernel(double rho1, double rho2, double rho);

// Angle map of the planar triangle: given side lengths rho1, rho2 and the
// angle mu between them, the closing side rho(mu) = |rho1 + rho2 e^{i mu}|
// and the angle phi(mu) at the rho1 corner (principal values, phi in [0,pi]).
struct TriangleAngles {
  double rho;
  double phi;
};
TriangleAngles triangle_close(double rho1, double rho2, double mu);

// Substituted rule for the measure (1/2) K(rho1, rho2, rho) rho d rho on
// rho in (|rho1 - rho2|, rho1 + rho2): Gauss nodes mu_i in (0, pi) mapped
// through rho(mu), weights (1/2pi) w_i.  Total mass is 1/2.  The companion
// arrays mu and phi expose the substitution for integrands that need them.
struct MuSubstitutedRule {
  RealVector mu;
  RealVector phi;
  QuadratureRule rule;  // nodes = rho(mu_i), weights = (1/2pi) w_i
};
MuSubstitutedRule mu_substituted_rule(double rho1, double rho2, int n);

}  // namespace ncfa
