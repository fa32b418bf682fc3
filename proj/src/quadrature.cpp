#include "ncfa/quadrature.hpp"

#include <cmath>

#include "ncfa/error.hpp"

namespace ncfa {

QuadratureRule gauss_legendre(int n, double a, double b) {
  if (n < 1) throw InvalidOperandError("gauss_legendre: n must be >= 1");
  // Jacobi matrix for Legendre polynomials; eigenvalues are the nodes on
  // [-1,1], weights 2 * v0^2 (Golub-Welsch).
  RealMatrix J = RealMatrix::Zero(n, n);
  for (int k = 1; k < n; ++k) {
    double beta = k / std::sqrt(4.0 * k * k - 1.0);
    J(k, k - 1) = beta;
    J(k - 1, k) = beta;
  }
  Eigen::SelfAdjointEigenSolver<RealMatrix> es(J);
  QuadratureRule r;
  r.nodes.resize(n);
  r.weights.resize(n);
  const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
  for (int i = 0; i < n; ++i) {
    r.nodes[i] = mid + half * es.eigenvalues()[i];
    double v0 = es.eigenvectors()(0, i);
    r.weights[i] = 2.0 * v0 * v0 * half;
  }
  return r;
}

QuadratureRule periodic_trapezoid(int n, double a, double b) {
  if (n < 1) throw InvalidOperandError("periodic_trapezoid: n must be >= 1");
  QuadratureRule r;
  r.nodes.resize(n);
  r.weights.setConstant(n, (b - a) / n);
  for (int i = 0; i < n; ++i) r.nodes[i] = a + (b - a) * i / n;
  return r;
}

QuadratureRule uniform_lattice(int n, double a, double b) {
  if (n < 2) throw InvalidOperandError("uniform_lattice: n must be >= 2");
  QuadratureRule r;
  r.nodes.resize(n);
  double h = (b - a) / (n - 1);
  r.weights.setConstant(n, h);
  for (int i = 0; i < n; ++i) r.nodes[i] = a + h * i;
  return r;
}

double bk_kernel(double rho1, double rho2, double rho) {
  // 2 / (pi sqrt(4 r1^2 r2^2 - (r^2 - r1^2 - r2^2)^2)); the discriminant
  // factors as the product of the four triangle-inequality terms.
  double d = (rho1 + rho2 + rho) * (-rho + rho1 + rho2) * (rho - rho1 + rho2) *
             (rho + rho1 - rho2);
  if (d <= 0.0)
    throw InvalidOperandError("bk_kernel: rho outside (|rho1-rho2|, rho1+rho2)");
  return 2.0 / (kPi * std::sqrt(d));
}

TriangleAngles triangle_close(double rho1, double rho2, double mu) {
  double c = std::cos(mu), s = std::sin(mu);
  double rho = std::hypot(rho1 + rho2 * c, rho2 * s);
  if (rho < 1e-12 * (rho1 + rho2))
    throw DegenerateGeometryError("triangle_close: degenerate closing side");
  // law of cosines at the rho1 corner; clamp for roundoff
  double arg = (rho * rho + rho1 * rho1 - rho2 * rho2) / (2.0 * rho * rho1);
  arg = std::min(1.0, std::max(-1.0, arg));
  return {rho, std::acos(arg)};
}

MuSubstitutedRule mu_substituted_rule(double rho1, double rho2, int n) {
  if (rho1 <= 0.0 || rho2 <= 0.0)
    throw InvalidOperandError("mu_substituted_rule: radii must be positive");
  auto gl = gauss_legendre(n, 0.0, kPi);
  MuSubstitutedRule out;
  out.mu.resize(n);
  out.phi.resize(n);
  out.rule.nodes.resize(n);
  out.rule.weights.resize(n);
  for (int i = 0; i < n; ++i) {
    double mu = gl.nodes[i];
    auto tc = triangle_close(rho1, rho2, mu);
    out.mu[i] = mu;
    out.phi[i] = tc.phi;
    out.rule.nodes[i] = tc.rho;
    out.rule.weights[i] = gl.weights[i] / kTwoPi;
  }
  return out;
}

}  // namespace ncfa
