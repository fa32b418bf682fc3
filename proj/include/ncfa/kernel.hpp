#pragma once

#include <functional>

#include "ncfa/operator.hpp"
#include "ncfa/quadrature.hpp"
#include "ncfa/types.hpp"

namespace ncfa {

// Integral kernel k(x, y) of a truncated operator, in one of three
// backings:
//  - trig coefficients on the circle:  k = sum c_{mn} chi_m(x) conj(chi_n(y))
//  - nodal samples on a grid (bilinear interpolation off the nodes)
//  - an exact callable (used when closed-form kernels are available)
// Circle kernels use normalized measure d psi / 2pi throughout; line kernels
// use Lebesgue measure restricted to the window.
struct KernelFunction {
  enum class Domain { Circle, Line };
  enum class Backing { TrigCoeffs, GridSamples, Callable };

  Domain domain = Domain::Circle;
  Backing backing = Backing::TrigCoeffs;

  Matrix coeffs;        // TrigCoeffs: (2N+1)^2, c(m,n) at (m+N, n+N)
  int trunc_n = 0;

  Matrix samples;       // GridSamples: k(x_i, y_j)
  RealVector nodes;
  RealVector weights;   // quadrature weights of the sampling grid

  std::function<Complex(double, double)> fn;  // Callable
  double lo = 0.0, hi = 0.0;                  // Callable window (Line)

  Complex eval(double x, double y) const;

  static KernelFunction from_trig(const TruncatedOperator& a);
  static KernelFunction from_grid(const TruncatedOperator& a);
  static KernelFunction callable(std::function<Complex(double, double)> f,
                                 Domain d, double lo = 0.0, double hi = 0.0);

  // Sample onto an operator block (Trig basis only from TrigCoeffs; Grid
  // basis from any backing: A_ij = k(x_i, x_j) w_j).
  TruncatedOperator to_operator(const BasisDescriptor& b) const;

  // L^1 double-integral norm (normalized on the circle), by tensor
  // quadrature with n points per axis.
  double l1_norm(int n = 128) const;
  // Diagonal integral (= operator trace for the associated operator).
  Complex diagonal_integral(int n = 128) const;
};

}  // namespace ncfa
