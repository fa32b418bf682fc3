#include "ncfa/kernel.hpp"

#include <cmath>

#include "ncfa/error.hpp"

namespace ncfa {

Complex KernelFunction::eval(double x, double y) const {
  switch (backing) {
    case Backing::TrigCoeffs: {
      // k = sum_m chi_m(x) [sum_n c_{mn} conj(chi_n(y))]
      Complex acc = 0.0;
      int N = trunc_n;
      for (int m = -N; m <= N; ++m) {
        Complex row = 0.0;
        for (int n = -N; n <= N; ++n)
          row += coeffs(m + N, n + N) *
                 std::exp(Complex(0.0, -static_cast<double>(n) * y));
        acc += row * std::exp(Complex(0.0, static_cast<double>(m) * x));
      }
      return acc;
    }
    case Backing::GridSamples: {
      auto locate = [&](double v, int& i0, double& s) {
        int n = static_cast<int>(nodes.size());
        double h = nodes[1] - nodes[0];
        double u = (v - nodes[0]) / h;
        if (u <= 0.0 || u >= n - 1) {
          i0 = -1;
          return;
        }
        i0 = static_cast<int>(std::floor(u));
        s = u - i0;
      };
      int i0 = -1, j0 = -1;
      double sx = 0.0, sy = 0.0;
      locate(x, i0, sx);
      locate(y, j0, sy);
      if (i0 < 0 || j0 < 0) return 0.0;
      return (1 - sx) * (1 - sy) * samples(i0, j0) +
             sx * (1 - sy) * samples(i0 + 1, j0) +
             (1 - sx) * sy * samples(i0, j0 + 1) +
             sx * sy * samples(i0 + 1, j0 + 1);
    }
    case Backing::Callable:
      return fn(x, y);
  }
  return 0.0;
}

KernelFunction KernelFunction::from_trig(const TruncatedOperator& a) {
  validate(a);
  if (a.basis.kind != BasisKind::Trig)
    throw UnsupportedOperationError("from_trig: trig basis required");
  KernelFunction k;
  k.domain = Domain::Circle;
  k.backing = Backing::TrigCoeffs;
  k.coeffs = a.entries;
  k.trunc_n = a.basis.trunc_n;
  return k;
}

KernelFunction KernelFunction::from_grid(const TruncatedOperator& a) {
  validate(a);
  if (a.basis.kind != BasisKind::Grid)
    throw UnsupportedOperationError("from_grid: grid basis required");
  KernelFunction k;
  k.domain = Domain::Line;
  k.backing = Backing::GridSamples;
  k.nodes = a.basis.nodes;
  k.weights = a.basis.weights;
  // A f (x_i) = sum_j k(x_i, x_j) w_j f(x_j)
  k.samples = a.entries * a.basis.weights.cwiseInverse().asDiagonal();
  return k;
}

KernelFunction KernelFunction::callable(
    std::function<Complex(double, double)> f, Domain d, double lo,
    double hi) {
  KernelFunction k;
  k.domain = d;
  k.backing = Backing::Callable;
  k.fn = std::move(f);
  k.lo = lo;
  k.hi = hi;
  return k;
}

TruncatedOperator KernelFunction::to_operator(
    const BasisDescriptor& b) const {
  if (b.kind == BasisKind::Trig) {
    if (backing != Backing::TrigCoeffs)
      throw UnsupportedOperationError(
          "to_operator: trig target needs trig coefficients");
    if (b.trunc_n < trunc_n)
      throw TruncationOverflowError("to_operator: target window too small");
    TruncatedOperator base{coeffs, BasisDescriptor::trig(trunc_n)};
    return embed_window(base, b.trunc_n);
  }
  if (b.kind != BasisKind::Grid)
    throw UnsupportedOperationError("to_operator: unsupported target basis");
  int n = b.size();
  TruncatedOperator out = TruncatedOperator::zero(b);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      out.entries(i, j) = eval(b.nodes[i], b.nodes[j]) * b.weights[j];
  return out;
}

namespace {

QuadratureRule norm_rule(const KernelFunction& k, int n) {
  switch (k.backing) {
    case KernelFunction::Backing::TrigCoeffs:
      return periodic_trapezoid(n, 0.0, kTwoPi);
    case KernelFunction::Backing::GridSamples:
      return uniform_lattice(static_cast<int>(k.nodes.size()), k.nodes[0],
                             k.nodes[k.nodes.size() - 1]);
    case KernelFunction::Backing::Callable:
      return k.domain == KernelFunction::Domain::Circle
                 ? periodic_trapezoid(n, 0.0, kTwoPi)
                 : gauss_legendre(n, k.lo, k.hi);
  }
  return periodic_trapezoid(n, 0.0, kTwoPi);
}

}  // namespace

double KernelFunction::l1_norm(int n) const {
  QuadratureRule r = norm_rule(*this, n);
  double acc = 0.0;
  for (int i = 0; i < r.size(); ++i)
    for (int j = 0; j < r.size(); ++j)
      acc += r.weights[i] * r.weights[j] *
             std::abs(eval(r.nodes[i], r.nodes[j]));
  if (domain == Domain::Circle) acc /= kFourPiSq;
  return acc;
}

Complex KernelFunction::diagonal_integral(int n) const {
  QuadratureRule r = norm_rule(*this, n);
  Complex acc = 0.0;
  for (int i = 0; i < r.size(); ++i)
    acc += r.weights[i] * eval(r.nodes[i], r.nodes[i]);
  if (domain == Domain::Circle) acc /= kTwoPi;
  return acc;
}

}  // namespace ncfa
