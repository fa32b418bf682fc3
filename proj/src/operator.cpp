#include "ncfa/operator.hpp"

#include <cmath>

#include "ncfa/error.hpp"

namespace ncfa {

void validate(const TruncatedOperator& a) {
  if (a.entries.rows() != a.entries.cols())
    throw InvalidOperandError("operator block must be square");
  if (a.entries.rows() != a.basis.size())
    throw InvalidOperandError("operator block does not match basis size");
  if (!a.entries.allFinite())
    throw InvalidOperandError("operator block has non-finite entries");
}

namespace {

// B = W^{1/2} A W^{-1/2}: similar matrix whose Euclidean singular values are
// the weighted ones.
Matrix balanced(const TruncatedOperator& a) {
  if (a.basis.kind != BasisKind::Grid) return a.entries;
  const RealVector& w = a.basis.weights;
  RealVector s = w.cwiseSqrt();
  return s.asDiagonal() * a.entries * s.cwiseInverse().asDiagonal();
}

}  // namespace

TruncatedOperator adjoint(const TruncatedOperator& a) {
  validate(a);
  if (a.basis.kind != BasisKind::Grid)
    return {a.entries.adjoint(), a.basis};
  const RealVector& w = a.basis.weights;
  Matrix adj = w.cwiseInverse().asDiagonal() * a.entries.adjoint() *
               w.asDiagonal();
  return {adj, a.basis};
}

RealVector singular_values(const TruncatedOperator& a) {
  validate(a);
  Matrix b = balanced(a);
  Eigen::SelfAdjointEigenSolver<Matrix> es(b.adjoint() * b);
  RealVector ev = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  return ev.reverse();
}

double op_norm(const TruncatedOperator& a, OperatorNorm which) {
  RealVector sv = singular_values(a);
  switch (which) {
    case OperatorNorm::Op:
      return sv.size() ? sv[0] : 0.0;
    case OperatorNorm::HilbertSchmidt:
      return std::sqrt(sv.squaredNorm());
    case OperatorNorm::Trace:
      return sv.sum();
  }
  return 0.0;
}

Complex op_trace(const TruncatedOperator& a) {
  validate(a);
  return a.entries.trace();
}

TruncatedOperator compose(const TruncatedOperator& a,
                          const TruncatedOperator& b) {
  validate(a);
  validate(b);
  if (!a.basis.compatible(b.basis))
    throw InvalidOperandError("compose: incompatible bases");
  return {a.entries * b.entries, a.basis};
}

TruncatedOperator embed_window(const TruncatedOperator& a, int n2) {
  validate(a);
  if (a.basis.kind != BasisKind::Trig)
    throw UnsupportedOperationError("embed_window: trig bases only");
  int n1 = a.basis.trunc_n;
  if (n2 < n1) throw InvalidOperandError("embed_window: window must grow");
  TruncatedOperator out = TruncatedOperator::zero(BasisDescriptor::trig(n2));
  out.entries.block(n2 - n1, n2 - n1, a.size(), a.size()) = a.entries;
  return out;
}

TruncatedOperator mn_twist(const TruncatedOperator& a, int n, double tol) {
  validate(a);
  if (a.basis.kind != BasisKind::Trig)
    throw UnsupportedOperationError("mn_twist: trig bases only");
  if (n == 0) return a;
  int N = a.basis.trunc_n, sz = a.size();
  double scale = a.entries.cwiseAbs().maxCoeff();
  TruncatedOperator out = TruncatedOperator::zero(a.basis);
  double dropped = 0.0;
  for (int p = 0; p < sz; ++p)
    for (int q = 0; q < sz; ++q) {
      Complex v = a.entries(p, q);
      if (v == Complex{}) continue;
      int m = a.basis.index(p) + n, k = a.basis.index(q) + n;
      if (std::abs(m) <= N && std::abs(k) <= N)
        out.at(m, k) = v;
      else
        dropped = std::max(dropped, std::abs(v));
    }
  if (dropped > tol * (scale > 0 ? scale : 1.0))
    throw TruncationOverflowError(
        "mn_twist: shifted coefficients exceed the truncation window");
  return out;
}

}  // namespace ncfa
