#pragma once

#include "ncfa/basis.hpp"
#include "ncfa/types.hpp"

namespace ncfa {

enum class OperatorNorm { Op, HilbertSchmidt, Trace };

// A finite matrix block together with the basis it is expressed in.  For
// grid bases the matrix acts on nodal values and all norms/adjoints are
// taken with respect to the weighted inner product of the basis.
struct TruncatedOperator {
  Matrix entries;
  BasisDescriptor basis;

  int size() const { return static_cast<int>(entries.rows()); }

  // Trig-window accessor by two-sided index
  Complex& at(int m, int n) { return entries(basis.pos(m), basis.pos(n)); }
  Complex at(int m, int n) const {
    return entries(basis.pos(m), basis.pos(n));
  }

  static TruncatedOperator zero(const BasisDescriptor& b) {
    return {Matrix::Zero(b.size(), b.size()), b};
  }
  static TruncatedOperator identity(const BasisDescriptor& b) {
    return {Matrix::Identity(b.size(), b.size()), b};
  }
};

// Validates shape/finiteness; throws InvalidOperandError.
void validate(const TruncatedOperator& a);

// Adjoint with respect to the basis inner product (W^{-1} A^H W on grids).
TruncatedOperator adjoint(const TruncatedOperator& a);

// Singular values (descending) w.r.t. the weighted inner product, computed
// from the Hermitian eigendecomposition of A*A with eigenvalues clamped at 0.
RealVector singular_values(const TruncatedOperator& a);

double op_norm(const TruncatedOperator& a, OperatorNorm which);
Complex op_trace(const TruncatedOperator& a);

TruncatedOperator compose(const TruncatedOperator& a,
                          const TruncatedOperator& b);

// Grow a trig window to half-width n2 >= N, zero-padding new coefficients.
TruncatedOperator embed_window(const TruncatedOperator& a, int n2);

// Conjugation by the modulation chi_n: entries shift by n along both
// indices.  The window is kept fixed; if any relative coefficient mass
// above tol would leave the window, TruncationOverflowError is thrown
// (enlarge with embed_window first).  Exact trace/norm preservation holds
// whenever no mass is dropped.
TruncatedOperator mn_twist(const TruncatedOperator& a, int n,
                           double tol = 1e-12);

}  // namespace ncfa
