#pragma once

#include "ncfa/error.hpp"
#include "ncfa/types.hpp"

namespace ncfa {

enum class BasisKind {
  Trig,    // exponentials chi_m, m = -N..N, on L^2(T, d psi / 2pi)
  Grid,    // nodal values on a weighted grid, <f,g> = sum w_i conj(f_i) g_i
  Weight,  // SU(2) weight basis of dimension d (diagonalizes the torus)
};

struct BasisDescriptor {
  BasisKind kind = BasisKind::Trig;
  int trunc_n = 0;      // Trig: window half-width N
  int dim = 0;          // Weight: dimension d
  RealVector nodes;     // Grid
  RealVector weights;   // Grid (inner-product weights)

  int size() const {
    switch (kind) {
      case BasisKind::Trig:
        return 2 * trunc_n + 1;
      case BasisKind::Grid:
        return static_cast<int>(nodes.size());
      case BasisKind::Weight:
        return dim;
    }
    return 0;
  }

  // Trig window: position <-> index
  int pos(int m) const { return m + trunc_n; }
  int index(int p) const { return p - trunc_n; }

  static BasisDescriptor trig(int n) {
    BasisDescriptor b;
    b.kind = BasisKind::Trig;
    b.trunc_n = n;
    return b;
  }
  static BasisDescriptor weight(int d) {
    BasisDescriptor b;
    b.kind = BasisKind::Weight;
    b.dim = d;
    return b;
  }
  static BasisDescriptor grid(RealVector nodes, RealVector weights) {
    if (nodes.size() != weights.size())
      throw InvalidOperandError("grid basis: nodes/weights size mismatch");
    BasisDescriptor b;
    b.kind = BasisKind::Grid;
    b.nodes = std::move(nodes);
    b.weights = std::move(weights);
    return b;
  }
  // Uniform grid on [-L, L] with n points (standard line-group model space).
  static BasisDescriptor uniform_grid(int n, double L) {
    RealVector nodes(n), w(n);
    double h = 2.0 * L / (n - 1);
    for (int i = 0; i < n; ++i) nodes[i] = -L + h * i;
    w.setConstant(h);
    return grid(std::move(nodes), std::move(w));
  }
  // Log grid psi = e^u, u uniform on [-L, L]; models L^2(R_+, d psi/psi).
  static BasisDescriptor log_grid(int n, double L) {
    RealVector nodes(n), w(n);
    double h = 2.0 * L / (n - 1);
    for (int i = 0; i < n; ++i) nodes[i] = std::exp(-L + h * i);
    w.setConstant(h);
    return grid(std::move(nodes), std::move(w));
  }

  bool compatible(const BasisDescriptor& o) const {
    if (kind != o.kind) return false;
    switch (kind) {
      case BasisKind::Trig:
        return trunc_n == o.trunc_n;
      case BasisKind::Weight:
        return dim == o.dim;
      case BasisKind::Grid:
        return nodes.size() == o.nodes.size() &&
               (nodes - o.nodes).cwiseAbs().maxCoeff() < 1e-12 &&
               (weights - o.weights).cwiseAbs().maxCoeff() < 1e-12;
    }
    return false;
  }

  // Uniform-grid spacing (throws for non-grid / non-uniform bases).
  double spacing() const {
    if (kind != BasisKind::Grid || nodes.size() < 2)
      throw UnsupportedOperationError("spacing: not a grid basis");
    return nodes[1] - nodes[0];
  }
};

}  // namespace ncfa
