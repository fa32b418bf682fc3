#pragma once

#include <functional>

#include "ncfa/field.hpp"
#include "ncfa/group.hpp"
#include "ncfa/rep.hpp"

namespace ncfa {

using GroupFunction = std::function<Complex(const GroupElement&)>;

// Which operator the transform attaches to each irrep:
//   VN  pi(f)
//   L2  [pi(f) K^{1/2}]   (Plancherel / Parseval side)
//   FA  [pi(f) K]         (Fourier-algebra side; inversion & b1 norms)
// For unimodular groups the three coincide.
enum class TransformKind { VN, L2, FA };

struct TransformOptions {
  RepOptions rep;
  DualWindow window;
  double group_L = 6.0;  // half-width of non-compact group-coordinate windows
  int group_n = 48;      // quadrature nodes per non-compact coordinate
  int angle_n = 24;      // nodes per compact angle coordinate
};

// Quadrature over a window of the group, with weights that already include
// the Haar density.  Shift coordinates are restricted to the model lattice
// of the representation bases.
struct GroupSampler {
  std::vector<GroupElement> points;
  std::vector<double> weights;
  double norm_sq(const GroupFunction& f) const;  // integral |f|^2 d g
  // fraction of the |f|^2 mass sitting in the outer shell of the window;
  // crude truncation-tail diagnostic
  double edge_fraction(const GroupFunction& f) const;
  std::vector<double> edge_flags;  // 1.0 for points near the window boundary
};

GroupSampler group_sampler(const GroupId& id, const TransformOptions& o);

// Group-side Fourier transform against the discretized Plancherel measure.
OperatorField fourier(const GroupId& id, const GroupFunction& f,
                      TransformKind kind, const TransformOptions& o);

// Pointwise inversion u(x) = sum/integral tr(pi(x)^* T_pi) d nu(pi);
// expects an FA-kind field (VN-kind for unimodular groups).
Complex inverse_A(const GroupId& id, const OperatorField& t,
                  const GroupElement& x);

// b1 norm of the FA transform.
double a_norm(const GroupId& id, const GroupFunction& f,
              const TransformOptions& o);

struct ParsevalReport {
  double lhs = 0.0;       // ||f||_2 by group quadrature
  double rhs = 0.0;       // b2 norm of the L2 transform
  double rel_err = 0.0;
  double group_tail = 0.0;  // edge fraction of |f|^2 on the group window
  double dual_tail = 0.0;   // edge fraction of the dual-side mass
};

ParsevalReport parseval_check(const GroupId& id, const GroupFunction& f,
                              const TransformOptions& o);

}  // namespace ncfa
