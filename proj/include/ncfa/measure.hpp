#pragma once

#include <functional>
#include <vector>

#include "ncfa/label.hpp"
#include "ncfa/quadrature.hpp"

namespace ncfa {

struct PlancherelAtom {
  IrrepLabel label;
  double weight;  // nu({pi})
};

// A continuum piece of the Plancherel measure: a chart parameter interval
// [lo, hi] with density w.r.t. the chart's Lebesgue measure, discretized by a
// quadrature rule in the chart parameter.  The nu-mass carried by node i is
// rule.weights[i] * density(rule.nodes[i]).
struct ContinuumComponent {
  double lo = 0.0, hi = 0.0;
  std::function<double(double)> density;
  std::function<IrrepLabel(double)> label_of;
  QuadratureRule rule;
  // Interior parameters where the field is only C^k (support-geometry
  // corners of dual convolutions); quadratures split panels here.
  std::vector<double> seams;

  double nu_mass(int i) const {
    return rule.weights[i] * density(rule.nodes[i]);
  }
  int size() const { return rule.size(); }
};

struct PlancherelMeasure {
  std::vector<PlancherelAtom> atoms;
  std::vector<ContinuumComponent> continuum;
};

// Discretization knobs for the dual-support windows.
struct DualWindow {
  int max_dim = 8;         // SU(2): dimensions 1..max_dim
  double param_lo = 0.25;  // continuum window in the chart parameter
  double param_hi = 6.0;
  int grid_n = 48;         // nodes per continuum piece
  int atom_window = 4;     // |coef| <= atom_window per generator (K factors)
  int t_n = 8;             // M2-tilde: twist nodes on [0,1)
};

// The Plancherel data of the catalog groups over the requested window.
PlancherelMeasure plancherel(const GroupId& id, const DualWindow& win);

}  // namespace ncfa
