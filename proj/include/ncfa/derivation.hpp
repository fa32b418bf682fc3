#pragma once

#include <vector>

#include "ncfa/dualconv.hpp"
#include "ncfa/field.hpp"
#include "ncfa/group.hpp"
#include "ncfa/rep.hpp"
#include "ncfa/transform.hpp"

namespace ncfa {

enum class DerivationSide { Left, Right };

// Point derivation d = lim_{s->0} (delta_{exp(-sX)} - delta_e)/s along a
// cataloged direction.  side = Left gives D(f) = f * d (directional
// derivative along right translates), side = Right gives d * f and is
// supported for SU2 only.
struct DerivationDirection {
  Direction dir;
  DerivationSide side = DerivationSide::Left;
};

// pi(d) = d/ds pi(exp(-s X))|_0 on the given basis.  Diagonal for
// SU2 (weight basis) / ax+b / Heisenberg (scalar -it) / Grelaud grids,
// tridiagonal for the M(2) family (multiplication by -i rho cos(psi - delta)
// couples n to n +- 1 in the trig basis), zero on characters.
TruncatedOperator pi_d(const GroupId& id, const IrrepLabel& l,
                       const DerivationDirection& d, const BasisDescriptor& b);

struct DhatResult {
  OperatorField field;
  // Relative coefficient mass zeroed at trig-window edges (tridiagonal
  // composition is unreliable in the outermost column/row); 0 elsewhere.
  double edge_defect = 0.0;
};

// Fourier side of the derivation: componentwise T_pi o pi(d)
// (pi(d) o T_pi for side = Right).  Linear; evaluator closures compose.
DhatResult dhat(const GroupId& id, const OperatorField& t,
                const DerivationDirection& d);

struct LeibnizReport {
  double max_abs_err = 0.0;
  double max_rel_err = 0.0;  // relative to the largest sampled |rhs|
  double scale = 0.0;
  int samples = 0;
};

// Central finite difference of (u v)(x exp(sX)) at s = 0 against
// u(x) Dv(x) + Du(x) v(x), Du = inverse_A(dhat(S)), at each sample point.
LeibnizReport leibniz_check(const GroupId& id, const OperatorField& s,
                            const OperatorField& t,
                            const DerivationDirection& d,
                            const std::vector<GroupElement>& xs,
                            double h = 1e-4);

struct BoundReport {
  double sup_ratio = 0.0;
  double bound = 0.0;    // cited constant: 1/2 (SU2), 2 pi (ax+b, Heis-K)
  int witness = -1;      // index of the extremal trial field
  double edge_defect = 0.0;
};

// sup over trial fields of ||dhat(T)||_vn_sup / ||f||_A where the trials are
// VN-kind fields (the A-norm divides out the Duflo-Moore factor on ax+b).
// Groups without a bounded claim are rejected.
BoundReport derivation_bound(const GroupId& id, const DerivationDirection& d,
                             const std::vector<OperatorField>& trials);

struct GrowthReport {
  std::vector<double> widths;
  std::vector<double> ratios;
  double slope = 0.0;  // least-squares log(ratio) vs log(1/width)
};

// Narrow-bump witness of unboundedness: fields of width eps concentrated at
// chart parameter param0 give vn_sup/b1 ratios ~ C/eps for the unbounded
// groups.  SU2 is accepted as a control (single-atom "bumps" of dimension
// ~ 1/eps; ratios stay below 1/2).
GrowthReport unboundedness_witness(const GroupId& id,
                                   const DerivationDirection& d,
                                   const std::vector<double>& widths,
                                   double param0 = 2.0,
                                   const RepOptions& ro = RepOptions{});

enum class ModuleVariant { W0, Wbar, Wtilde, W };

// Weighted module spaces over the positive dual axis.  For the M(2) family
// the component values are read as kernels on T^2 (normalized Haar);
// for HEIS the space is L^1(R, dt, compacts) in the operator norm and only
// variant W is meaningful.
struct ModuleSpaceSpec {
  ModuleVariant variant = ModuleVariant::Wbar;
  std::function<double(double)> weight;  // default rho / (1 + rho^2)
  GroupTag group = GroupTag::M2;
};

// Checks the weight invariants w(rho) <= rho and rho/w(rho) bounded on
// bounded intervals (sampled); throws InvalidWeightError.
void validate(const ModuleSpaceSpec& spec);

struct ModuleNormResult {
  double value = 0.0;  // the norm (W0/Wbar/Wtilde); lower estimate for W
  double lower = 0.0;  // W bracket
  double upper = 0.0;
};

ModuleNormResult module_norm(const OperatorField& t,
                             const ModuleSpaceSpec& spec,
                             const DualConvOptions& o = DualConvOptions{});

struct ModuleMembershipReport {
  bool pass = false;
  double max_ratio = 0.0;  // ||s # T'||_Wbar / (||s||_b1 * int ||T'_rho||_1)
  double rhs = 0.0;        // int ||T'_rho||_1 d rho
  double edge_defect = 0.0;
};

// Verifies the module bound ||s # T'||_Wbar <= ||s||_b1 int ||T'_rho||_1 drho
// for T' = dhat(T) over an internal family of bounded-support test fields s.
ModuleMembershipReport module_membership(const OperatorField& t,
                                         const ModuleSpaceSpec& spec,
                                         const DerivationDirection& d,
                                         const DualConvOptions& o =
                                             DualConvOptions{});

}  // namespace ncfa
