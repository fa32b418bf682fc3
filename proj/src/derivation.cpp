#include "ncfa/derivation.hpp"

#include <algorithm>
#include <cmath>

#include "ncfa/error.hpp"
#include "ncfa/kernel.hpp"

namespace ncfa {

namespace {

void check_side(const GroupId& id, const DerivationDirection& d) {
  if (d.side == DerivationSide::Right && id.tag != GroupTag::SU2)
    throw UnsupportedDirectionError(
        "right-invariant derivations are cataloged for SU2 only");
}

// T o pi(d) (left) / pi(d) o T (right), with the unreliable outermost
// trig-window line zeroed; accumulates the zeroed relative mass into
// *defect when given.
TruncatedOperator apply_pi_d(const GroupId& id, const IrrepLabel& l,
                             const DerivationDirection& d,
                             const TruncatedOperator& v, double* defect) {
  TruncatedOperator pd = pi_d(id, l, d, v.basis);
  TruncatedOperator out = d.side == DerivationSide::Left ? compose(v, pd)
                                                         : compose(pd, v);
  if (v.basis.kind == BasisKind::Trig && v.basis.trunc_n > 0) {
    // The tridiagonal pi(d) couples the edge coefficients +-N to the
    // missing +-(N+1) line of T; the corresponding line of the product
    // cannot be completed within the window.
    int n = out.size();
    double tot = out.entries.norm();
    double cut;
    if (d.side == DerivationSide::Left) {
      cut = std::sqrt(out.entries.col(0).squaredNorm() +
                      out.entries.col(n - 1).squaredNorm());
      out.entries.col(0).setZero();
      out.entries.col(n - 1).setZero();
    } else {
      cut = std::sqrt(out.entries.row(0).squaredNorm() +
                      out.entries.row(n - 1).squaredNorm());
      out.entries.row(0).setZero();
      out.entries.row(n - 1).setZero();
    }
    if (defect != nullptr && tot > 0.0)
      *defect = std::max(*defect, cut / tot);
  }
  return out;
}

}  // namespace

TruncatedOperator pi_d(const GroupId& id, const IrrepLabel& l,
                       const DerivationDirection& d,
                       const BasisDescriptor& b) {
  check_side(id, d);
  const Complex I(0.0, 1.0);
  switch (l.kind) {
    case IrrepLabel::Kind::Su2Dim: {
      if (b.kind != BasisKind::Weight || b.dim != l.dim)
        throw InvalidOperandError("pi_d: weight basis of matching dim");
      // pi(d) = d/ds pi(exp(-sX))|_0 = -dpi(X)
      TruncatedOperator out = su2_dpi(l.dim, (-d.dir.su2_x).eval());
      out.basis = b;
      return out;
    }
    case IrrepLabel::Kind::AxbSign: {
      if (b.kind != BasisKind::Grid)
        throw InvalidOperandError("pi_d: grid basis required");
      TruncatedOperator out = TruncatedOperator::zero(b);
      for (int i = 0; i < b.size(); ++i)
        out.entries(i, i) = -I * static_cast<double>(l.sign) * d.dir.vec[0] *
                            b.nodes[i];
      return out;
    }
    case IrrepLabel::Kind::HeisT: {
      if (!d.dir.central)
        throw UnsupportedDirectionError(
            "pi_d: heisenberg supports the central direction only");
      if (b.kind != BasisKind::Grid)
        throw InvalidOperandError("pi_d: grid basis required");
      TruncatedOperator out = TruncatedOperator::identity(b);
      out.entries *= -I * l.t;
      return out;
    }
    case IrrepLabel::Kind::GrelaudB: {
      if (b.kind != BasisKind::Grid)
        throw InvalidOperandError("pi_d: grid basis required");
      double a = id.params.a;
      TruncatedOperator out = TruncatedOperator::zero(b);
      for (int i = 0; i < b.size(); ++i) {
        double psi = b.nodes[i];
        out.entries(i, i) = -I * l.b * std::exp(-a * psi) *
                            (d.dir.vec[0] * std::cos(psi) +
                             d.dir.vec[1] * std::sin(psi));
      }
      return out;
    }
    case IrrepLabel::Kind::M2Rho:
    case IrrepLabel::Kind::TRho: {
      if (b.kind != BasisKind::Trig)
        throw InvalidOperandError("pi_d: trig basis required");
      // Multiplication by -i rho |v| cos(psi - delta): couples n -> n +- 1.
      double r = d.dir.vec.norm();
      double phi = r > 0.0 ? std::atan2(d.dir.vec[1], d.dir.vec[0]) : 0.0;
      Complex up = -I * 0.5 * l.rho * r * std::exp(-I * phi);    // (n+1, n)
      Complex down = -I * 0.5 * l.rho * r * std::exp(I * phi);   // (n-1, n)
      int N = b.trunc_n;
      TruncatedOperator out = TruncatedOperator::zero(b);
      for (int n = -N; n <= N; ++n) {
        if (n + 1 <= N) out.at(n + 1, n) = up;
        if (n - 1 >= -N) out.at(n - 1, n) = down;
      }
      return out;
    }
    case IrrepLabel::Kind::CharN:
    case IrrepLabel::Kind::PlanarChar:
      // Characters are constant along the cataloged directions.
      return TruncatedOperator::zero(b);
  }
  throw UnsupportedDirectionError("pi_d: unknown label kind");
}

DhatResult dhat(const GroupId& id, const OperatorField& t,
                const DerivationDirection& d) {
  check_side(id, d);
  DhatResult r;
  r.field.group = t.group;
  for (const FieldAtom& a : t.atoms) {
    FieldAtom a2 = a;
    a2.value = apply_pi_d(id, a.label, d, a.value, &r.edge_defect);
    r.field.atoms.push_back(std::move(a2));
  }
  for (const FieldComponent& c : t.components) {
    FieldComponent c2;
    c2.measure = c.measure;
    c2.values.reserve(c.values.size());
    for (int i = 0; i < c.measure.size(); ++i)
      c2.values.push_back(apply_pi_d(id,
                                     c.measure.label_of(c.measure.rule.nodes[i]),
                                     d, c.values[i], &r.edge_defect));
    c2.evaluator = [id, d, src = c](double p) {
      return apply_pi_d(id, src.measure.label_of(p), d, src.eval(p), nullptr);
    };
    r.field.components.push_back(std::move(c2));
  }
  return r;
}

LeibnizReport leibniz_check(const GroupId& id, const OperatorField& s,
                            const OperatorField& t,
                            const DerivationDirection& d,
                            const std::vector<GroupElement>& xs, double h) {
  check_side(id, d);
  OperatorField ds = dhat(id, s, d).field;
  OperatorField dt = dhat(id, t, d).field;
  LeibnizReport rep;
  rep.samples = static_cast<int>(xs.size());
  for (const GroupElement& x : xs) {
    auto shifted = [&](double step) {
      GroupElement e = exp_direction(id, d.dir, step);
      return d.side == DerivationSide::Left ? multiply(id, x, e)
                                            : multiply(id, e, x);
    };
    auto uv = [&](const GroupElement& g) {
      return inverse_A(id, s, g) * inverse_A(id, t, g);
    };
    Complex lhs = (uv(shifted(h)) - uv(shifted(-h))) / (2.0 * h);
    Complex rhs = inverse_A(id, s, x) * inverse_A(id, dt, x) +
                  inverse_A(id, ds, x) * inverse_A(id, t, x);
    rep.max_abs_err = std::max(rep.max_abs_err, std::abs(lhs - rhs));
    rep.scale = std::max({rep.scale, std::abs(lhs), std::abs(rhs)});
  }
  rep.max_rel_err = rep.max_abs_err / std::max(rep.scale, 1e-14);
  return rep;
}

namespace {

// A-norm of a VN-kind field: b1 norm after restoring the Duflo-Moore
// factor (a no-op on unimodular groups).
double fa_b1_norm(const GroupId& id, const OperatorField& t) {
  OperatorField fa = map_field(
      t, [&id](const IrrepLabel& l, const TruncatedOperator& v) {
        TruncatedOperator out = v;
        out.entries = v.entries *
                      duflo_moore_diag(id, l, v.basis).asDiagonal();
        return out;
      });
  return field_norm(fa, FieldNorm::B1);
}

}  // namespace

BoundReport derivation_bound(const GroupId& id, const DerivationDirection& d,
                             const std::vector<OperatorField>& trials) {
  check_side(id, d);
  BoundReport rep;
  switch (id.tag) {
    case GroupTag::SU2:
      rep.bound = 0.5;
      break;
    case GroupTag::AXB:
    case GroupTag::HEIS_K:
      rep.bound = kTwoPi;
      break;
    default:
      throw UnsupportedOperationError(
          "derivation_bound: no bounded claim for this group");
  }
  for (int i = 0; i < static_cast<int>(trials.size()); ++i) {
    DhatResult dh = dhat(id, trials[i], d);
    double den = fa_b1_norm(id, trials[i]);
    if (den <= 0.0) continue;
    double ratio = field_norm(dh.field, FieldNorm::VNSup) / den;
    rep.edge_defect = std::max(rep.edge_defect, dh.edge_defect);
    if (ratio > rep.sup_ratio) {
      rep.sup_ratio = ratio;
      rep.witness = i;
    }
  }
  return rep;
}

namespace {

// Rank-one grid operator with a fixed Gaussian profile (kernel columns
// carry the basis weights, matching the to_operator convention).
TruncatedOperator gauss_rank_one(const BasisDescriptor& b) {
  Vector f(b.size());
  for (int i = 0; i < b.size(); ++i)
    f[i] = std::exp(-0.5 * b.nodes[i] * b.nodes[i]);
  TruncatedOperator out = TruncatedOperator::zero(b);
  out.entries = (f * f.adjoint()) * b.weights.asDiagonal();
  return out;
}

// Single narrow-bump field of width eps at chart parameter p0 with a
// constant operator profile.
OperatorField bump_field(const GroupId& id, double p0, double eps,
                         const RepOptions& ro) {
  OperatorField f;
  f.group = id;
  FieldComponent c;
  c.measure.lo = p0 - 0.5 * eps;
  c.measure.hi = p0 + 0.5 * eps;
  c.measure.rule = gauss_legendre(8, c.measure.lo, c.measure.hi);
  TruncatedOperator v;
  switch (id.tag) {
    case GroupTag::HEIS: {
      c.measure.density = [](double t) { return std::abs(t) / kFourPiSq; };
      c.measure.label_of = [](double t) { return heis_label(t); };
      v = gauss_rank_one(model_basis(id, heis_label(p0), ro));
      break;
    }
    case GroupTag::M2:
      c.measure.density = [](double rho) { return rho; };
      c.measure.label_of = [](double rho) { return m2_label(rho); };
      v = TruncatedOperator::zero(BasisDescriptor::trig(ro.trunc_n));
      v.at(0, 0) = 1.0;
      break;
    case GroupTag::M2_TILDE:
      // Witness restricted to the t = 0 twist sector.
      c.measure.density = [](double rho) { return rho; };
      c.measure.label_of = [](double rho) { return m2_tilde_label(0.0, rho); };
      v = TruncatedOperator::zero(BasisDescriptor::trig(ro.trunc_n));
      v.at(0, 0) = 1.0;
      break;
    case GroupTag::M2_K: {
      IntVector z = IntVector::Zero(
          static_cast<Eigen::Index>(id.params.gamma.size()));
      c.measure.density = [](double rho) { return rho; };
      c.measure.label_of = [id, z](double rho) {
        return m2_k_label(id, z, rho);
      };
      v = TruncatedOperator::zero(BasisDescriptor::trig(ro.trunc_n));
      v.at(0, 0) = 1.0;
      break;
    }
    case GroupTag::GRELAUD:
      c.measure.density = [](double b) { return b / kFourPiSq; };
      c.measure.label_of = [](double b) { return grelaud_label(b); };
      v = gauss_rank_one(model_basis(id, grelaud_label(p0), ro));
      break;
    default:
      throw UnsupportedOperationError(
          "unboundedness_witness: group has a bounded derivation");
  }
  c.values.assign(c.measure.size(), v);
  c.evaluator = [v](double) { return v; };
  f.components.push_back(std::move(c));
  return f;
}

}  // namespace

GrowthReport unboundedness_witness(const GroupId& id,
                                   const DerivationDirection& d,
                                   const std::vector<double>& widths,
                                   double param0, const RepOptions& ro) {
  check_side(id, d);
  GrowthReport g;
  g.widths = widths;
  for (double eps : widths) {
    OperatorField T;
    if (id.tag == GroupTag::SU2) {
      // Control: a discrete dual has no narrow bumps; concentrate on a
      // single atom of dimension ~ 1/eps instead.
      int dim = std::max(2, static_cast<int>(std::lround(2.0 / eps)));
      TruncatedOperator v =
          TruncatedOperator::zero(BasisDescriptor::weight(dim));
      v.entries(0, 0) = 1.0;
      T.group = id;
      T.atoms.push_back({su2_label(dim), static_cast<double>(dim), v});
    } else {
      T = bump_field(id, param0, eps, ro);
    }
    DhatResult dh = dhat(id, T, d);
    double den = field_norm(T, FieldNorm::B1);
    g.ratios.push_back(den > 0.0
                           ? field_norm(dh.field, FieldNorm::VNSup) / den
                           : 0.0);
  }
  // least-squares slope of log(ratio) against log(1/eps)
  int n = static_cast<int>(widths.size());
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  for (int i = 0; i < n; ++i) {
    double x = std::log(1.0 / widths[i]);
    double y = std::log(std::max(g.ratios[i], 1e-300));
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  double var = n * sxx - sx * sx;
  g.slope = var > 0.0 ? (n * sxy - sx * sy) / var : 0.0;
  return g;
}

namespace {

std::function<double(double)> module_weight(const ModuleSpaceSpec& spec) {
  if (spec.weight) return spec.weight;
  return [](double rho) { return rho / (1.0 + rho * rho); };
}

double kernel_l1(const TruncatedOperator& v) {
  return KernelFunction::from_trig(v).l1_norm(128);
}

double kernel_linf(const TruncatedOperator& v, int n = 96) {
  KernelFunction k = KernelFunction::from_trig(v);
  double m = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      m = std::max(m, std::abs(k.eval(kTwoPi * i / n, kTwoPi * j / n)));
  return m;
}

// Integral over the components of g(node) against plain d(param).
double component_integral(
    const OperatorField& t,
    const std::function<double(double, const TruncatedOperator&)>& g) {
  double acc = 0.0;
  for (const FieldComponent& c : t.components)
    for (int i = 0; i < c.measure.size(); ++i)
      acc += c.measure.rule.weights[i] *
             g(c.measure.rule.nodes[i], c.values[i]);
  return acc;
}

double wbar_norm(const OperatorField& t,
                 const std::function<double(double)>& w) {
  return component_integral(
      t, [&w](double rho, const TruncatedOperator& v) {
        return w(rho) * kernel_l1(v);
      });
}

// Bounded-support test fields with b1 norm 1, used for the W-norm lower
// estimate and the membership check.
std::vector<OperatorField> module_test_family(const GroupId& id, int trunc_n) {
  std::vector<OperatorField> out;
  auto make = [&](double lo, double hi,
                  const std::function<void(TruncatedOperator&)>& fill) {
    OperatorField s;
    s.group = id;
    FieldComponent c;
    c.measure.lo = lo;
    c.measure.hi = hi;
    c.measure.density = [](double rho) { return rho; };
    c.measure.label_of = [](double rho) { return m2_label(rho); };
    c.measure.rule = gauss_legendre(20, lo, hi);
    TruncatedOperator v = TruncatedOperator::zero(BasisDescriptor::trig(trunc_n));
    fill(v);
    c.values.assign(c.measure.size(), v);
    c.evaluator = [v](double) { return v; };
    s.components.push_back(std::move(c));
    double nrm = field_norm(s, FieldNorm::B1);
    s = map_field(s, [nrm](const IrrepLabel&, const TruncatedOperator& a) {
      TruncatedOperator b = a;
      b.entries /= nrm;
      return b;
    });
    return s;
  };
  out.push_back(make(0.8, 2.2, [](TruncatedOperator& v) { v.at(0, 0) = 1.0; }));
  out.push_back(make(0.4, 3.0, [](TruncatedOperator& v) {
    v.at(0, 0) = 1.0;
    v.at(1, -1) = Complex(0.0, 0.5);
    v.at(-1, 1) = Complex(0.0, -0.5);
  }));
  return out;
}

int field_trunc_n(const OperatorField& t) {
  for (const FieldComponent& c : t.components)
    if (!c.values.empty() && c.values[0].basis.kind == BasisKind::Trig)
      return c.values[0].basis.trunc_n;
  return 8;
}

}  // namespace

void validate(const ModuleSpaceSpec& spec) {
  if (spec.group != GroupTag::M2 && spec.group != GroupTag::HEIS)
    throw UnsupportedOperationError(
        "module spaces are cataloged for M2 (kernel-valued) and HEIS "
        "(operator-valued)");
  if (spec.group == GroupTag::HEIS) {
    if (spec.variant != ModuleVariant::W)
      throw UnsupportedOperationError(
          "the HEIS module has the single variant W = L1(R, dt, compacts)");
    return;
  }
  std::function<double(double)> w = module_weight(spec);
  for (int i = 1; i <= 400; ++i) {
    double rho = 50.0 * std::pow(i / 400.0, 3.0);  // cluster near 0
    double v = w(rho);
    if (!(v > 0.0))
      throw InvalidWeightError("weight must be positive (rho/w bounded)");
    if (v > rho * (1.0 + 1e-9))
      throw InvalidWeightError("weight must satisfy w(rho) <= rho");
  }
}

ModuleNormResult module_norm(const OperatorField& t,
                             const ModuleSpaceSpec& spec,
                             const DualConvOptions& o) {
  validate(spec);
  ModuleNormResult r;
  if (spec.group == GroupTag::HEIS) {
    r.value = component_integral(
        t, [](double, const TruncatedOperator& v) {
          return op_norm(v, OperatorNorm::Op);
        });
    r.lower = r.upper = r.value;
    return r;
  }
  std::function<double(double)> w = module_weight(spec);
  switch (spec.variant) {
    case ModuleVariant::W0: {
      // sup of the L-infinity kernel norms (support is bounded by
      // construction of the discretization).
      double m = 0.0;
      for (const FieldComponent& c : t.components)
        for (const TruncatedOperator& v : c.values)
          m = std::max(m, kernel_linf(v));
      r.value = r.lower = r.upper = m;
      return r;
    }
    case ModuleVariant::Wbar:
      r.value = wbar_norm(t, w);
      r.lower = r.upper = r.value;
      return r;
    case ModuleVariant::Wtilde:
      // seminorm at b' = support top: integral of kernel L1 norms
      // against rho d rho
      r.value = component_integral(
          t, [](double rho, const TruncatedOperator& v) {
            return rho * kernel_l1(v);
          });
      r.lower = r.upper = r.value;
      return r;
    case ModuleVariant::W: {
      // sup over {alpha t + s # t : alpha + ||s||_b1 <= 1} is not
      // computable; report a bracket.  Lower: the finite family
      // {(1, 0)} u {(0, s_j)}.  Upper: alpha ||t||_Wbar +
      // ||s||_b1 int ||t_rho||_tr d rho (valid for w(rho) <= rho).
      double lower = wbar_norm(t, w);
      for (const OperatorField& s : module_test_family(t.group,
                                                       field_trunc_n(t)))
        lower = std::max(lower, wbar_norm(m2_dualconv(s, t, o), w));
      double tr_int = component_integral(
          t, [](double, const TruncatedOperator& v) {
            return op_norm(v, OperatorNorm::Trace);
          });
      r.lower = lower;
      r.upper = std::max(wbar_norm(t, w), tr_int);
      r.value = r.lower;
      return r;
    }
  }
  throw UnsupportedOperationError("module_norm: unknown variant");
}

ModuleMembershipReport module_membership(const OperatorField& t,
                                         const ModuleSpaceSpec& spec,
                                         const DerivationDirection& d,
                                         const DualConvOptions& o) {
  validate(spec);
  if (spec.group != GroupTag::M2)
    throw UnsupportedOperationError(
        "module_membership is cataloged for the M2 module family");
  std::function<double(double)> w = module_weight(spec);
  DhatResult dh = dhat(t.group, t, d);
  ModuleMembershipReport rep;
  rep.edge_defect = dh.edge_defect;
  rep.rhs = component_integral(
      dh.field, [](double, const TruncatedOperator& v) {
        return op_norm(v, OperatorNorm::Trace);
      });
  if (rep.rhs <= 0.0) {
    rep.pass = true;
    return rep;
  }
  for (const OperatorField& s : module_test_family(t.group,
                                                   field_trunc_n(t))) {
    // ||s||_b1 = 1 by construction
    double lhs = wbar_norm(m2_dualconv(s, dh.field, o), w);
    rep.max_ratio = std::max(rep.max_ratio, lhs / rep.rhs);
  }
  rep.pass = rep.max_ratio <= 1.0 + 1e-6;
  return rep;
}

}  // namespace ncfa
