#include "ncfa/dualconv.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <memory>

#include "ncfa/error.hpp"

namespace ncfa {

namespace {

// theta_0 in the trig-coefficient picture for an explicit (mu, phi) pair:
//   C_{MN} = sum_{m1+m2=M, n1+n2=N} a1_{m1 n1} a2_{m2 n2}
//            e^{-i phi (M-N)} e^{i mu (m2-n2)}
// (multiply the kernel factors k1(psi-phi, psi1-phi) and
// k2(psi-phi+mu, psi1-phi+mu) and collect modes).
TruncatedOperator theta0_trig(const TruncatedOperator& a1,
                              const TruncatedOperator& a2, double mu,
                              double phi) {
  if (a1.basis.kind != BasisKind::Trig || a2.basis.kind != BasisKind::Trig)
    throw UnsupportedOperationError("theta0: trig-window operators expected");
  int n1 = a1.basis.trunc_n, n2 = a2.basis.trunc_n;
  auto out = TruncatedOperator::zero(BasisDescriptor::trig(n1 + n2));
  for (int m1 = -n1; m1 <= n1; ++m1)
    for (int k1 = -n1; k1 <= n1; ++k1) {
      Complex c1 = a1.at(m1, k1);
      if (c1 == Complex{}) continue;
      for (int m2 = -n2; m2 <= n2; ++m2)
        for (int k2 = -n2; k2 <= n2; ++k2) {
          Complex c2 = a2.at(m2, k2);
          if (c2 == Complex{}) continue;
          int em = m1 + m2, en = k1 + k2;
          Complex ph = std::exp(Complex(0.0, -phi * (em - en) + mu * (m2 - k2)));
          out.at(em, en) += c1 * c2 * ph;
        }
    }
  return out;
}

// Interior angle mu of the output triangle, from the law of cosines.
double m2_mu_of_rho(double rho1, double rho2, double rho) {
  double c = (rho * rho - rho1 * rho1 - rho2 * rho2) / (2.0 * rho1 * rho2);
  if (!(c > -1.0 && c < 1.0))
    throw InvalidOperandError("m2_theta: rho outside (|rho1-rho2|, rho1+rho2)");
  return std::acos(c);
}


// [lo1, hi1] of the continuum support of a field (its components' charts).
std::pair<double, double> field_support(const OperatorField& f) {
  if (f.components.empty())
    throw InvalidOperandError("dual convolution: field has no continuum part");
  double lo = f.components.front().measure.lo;
  double hi = f.components.front().measure.hi;
  for (const auto& c : f.components) {
    lo = std::min(lo, c.measure.lo);
    hi = std::max(hi, c.measure.hi);
  }
  return {lo, hi};
}

int trig_halfwidth(const OperatorField& f) {
  int n = 0;
  for (const auto& c : f.components)
    for (const auto& v : c.values) n = std::max(n, v.basis.trunc_n);
  return n;
}

// Sorted panel boundaries clipped to [lo, hi], duplicates collapsed.
std::vector<double> panel_cuts(double lo, double hi, std::vector<double> cuts) {
  cuts.push_back(lo);
  cuts.push_back(hi);
  std::sort(cuts.begin(), cuts.end());
  std::vector<double> out;
  double tol = 1e-10 * std::max(1.0, std::abs(hi));
  for (double c : cuts) {
    double v = std::min(hi, std::max(lo, c));
    if (out.empty() || v > out.back() + tol) out.push_back(v);
  }
  return out;
}

// Node budget for a panel covering the given fraction of the full span.
int panel_n(int budget, double frac) {
  return std::max(8, static_cast<int>(std::ceil(budget * frac)));
}

// Piecewise Gauss-Legendre with panel breaks at the support-geometry corners
// (the output field is smooth between them but only C^k across them).
QuadratureRule piecewise_gl(double lo, double hi, std::vector<double> cuts,
                            int budget) {
  auto ps = panel_cuts(lo, hi, std::move(cuts));
  std::vector<double> ns, ws;
  for (size_t p = 0; p + 1 < ps.size(); ++p) {
    double a = ps[p], b = ps[p + 1];
    if (!(b > a)) continue;
    // sin^2 endpoint clustering: dual convolutions have half-power behavior
    // at support-geometry corners
    auto gl = gauss_legendre(panel_n(budget, (b - a) / (hi - lo)), 0.0, 1.0);
    for (int i = 0; i < gl.size(); ++i) {
      double sn = std::sin(kPi * gl.nodes[i] / 2.0);
      ns.push_back(a + (b - a) * sn * sn);
      ws.push_back(gl.weights[i] * (b - a) * (kPi / 2.0) *
                   std::sin(kPi * gl.nodes[i]));
    }
  }
  QuadratureRule out;
  out.nodes = Eigen::Map<RealVector>(ns.data(), ns.size());
  out.weights = Eigen::Map<RealVector>(ws.data(), ws.size());
  return out;
}

ContinuumComponent m2_out_component(double lo, double hi,
                                    const std::vector<double>& cuts, int n,
                                    std::function<IrrepLabel(double)> lab) {
  ContinuumComponent out;
  out.lo = lo;
  out.hi = hi;
  out.density = [](double rho) { return rho; };
  out.label_of = std::move(lab);
  out.rule = piecewise_gl(lo, hi, cuts, n);
  return out;
}

}  // namespace

PolarPoint m2_angle(double rho1, double rho2, double mu) {
  if (!(rho1 > 0.0) || !(rho2 > 0.0))
    throw InvalidOperandError("m2_angle: rho1, rho2 must be positive");
  Complex z = rho1 + rho2 * std::exp(Complex(0.0, mu));
  if (std::abs(z) < 1e-12 * (rho1 + rho2))
    throw DegenerateGeometryError("m2_angle: rho = 0 (antipodal radii)");
  return {std::abs(z), std::arg(z)};
}

ThetaResult m2_theta0(const TruncatedOperator& a1, const TruncatedOperator& a2,
                      double rho1, double rho2, double mu) {
  double phi = m2_angle(rho1, rho2, mu).phi;
  ThetaResult r;
  r.op = theta0_trig(a1, a2, mu, phi);
  r.has_op = true;
  r.mus = {mu};
  r.phis = {phi};
  r.branch_count = 1;
  return r;
}

ThetaResult m2_theta(const TruncatedOperator& a1, const TruncatedOperator& a2,
                     double rho1, double rho2, double rho) {
  double mu = m2_mu_of_rho(rho1, rho2, rho);
  double phi = m2_angle(rho1, rho2, mu).phi;
  ThetaResult r;
  r.op = theta0_trig(a1, a2, mu, phi);
  r.op.entries += theta0_trig(a1, a2, kTwoPi - mu, -phi).entries;
  r.has_op = true;
  r.mus = {mu, kTwoPi - mu};
  r.phis = {phi, -phi};
  r.branch_count = 2;
  return r;
}

KernelFunction m2_theta_kernel(const KernelFunction& a1,
                               const KernelFunction& a2, double rho1,
                               double rho2, double rho) {
  double mu = m2_mu_of_rho(rho1, rho2, rho);
  double phi = m2_angle(rho1, rho2, mu).phi;
  auto fn = [a1, a2, mu, phi](double x, double y) {
    Complex v = a1.eval(x - phi, y - phi) *
                a2.eval(x - phi + mu, y - phi + mu);
    v += a1.eval(x + phi, y + phi) * a2.eval(x + phi - mu, y + phi - mu);
    return v;
  };
  return KernelFunction::callable(std::move(fn), KernelFunction::Domain::Circle);
}

OperatorField m2_dualconv(const OperatorField& s, const OperatorField& t,
                          const DualConvOptions& o) {
  auto [a1, b1] = field_support(s);
  auto [a2, b2] = field_support(t);
  int n1 = trig_halfwidth(s), n2 = trig_halfwidth(t);
  int window = n1 + n2;
  // smallest |rho1 - rho2| over the support rectangle
  double lo = std::max({a1 - b2, a2 - b1, 1e-9});
  double hi = b1 + b2;

  // (S # T)_rho = int d rho1 rho1 S-node int (d mu / 2 pi)
  //               theta(S_rho1, T_rho2(mu))(rho),
  // using the symmetry of K to run the rho2 integral in the mu chart
  // (1/2pi d mu = 1/2 K(rho1, rho2, rho) rho2 d rho2 at fixed rho1, rho).
  // mu is restricted to the sub-interval mapping rho2 into the support
  // overlap, and the rho1 integral is split where the clipping switches on
  // or off -- otherwise the panels straddle kinks and lose the spectral rate.
  auto sc = s, tc = t;  // captured by value: the closure owns its inputs
  auto opts = o;
  auto evaluator = [sc, tc, opts, window](double rho) {
    auto acc = TruncatedOperator::zero(BasisDescriptor::trig(window));
    auto clamp_acos = [](double c) {
      return std::acos(std::min(1.0, std::max(-1.0, c)));
    };
    for (const auto& comp : sc.components)
      for (const auto& ct : tc.components) {
        double a2 = ct.measure.lo, b2 = ct.measure.hi;
        std::vector<double> tedges = {a2, b2};
        tedges.insert(tedges.end(), ct.measure.seams.begin(),
                      ct.measure.seams.end());
        std::sort(tedges.begin(), tedges.end());
        std::vector<double> cuts = {comp.measure.lo, comp.measure.hi};
        cuts.insert(cuts.end(), comp.measure.seams.begin(),
                    comp.measure.seams.end());
        for (double v : tedges) {
          cuts.push_back(v - rho);
          cuts.push_back(rho - v);
          cuts.push_back(rho + v);
        }
        double span = comp.measure.hi - comp.measure.lo;
        auto ps = panel_cuts(comp.measure.lo, comp.measure.hi,
                             std::move(cuts));
        for (size_t p = 0; p + 1 < ps.size(); ++p) {
          double plo = ps[p], phi_ = ps[p + 1];
          if (!(phi_ > plo + 1e-14)) continue;
          // sin^2 endpoint clustering: the inner integral vanishes like a
          // half power where the mu window closes, which costs plain GL its
          // spectral rate
          auto outer = gauss_legendre(
              panel_n(opts.outer_n, (phi_ - plo) / span), 0.0, 1.0);
          for (int i = 0; i < outer.size(); ++i) {
            double v = outer.nodes[i], len = phi_ - plo;
            double sn = std::sin(kPi * v / 2.0);
            double r1 = plo + len * sn * sn;
            double w1 = outer.weights[i] * len * (kPi / 2.0) *
                        std::sin(kPi * v);
            double tlo = std::max(a2, std::abs(r1 - rho));
            double thi = std::min(b2, r1 + rho);
            if (!(thi > tlo)) continue;
            auto va = comp.eval(r1);
            if (va.entries.isZero(0.0)) continue;
            for (size_t q = 0; q + 1 < tedges.size(); ++q) {
              double r2lo = std::max(tedges[q], tlo);
              double r2hi = std::min(tedges[q + 1], thi);
              if (!(r2hi > r2lo + 1e-14)) continue;
              // mu decreasing in rho2 at fixed (r1, rho)
              double mulo = clamp_acos((r2hi * r2hi - r1 * r1 - rho * rho) /
                                       (2.0 * r1 * rho));
              double muhi = clamp_acos((r2lo * r2lo - r1 * r1 - rho * rho) /
                                       (2.0 * r1 * rho));
              if (!(muhi > mulo)) continue;
              auto inner = gauss_legendre(
                  panel_n(opts.mu_n, (muhi - mulo) / kPi), mulo, muhi);
              for (int j = 0; j < inner.size(); ++j) {
                double r2 =
                    std::sqrt(r1 * r1 + rho * rho +
                              2.0 * r1 * rho * std::cos(inner.nodes[j]));
                double cth = (rho * rho - r1 * r1 - r2 * r2) / (2.0 * r1 * r2);
                if (!(cth > -1.0 + 1e-13 && cth < 1.0 - 1e-13))
                  continue;  // roundoff-degenerate triangle
                auto th = m2_theta(va, ct.eval(r2), r1, r2, rho);
                acc.entries += embed_window(th.op, window).entries *
                               (w1 * r1 * inner.weights[j] / kTwoPi);
              }
            }
          }
        }
      }
    return acc;
  };

  OperatorField out;
  out.group = s.group;
  FieldComponent fc;
  // output kinks sit at |u - v| and u + v over the support edges (interval
  // ends and inherited seams) of the two inputs
  std::vector<double> se, te;
  for (const auto& c : s.components) {
    se.push_back(c.measure.lo);
    se.push_back(c.measure.hi);
    se.insert(se.end(), c.measure.seams.begin(), c.measure.seams.end());
  }
  for (const auto& c : t.components) {
    te.push_back(c.measure.lo);
    te.push_back(c.measure.hi);
    te.insert(te.end(), c.measure.seams.begin(), c.measure.seams.end());
  }
  std::vector<double> corners;
  for (double u : se)
    for (double v : te) {
      corners.push_back(std::abs(u - v));
      corners.push_back(u + v);
    }
  fc.measure = m2_out_component(lo, hi, corners, o.out_n,
                                [](double rho) { return m2_label(rho); });
  std::sort(corners.begin(), corners.end());
  for (double v : corners)
    if (v > lo + 1e-12 && v < hi - 1e-12 &&
        (fc.measure.seams.empty() || v > fc.measure.seams.back() + 1e-12))
      fc.measure.seams.push_back(v);
  fc.evaluator = evaluator;
  for (int i = 0; i < fc.measure.size(); ++i)
    fc.values.push_back(evaluator(fc.measure.rule.nodes[i]));
  out.components.push_back(std::move(fc));
  return out;
}

// ---- Heisenberg ------------------------------------------------------------

namespace {

struct Window {
  double lo = 0.0, hi = 0.0;
};

Window kernel_window(const KernelFunction& k) {
  if (k.backing == KernelFunction::Backing::GridSamples)
    return {k.nodes[0], k.nodes[k.nodes.size() - 1]};
  return {k.lo, k.hi};
}

// Intersect the s-range of the constraint lo <= a - c s <= hi into [slo,shi].
void clip_range(double a, double c, double lo, double hi, double& slo,
                double& shi) {
  if (c == 0.0) return;  // no s-dependence; the kernel factor gates it
  double u = (a - hi) / c, v = (a - lo) / c;
  slo = std::max(slo, std::min(u, v));
  shi = std::min(shi, std::max(u, v));
}

// Zero-padded shift along one axis blended with stencil weights c[0..3] at
// offsets q-1..q+2 (rows: out_i = sum_a c[a] s_{i+q-1+a}).
Matrix shift_axis(const Matrix& s, const double* c, int q, bool rows) {
  int n = static_cast<int>(s.rows());
  Matrix out = Matrix::Zero(n, n);
  for (int a = 0; a < 4; ++a) {
    int k = q - 1 + a;
    if (std::abs(k) >= n || c[a] == 0.0) continue;
    int lo = std::max(0, -k), len = n - std::abs(k);
    if (rows)
      out.block(lo, 0, len, n) += c[a] * s.block(lo + k, 0, len, n);
    else
      out.block(0, lo, n, len) += c[a] * s.block(0, lo + k, n, len);
  }
  return out;
}

// Samples of k(x - d, y - d) on the same uniform lattice: one fractional
// offset for every node, so the shift is a separable Lagrange-cubic blend
// (two 1D passes over the 4-point stencil).
Matrix lattice_shift(const Matrix& s, double d, double h) {
  double p = -d / h;
  int q = static_cast<int>(std::floor(p));
  double f = p - q;
  double c[4] = {-f * (f - 1.0) * (f - 2.0) / 6.0,
                 (f + 1.0) * (f - 1.0) * (f - 2.0) / 2.0,
                 -(f + 1.0) * f * (f - 2.0) / 2.0,
                 (f + 1.0) * f * (f - 1.0) / 6.0};
  return shift_axis(shift_axis(s, c, q, true), c, q, false);
}

bool same_uniform_lattice(const KernelFunction& k, const BasisDescriptor& g) {
  if (k.backing != KernelFunction::Backing::GridSamples) return false;
  if (k.nodes.size() != g.nodes.size()) return false;
  if ((k.nodes - g.nodes).cwiseAbs().maxCoeff() > 1e-12) return false;
  int n = static_cast<int>(g.nodes.size());
  if (n < 2) return false;
  double h = g.nodes[1] - g.nodes[0];
  for (int i = 1; i + 1 < n; ++i)
    if (std::abs(g.nodes[i + 1] - g.nodes[i] - h) > 1e-9 * std::abs(h))
      return false;
  return true;
}

}  // namespace

TruncatedOperator heis_theta(const KernelFunction& k1,
                             const KernelFunction& k2, double t1, double t2,
                             const BasisDescriptor& grid, int s_n) {
  if (t1 == 0.0 || t2 == 0.0 || t1 + t2 == 0.0)
    throw ExcludedParameterError("heis_theta: t1, t2, t1+t2 must be nonzero");
  double c1 = t1 / (t1 + t2), c2 = t2 / (t1 + t2);
  Window w1 = kernel_window(k1), w2 = kernel_window(k2);

  // Fast path: both kernels sampled on the output lattice.  The lattice
  // shifted by a constant has one fractional offset, so each s node is a
  // handful of padded block blends instead of n^2 interpolations.
  if (same_uniform_lattice(k1, grid) && same_uniform_lattice(k2, grid)) {
    double glo = grid.nodes[0], ghi = grid.nodes[grid.nodes.size() - 1];
    double h = grid.nodes[1] - grid.nodes[0];
    // both shifted lattices must still overlap the window
    double lim = (ghi - glo) / std::max(std::abs(c1), std::abs(c2));
    double slo = -lim, shi = lim;
    auto out = TruncatedOperator::zero(grid);
    if (shi > slo) {
      auto gl = gauss_legendre(s_n, slo, shi);
      Matrix acc = Matrix::Zero(grid.size(), grid.size());
      for (int i = 0; i < gl.size(); ++i) {
        double sv = gl.nodes[i];
        acc += gl.weights[i] *
               lattice_shift(k1.samples, c2 * sv, h).cwiseProduct(
                   lattice_shift(k2.samples, -c1 * sv, h));
      }
      out.entries = acc * grid.weights.asDiagonal();
    }
    return out;
  }

  // k_theta(x, y) = int k1(x - c2 s, y - c2 s) k2(x + c1 s, y + c1 s) ds
  // (one reference rule, rescaled per point -- the node solve is O(n^2))
  auto ref = std::make_shared<const QuadratureRule>(
      gauss_legendre(s_n, 0.0, 1.0));
  auto fn = [k1, k2, c1, c2, w1, w2, ref](double x, double y) {
    double slo = -1e300, shi = 1e300;
    clip_range(x, c2, w1.lo, w1.hi, slo, shi);
    clip_range(y, c2, w1.lo, w1.hi, slo, shi);
    clip_range(x, -c1, w2.lo, w2.hi, slo, shi);
    clip_range(y, -c1, w2.lo, w2.hi, slo, shi);
    if (!(shi > slo)) return Complex{};
    double len = shi - slo;
    Complex acc{};
    for (int i = 0; i < ref->size(); ++i) {
      double sv = slo + len * ref->nodes[i];
      acc += len * ref->weights[i] * k1.eval(x - c2 * sv, y - c2 * sv) *
             k2.eval(x + c1 * sv, y + c1 * sv);
    }
    return acc;
  };
  auto kf = KernelFunction::callable(std::move(fn),
                                     KernelFunction::Domain::Line,
                                     std::min(w1.lo, w2.lo),
                                     std::max(w1.hi, w2.hi));
  return kf.to_operator(grid);
}

OperatorField heis_dualconv(const OperatorField& s, const OperatorField& t,
                            const DualConvOptions& o) {
  auto [lo1, hi1] = field_support(s);
  auto [lo2, hi2] = field_support(t);
  if (lo1 <= 0.0 && hi1 >= 0.0)
    throw ExcludedParameterError("heis_dualconv: support of S touches t = 0");
  if (lo2 <= 0.0 && hi2 >= 0.0)
    throw ExcludedParameterError("heis_dualconv: support of T touches t = 0");
  BasisDescriptor grid = s.components.front().values.front().basis;

  auto sc = s, tc = t;
  auto opts = o;
  // |t| (S # T)_t = c int theta(|s| S_s, |t-s| T_{t-s}, s, t-s) ds
  auto evaluator = [sc, tc, opts, grid](double tt) {
    auto acc = TruncatedOperator::zero(grid);
    for (const auto& ca : sc.components)
      for (const auto& cb : tc.components) {
        double slo = std::max(ca.measure.lo, tt - cb.measure.hi);
        double shi = std::min(ca.measure.hi, tt - cb.measure.lo);
        if (!(shi > slo)) continue;
        // only C^k across the seams of either factor
        std::vector<double> cuts(ca.measure.seams);
        for (double sm : cb.measure.seams) cuts.push_back(tt - sm);
        auto gl = piecewise_gl(slo, shi, std::move(cuts), opts.outer_n);
        for (int i = 0; i < gl.size(); ++i) {
          double sv = gl.nodes[i];
          auto a = ca.eval(sv);
          auto b = cb.eval(tt - sv);
          auto th = heis_theta(KernelFunction::from_grid(a),
                               KernelFunction::from_grid(b), sv, tt - sv,
                               grid, opts.s_n);
          acc.entries += th.entries *
                         (gl.weights[i] * std::abs(sv) * std::abs(tt - sv));
        }
      }
    acc.entries *= opts.heis_prefactor / std::abs(tt);
    return acc;
  };

  // the output chart is smooth except where an edge (or seam) of one support
  // meets an edge of the other
  std::vector<double> corners;
  for (const auto& ca : s.components)
    for (const auto& cb : t.components) {
      std::vector<double> e1{ca.measure.lo, ca.measure.hi};
      e1.insert(e1.end(), ca.measure.seams.begin(), ca.measure.seams.end());
      std::vector<double> e2{cb.measure.lo, cb.measure.hi};
      e2.insert(e2.end(), cb.measure.seams.begin(), cb.measure.seams.end());
      for (double u : e1)
        for (double v : e2) corners.push_back(u + v);
    }

  OperatorField out;
  out.group = s.group;
  FieldComponent fc;
  fc.measure.lo = lo1 + lo2;
  fc.measure.hi = hi1 + hi2;
  fc.measure.density = [](double tt) { return std::abs(tt) / kFourPiSq; };
  fc.measure.label_of = [](double tt) { return heis_label(tt); };
  fc.measure.rule = piecewise_gl(fc.measure.lo, fc.measure.hi, corners,
                                 o.out_n);
  fc.measure.seams = panel_cuts(fc.measure.lo, fc.measure.hi, corners);
  fc.measure.seams.erase(fc.measure.seams.begin());
  fc.measure.seams.pop_back();
  fc.evaluator = evaluator;
  for (int i = 0; i < fc.measure.size(); ++i)
    fc.values.push_back(evaluator(fc.measure.rule.nodes[i]));
  out.components.push_back(std::move(fc));
  return out;
}

// ---- twisted variants ------------------------------------------------------

int TwistCocycle::n(double t1, double t2) const {
  return static_cast<int>(
      std::lround(section(t1) + section(t2) - section(t1 + t2)));
}

TwistCocycle TwistCocycle::standard() {
  return {[](double x) { return x - std::floor(x); }};
}

namespace {

TruncatedOperator twist_value(const TruncatedOperator& v, int n) {
  if (n == 0) return v;
  return mn_twist(embed_window(v, v.basis.trunc_n + std::abs(n)), n);
}

OperatorField component_as_m2_field(const GroupId& id,
                                    const FieldComponent& c) {
  OperatorField f;
  f.group = {GroupTag::M2, {}};
  f.components.push_back(c);
  (void)id;
  return f;
}

// Exact value of t for a component of an M2_K field, through the label's
// generator coefficients (sums of representatives can hit integers exactly).
double gamma_value(const GroupId& id, const IntVector& coef) {
  double t = 0.0;
  for (int j = 0; j < coef.size(); ++j) t += coef[j] * id.params.gamma[j];
  return t;
}

int unit_generator(const GroupId& id) {
  for (size_t j = 0; j < id.params.gamma.size(); ++j)
    if (std::abs(id.params.gamma[j] - 1.0) < 1e-12) return static_cast<int>(j);
  throw ConfigError("twisted_dualconv: Gamma must contain the unit generator");
}

}  // namespace

OperatorField twisted_dualconv(const OperatorField& s, const OperatorField& t,
                               const GroupId& id, const TwistCocycle& c,
                               const DualConvOptions& o) {
  OperatorField out;
  out.group = s.group;

  if (id.tag == GroupTag::M2_K) {
    int u = unit_generator(id);
    // accumulate per reduced coefficient vector
    std::vector<std::pair<IntVector, OperatorField>> parts;
    for (const auto& ca : s.components)
      for (const auto& cb : t.components) {
        IrrepLabel la = ca.measure.label_of(ca.measure.rule.nodes[0]);
        IrrepLabel lb = cb.measure.label_of(cb.measure.rule.nodes[0]);
        double t1 = la.t, t2 = lb.t;
        IntVector coef = la.gcoef + lb.gcoef;
        // sum in the lattice coordinates so t1 + t2 has no roundoff (it can
        // land exactly on an integer, where the cocycle jumps)
        double tsum = gamma_value(id, coef);
        int n = static_cast<int>(
            std::lround(c.section(t1) + c.section(t2) - c.section(tsum)));
        IntVector red = coef;
        red[u] -= n;
        auto conv = m2_dualconv(component_as_m2_field(id, ca),
                                component_as_m2_field(id, cb), o);
        auto tw = map_field(conv, [n](const IrrepLabel&,
                                      const TruncatedOperator& v) {
          return twist_value(v, -n);
        });
        auto it = std::find_if(parts.begin(), parts.end(), [&](const auto& p) {
          return p.first.size() == red.size() &&
                 (p.first.array() == red.array()).all();
        });
        if (it == parts.end()) {
          parts.push_back({red, tw});
        } else {
          // merge: shared rho chart (same conv options), add values
          auto& dst = it->second.components.front();
          auto& src = tw.components.front();
          for (size_t k = 0; k < dst.values.size(); ++k) {
            int w = std::max(dst.values[k].basis.trunc_n,
                             src.values[k].basis.trunc_n);
            auto e = embed_window(dst.values[k], w);
            e.entries += embed_window(src.values[k], w).entries;
            dst.values[k] = e;
          }
          auto e1 = dst.evaluator, e2 = src.evaluator;
          dst.evaluator = [e1, e2](double rho) {
            auto a = e1(rho), b = e2(rho);
            int w = std::max(a.basis.trunc_n, b.basis.trunc_n);
            auto e = embed_window(a, w);
            e.entries += embed_window(b, w).entries;
            return e;
          };
        }
      }
    GroupId gid = id;
    for (auto& [coef, f] : parts) {
      auto& fc = f.components.front();
      IntVector cc = coef;
      fc.measure.label_of = [gid, cc](double rho) {
        return m2_k_label(gid, cc, rho);
      };
      out.components.push_back(std::move(fc));
    }
    return out;
  }

  if (id.tag == GroupTag::M2_TILDE) {
    // both fields must sit on the same periodic t grid in [0, 1); pairing is
    // exact by node index, and the t1 integral carries weight 1/t_n
    auto node_t = [](const FieldComponent& fc) {
      return fc.measure.label_of(fc.measure.rule.nodes[0]).t;
    };
    size_t tn = s.components.size();
    if (t.components.size() != tn)
      throw GridIncompatibleError("twisted_dualconv: t grids differ");
    std::vector<OperatorField> acc(tn);
    for (size_t i = 0; i < tn; ++i)
      for (size_t j = 0; j < tn; ++j) {
        double t1 = node_t(s.components[i]), t2 = node_t(t.components[j]);
        size_t k = (i + j) % tn;
        // exact fractional part through the grid indices
        double tfrac = static_cast<double>(k) / static_cast<double>(tn);
        int n = static_cast<int>(
            std::lround(c.section(t1) + c.section(t2) - c.section(tfrac)));
        auto conv = m2_dualconv(component_as_m2_field(id, s.components[i]),
                                component_as_m2_field(id, t.components[j]), o);
        double w = 1.0 / static_cast<double>(tn);
        auto tw = map_field(conv, [n, w](const IrrepLabel&,
                                         const TruncatedOperator& v) {
          auto r = twist_value(v, -n);
          r.entries *= w;
          return r;
        });
        if (acc[k].components.empty()) {
          acc[k] = tw;
        } else {
          auto& dst = acc[k].components.front();
          auto& src = tw.components.front();
          for (size_t m = 0; m < dst.values.size(); ++m) {
            int wd = std::max(dst.values[m].basis.trunc_n,
                              src.values[m].basis.trunc_n);
            auto e = embed_window(dst.values[m], wd);
            e.entries += embed_window(src.values[m], wd).entries;
            dst.values[m] = e;
          }
          auto e1 = dst.evaluator, e2 = src.evaluator;
          dst.evaluator = [e1, e2](double rho) {
            auto a = e1(rho), b = e2(rho);
            int wd = std::max(a.basis.trunc_n, b.basis.trunc_n);
            auto e = embed_window(a, wd);
            e.entries += embed_window(b, wd).entries;
            return e;
          };
        }
      }
    for (size_t k = 0; k < tn; ++k) {
      double tk = node_t(s.components[k]);
      auto& fc = acc[k].components.front();
      double wt = 1.0 / static_cast<double>(tn);
      fc.measure.density = [wt](double rho) { return wt * rho; };
      fc.measure.label_of = [tk](double rho) { return m2_tilde_label(tk, rho); };
      out.components.push_back(std::move(fc));
    }
    return out;
  }

  throw UnsupportedOperationError(
      "twisted_dualconv: M2_K or M2_TILDE expected");
}

// ---- Grelaud ---------------------------------------------------------------

namespace {

Complex spiral_z(double b1, double b2, double mu, double a) {
  return b1 + b2 * std::exp(-Complex(a, 1.0) * mu);
}

// fold phi by 2 pi shifts so that r e^{a phi} lands in [1, e^{2 pi a})
double fold_phi(double r, double phi_raw, double a) {
  double x = (std::log(r) + a * phi_raw) / (kTwoPi * a);
  return phi_raw - kTwoPi * std::floor(x);
}

}  // namespace

SpiralPoint grelaud_spiral(double b1, double b2, double mu, double a) {
  Complex z = spiral_z(b1, b2, mu, a);
  double r = std::abs(z);
  if (r < 1e-12 * (b1 + b2))
    throw DegenerateGeometryError("grelaud_spiral: r = 0 (mu = pi pairing)");
  double phi = fold_phi(r, -std::arg(z), a);
  return {r, phi, r * std::exp(a * phi)};
}

double grelaud_spiral_jacobian(double b1, double b2, double mu, double a) {
  auto p = grelaud_spiral(b1, b2, mu, a);
  return -std::exp(a * (p.phi - mu)) * b1 * b2 * (a * a + 1.0) *
         std::sin(mu) / p.r;
}

ThetaResult grelaud_theta(const KernelFunction& k1, const KernelFunction& k2,
                          double b1, double b2, double b, double a,
                          int branch_window) {
  if (!(b >= 1.0 && b < std::exp(kTwoPi * a)))
    throw InvalidOperandError("grelaud_theta: b outside [1, e^{2 pi a})");
  int M = branch_window;
  // Continuous walk of phi(mu) over [-M pi, M pi]; b(mu) is monotonic
  // between consecutive multiples of pi, so every target crossing can be
  // bracketed on the walk and refined by bisection.
  const int per_pi = 256;
  int nsteps = 2 * M * per_pi;
  double mu0 = -M * kPi, h = kPi / per_pi;
  RealVector mus(nsteps + 1), phis(nsteps + 1), bs(nsteps + 1);
  double prev = 0.0;
  for (int i = 0; i <= nsteps; ++i) {
    double mu = mu0 + i * h;
    Complex z = spiral_z(b1, b2, mu, a);
    double r = std::abs(z);
    double phi = -std::arg(z);
    if (i > 0) phi += kTwoPi * std::round((prev - phi) / kTwoPi);
    prev = phi;
    mus[i] = mu;
    phis[i] = phi;
    bs[i] = r * std::exp(a * phi);  // unfolded branch value
  }
  double lgb = std::log(b), period = kTwoPi * a;

  struct Branch {
    double mu, phi, weight;
  };
  std::vector<Branch> branches;
  for (int i = 0; i < nsteps; ++i) {
    // targets b e^{2 pi a j} falling between consecutive walk samples
    double l0 = std::log(bs[i]), l1 = std::log(bs[i + 1]);
    double jlo = std::ceil((std::min(l0, l1) - lgb) / period - 1e-12);
    double jhi = std::floor((std::max(l0, l1) - lgb) / period + 1e-12);
    for (double j = jlo; j <= jhi; ++j) {
      double target = lgb + j * period;
      // bisection with local phi continuation (steps stay below pi)
      double ml = mus[i], mh = mus[i + 1], pl = phis[i];
      double fl = l0 - target;
      for (int it = 0; it < 60; ++it) {
        double mm = 0.5 * (ml + mh);
        Complex z = spiral_z(b1, b2, mm, a);
        double phi = -std::arg(z);
        phi += kTwoPi * std::round((pl - phi) / kTwoPi);
        double fm = std::log(std::abs(z)) + a * phi - target;
        if ((fm > 0) == (fl > 0)) {
          ml = mm;
          pl = phi;
          fl = fm;
        } else {
          mh = mm;
        }
      }
      double mu = 0.5 * (ml + mh);
      Complex z = spiral_z(b1, b2, mu, a);
      double r = std::abs(z);
      double phi = -std::arg(z);
      phi += kTwoPi * std::round((pl - phi) / kTwoPi);
      double phif = phi - kTwoPi * j;  // folded: r e^{a phif} = b
      double jac = std::abs(std::exp(a * (phif - mu)) * b1 * b2 *
                            (a * a + 1.0) * std::sin(mu) / r);
      if (jac < 1e-14) continue;  // grazing contact at a turning point
      branches.push_back({mu, phif, kFourPiSq / (b * jac)});
    }
  }

  ThetaResult res;
  res.branch_count = static_cast<int>(branches.size());
  for (const auto& br : branches) {
    res.mus.push_back(br.mu);
    res.phis.push_back(br.phi);
  }
  // tail: magnitude the outermost pi-pieces contribute, as a hint whether
  // the branch window was wide enough (no convergence rate is asserted)
  Window w1 = kernel_window(k1);
  double tail = 0.0;
  for (const auto& br : branches)
    if (std::abs(br.mu) > (M - 1) * kPi) {
      double m = 0.0;
      for (int q = 0; q <= 32; ++q) {
        double x = w1.lo + (w1.hi - w1.lo) * q / 32.0;
        m = std::max(m, std::abs(k1.eval(x - br.phi, x - br.phi) *
                                 k2.eval(x - br.phi + br.mu,
                                         x - br.phi + br.mu)));
      }
      tail += br.weight * m * (w1.hi - w1.lo);
    }
  res.tail_estimate = tail;

  auto fn = [k1, k2, branches](double x, double y) {
    Complex acc{};
    for (const auto& br : branches)
      acc += br.weight * k1.eval(x - br.phi, y - br.phi) *
             k2.eval(x - br.phi + br.mu, y - br.phi + br.mu);
    return acc;
  };
  // window wide enough to hold every phi-shifted branch (trace integrals
  // run over the kernel window)
  double plo = 0.0, phi_hi = 0.0;
  for (const auto& br : branches) {
    plo = std::min(plo, br.phi);
    phi_hi = std::max(phi_hi, br.phi);
  }
  res.kernel = KernelFunction::callable(std::move(fn),
                                        KernelFunction::Domain::Line,
                                        w1.lo + plo, w1.hi + phi_hi);
  res.has_kernel = true;
  return res;
}

}  // namespace ncfa
