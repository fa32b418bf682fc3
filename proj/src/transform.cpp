#include "ncfa/transform.hpp"

#include <cmath>

#include "ncfa/bessel.hpp"
#include "ncfa/error.hpp"

namespace ncfa {

double GroupSampler::norm_sq(const GroupFunction& f) const {
  double acc = 0.0;
  for (size_t i = 0; i < points.size(); ++i) {
    double v = std::abs(f(points[i]));
    acc += weights[i] * v * v;
  }
  return acc;
}

double GroupSampler::edge_fraction(const GroupFunction& f) const {
  double acc = 0.0, edge = 0.0;
  for (size_t i = 0; i < points.size(); ++i) {
    double v = std::abs(f(points[i]));
    double m = weights[i] * v * v;
    acc += m;
    if (edge_flags[i] > 0.5) edge += m;
  }
  return acc > 0 ? edge / acc : 0.0;
}

namespace {

double lattice_step(const RepOptions& o, bool log_grid) {
  (void)log_grid;
  return 2.0 * o.window_L / (o.grid_n - 1);
}

// shifts m h with |m h| <= L
std::vector<int> lattice_shifts(double h, double L) {
  std::vector<int> m;
  int mmax = static_cast<int>(std::floor(L / h));
  for (int k = -mmax; k <= mmax; ++k) m.push_back(k);
  return m;
}

bool near_edge(double x, double L) { return std::abs(x) > 0.85 * L; }

}  // namespace

GroupSampler group_sampler(const GroupId& id, const TransformOptions& o) {
  validate(id);
  GroupSampler s;
  auto push = [&s](GroupElement g, double w, bool edge) {
    s.points.push_back(std::move(g));
    s.weights.push_back(w);
    s.edge_flags.push_back(edge ? 1.0 : 0.0);
  };
  switch (id.tag) {
    case GroupTag::SU2: {
      int np = o.angle_n;
      auto phi = periodic_trapezoid(np, 0.0, kTwoPi);
      auto psi = periodic_trapezoid(2 * np, 0.0, 2.0 * kTwoPi);
      auto th = gauss_legendre(np, 0.0, kPi);
      for (int i = 0; i < np; ++i)
        for (int j = 0; j < np; ++j)
          for (int k = 0; k < 2 * np; ++k) {
            auto g = su2_euler(phi.nodes[i], th.nodes[j], psi.nodes[k]);
            double w = phi.weights[i] * th.weights[j] * psi.weights[k] *
                       haar_weight(id, g);
            push(g, w, false);
          }
      return s;
    }
    case GroupTag::AXB: {
      double h = lattice_step(o.rep, true);
      auto xs = gauss_legendre(o.group_n, -o.group_L, o.group_L);
      for (int m : lattice_shifts(h, o.group_L))
        for (int i = 0; i < xs.size(); ++i) {
          auto g = axb_element(xs.nodes[i], m * h);
          push(g, xs.weights[i] * h * haar_weight(id, g),
               near_edge(xs.nodes[i], o.group_L) ||
                   near_edge(m * h, o.group_L));
        }
      return s;
    }
    case GroupTag::HEIS: {
      double h = lattice_step(o.rep, false);
      auto ys = gauss_legendre(o.group_n, -o.group_L, o.group_L);
      auto zs = gauss_legendre(o.group_n, -o.group_L, o.group_L);
      for (int m : lattice_shifts(h, o.group_L))
        for (int i = 0; i < ys.size(); ++i)
          for (int j = 0; j < zs.size(); ++j) {
            auto g = heis_element(ys.nodes[i], zs.nodes[j], m * h);
            push(g, ys.weights[i] * zs.weights[j] * h,
                 near_edge(ys.nodes[i], o.group_L) ||
                     near_edge(zs.nodes[j], o.group_L) ||
                     near_edge(m * h, o.group_L));
          }
      return s;
    }
    case GroupTag::M2: {
      auto vs = gauss_legendre(o.group_n, -o.group_L, o.group_L);
      auto al = periodic_trapezoid(o.angle_n, 0.0, kTwoPi);
      for (int i = 0; i < vs.size(); ++i)
        for (int j = 0; j < vs.size(); ++j)
          for (int k = 0; k < al.size(); ++k) {
            auto g = m2_element(vs.nodes[i], vs.nodes[j], al.nodes[k]);
            push(g,
                 vs.weights[i] * vs.weights[j] * al.weights[k] /
                     kFourPiSq,
                 near_edge(vs.nodes[i], o.group_L) ||
                     near_edge(vs.nodes[j], o.group_L));
          }
      return s;
    }
    case GroupTag::GRELAUD: {
      double h = lattice_step(o.rep, false);
      auto xs = gauss_legendre(o.group_n, -o.group_L, o.group_L);
      for (int m : lattice_shifts(h, o.group_L))
        for (int i = 0; i < xs.size(); ++i)
          for (int j = 0; j < xs.size(); ++j) {
            auto g = grelaud_element(Complex(xs.nodes[i], xs.nodes[j]),
                                     m * h);
            push(g, xs.weights[i] * xs.weights[j] * h * haar_weight(id, g),
                 near_edge(xs.nodes[i], o.group_L) ||
                     near_edge(xs.nodes[j], o.group_L) ||
                     near_edge(m * h, o.group_L));
          }
      return s;
    }
    default:
      throw UnsupportedOperationError(
          "group_sampler: group transforms are provided for su2, axb, heis, "
          "m2, grelaud; the twisted/compact-factor variants are reached "
          "through their dual-side machinery");
  }
}

namespace {

void apply_kind(OperatorField& f, const GroupId& id, TransformKind kind) {
  if (kind == TransformKind::VN) return;
  double p = kind == TransformKind::L2 ? 0.5 : 1.0;
  f = map_field(f, [&id, p](const IrrepLabel& l, const TruncatedOperator& v) {
    RealVector k = duflo_moore_diag(id, l, v.basis);
    TruncatedOperator out = v;
    out.entries = v.entries * k.array().pow(p).matrix().cast<Complex>().asDiagonal();
    return out;
  });
}

// ---- per-group pi(f) builders -------------------------------------------

// An n-node rule on [-L, L] resolves phases e^{i omega x} only up to
// omega ~ n/L; past that the rule returns aliasing noise of order one while
// the true integral of a smooth compactly supported f is negligible.  Rows
// whose phase frequency exceeds this band are therefore set to zero instead
// of being filled with noise (which the Duflo-Moore weights would amplify).
double band_limit(int n, double L) { return static_cast<double>(n) / L; }

// diag-shift groups: accumulate F(i, i - m) += c_i for each lattice shift m
void add_shift_column(Matrix& F, const Eigen::Ref<const Vector>& c, int m) {
  int n = static_cast<int>(F.rows());
  for (int i = 0; i < n; ++i) {
    int j = i - m;
    if (j >= 0 && j < n) F(i, j) += c[i];
  }
}

TruncatedOperator axb_pi_f(const GroupFunction& f, int sign,
                           const BasisDescriptor& b,
                           const TransformOptions& o) {
  double h = std::log(b.nodes[1]) - std::log(b.nodes[0]);
  auto xs = gauss_legendre(o.group_n, -o.group_L, o.group_L);
  Matrix F = Matrix::Zero(b.size(), b.size());
  for (int m : lattice_shifts(h, o.group_L)) {
    double t = m * h;
    Vector col = Vector::Zero(b.size());
    for (int k = 0; k < xs.size(); ++k) {
      Complex fv = f(axb_element(xs.nodes[k], t)) * xs.weights[k] * h *
                   std::exp(-t);
      if (fv == Complex{}) continue;
      for (int i = 0; i < b.size(); ++i) {
        if (b.nodes[i] > band_limit(o.group_n, o.group_L)) break;
        col[i] += fv * std::exp(Complex(0.0, sign * xs.nodes[k] * b.nodes[i]));
      }
    }
    // pi(beta(x) alpha(t)) xi (psi_i) = e^{i sign x psi_i} xi_{i+m}
    for (int i = 0; i < b.size(); ++i) {
      int j = i + m;
      if (j >= 0 && j < b.size()) F(i, j) += col[i];
    }
  }
  return {F, b};
}

// Presampled data for the plane-times-lattice groups: f (with the Haar
// density folded in) over (plane node i, plane node j) for each lattice
// shift, so every dual label reuses the same samples.
struct PlaneLatticeSamples {
  QuadratureRule xs;          // shared 1-D rule for both plane coordinates
  std::vector<int> shifts;
  std::vector<Matrix> fm;     // fm[mi](i,j), weights included
  double h = 0.0;
  double omega_res = 0.0;     // resolvable phase frequency of xs
};

PlaneLatticeSamples plane_lattice_samples(
    const GroupFunction& f, const GroupId& id, double h,
    const TransformOptions& o) {
  PlaneLatticeSamples s;
  s.h = h;
  s.xs = gauss_legendre(o.group_n, -o.group_L, o.group_L);
  s.omega_res = band_limit(o.group_n, o.group_L);
  s.shifts = lattice_shifts(h, o.group_L);
  int n = s.xs.size();
  for (int m : s.shifts) {
    double t = m * h;
    Matrix fm(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        GroupElement g =
            id.tag == GroupTag::HEIS
                ? heis_element(s.xs.nodes[i], s.xs.nodes[j], t)
                : grelaud_element(Complex(s.xs.nodes[i], s.xs.nodes[j]), t);
        fm(i, j) = f(g) * s.xs.weights[i] * s.xs.weights[j] * h *
                   haar_weight(id, g);
      }
    s.fm.push_back(std::move(fm));
  }
  return s;
}

TruncatedOperator heis_pi_f(const PlaneLatticeSamples& s, double t,
                            const BasisDescriptor& b) {
  double h = b.spacing();
  int n = s.xs.size();
  Matrix F = Matrix::Zero(b.size(), b.size());
  Vector ez(n);
  for (int j = 0; j < n; ++j)
    ez[j] = std::exp(Complex(0.0, t * s.xs.nodes[j]));
  for (size_t mi = 0; mi < s.shifts.size(); ++mi) {
    Vector gm = s.fm[mi] * ez;  // integrates out z
    Vector col = Vector::Zero(b.size());
    // rows where the y-phase frequency |t psi_k| is out of band stay zero
    int klo = 0, khi = b.size() - 1;
    while (klo <= khi && std::abs(t * b.nodes[klo]) > s.omega_res) ++klo;
    while (khi >= klo && std::abs(t * b.nodes[khi]) > s.omega_res) --khi;
    for (int i = 0; i < n; ++i) {
      Complex c = gm[i];
      if (c == Complex{}) continue;
      // e^{-i t y psi_k} along the psi grid by phase recurrence
      Complex ph = std::exp(Complex(0.0, -t * s.xs.nodes[i] * b.nodes[klo]));
      Complex step = std::exp(Complex(0.0, -t * s.xs.nodes[i] * h));
      for (int k = klo; k <= khi; ++k) {
        col[k] += c * ph;
        ph *= step;
      }
    }
    add_shift_column(F, col, s.shifts[mi]);
  }
  return {F, b};
}

TruncatedOperator grelaud_pi_f(const PlaneLatticeSamples& s, double bpar,
                               const GroupId& id, const BasisDescriptor& b) {
  int n = s.xs.size();
  Matrix F = Matrix::Zero(b.size(), b.size());
  Complex wbar(id.params.a, -1.0);
  Matrix cols = Matrix::Zero(b.size(), static_cast<int>(s.shifts.size()));
  for (int k = 0; k < b.size(); ++k) {
    // e^{i b Re(conj(z) e^{-wbar psi_k})} = e^{i b (x c + y s)}
    Complex e = std::exp(-wbar * b.nodes[k]);
    if (bpar * std::abs(e) > s.omega_res) continue;
    double cp = e.real(), sp = e.imag();  // Re[(x-iy)(c+is)] = x c + y s
    Vector ex(n), ey(n);
    for (int i = 0; i < n; ++i) {
      ex[i] = std::exp(Complex(0.0, bpar * s.xs.nodes[i] * cp));
      ey[i] = std::exp(Complex(0.0, bpar * s.xs.nodes[i] * sp));
    }
    for (size_t mi = 0; mi < s.shifts.size(); ++mi) {
      Vector tmp = s.fm[mi] * ey;
      cols(k, static_cast<int>(mi)) = ex.cwiseProduct(tmp).sum();
    }
  }
  for (size_t mi = 0; mi < s.shifts.size(); ++mi)
    add_shift_column(F, cols.col(static_cast<int>(mi)), s.shifts[mi]);
  return {F, b};
}

Matrix su2_pi_f(const GroupFunction& f, int dim, const GroupId& id,
                const TransformOptions& o) {
  auto s = group_sampler(id, o);
  Matrix F = Matrix::Zero(dim, dim);
  auto basis = BasisDescriptor::weight(dim);
  auto lab = su2_label(dim);
  for (size_t i = 0; i < s.points.size(); ++i) {
    Complex fv = f(s.points[i]);
    if (fv == Complex{}) continue;
    F += (s.weights[i] * fv) *
         rep_matrix(id, lab, s.points[i], basis).entries;
  }
  return F;
}

// M2 family: angle modes first, then one Bessel array per (v, rho).
struct M2Samples {
  QuadratureRule vs;
  std::vector<Vector> modes;  // modes[i*nv+j][n+N] = f_n(v_ij)
  int N;
};

M2Samples m2_modes(const GroupFunction& f, int N, const TransformOptions& o) {
  M2Samples s;
  s.N = N;
  s.vs = gauss_legendre(o.group_n, -o.group_L, o.group_L);
  auto al = periodic_trapezoid(std::max(o.angle_n, 4 * N + 4), 0.0, kTwoPi);
  int nv = s.vs.size();
  s.modes.assign(nv * nv, Vector::Zero(2 * N + 1));
  for (int i = 0; i < nv; ++i)
    for (int j = 0; j < nv; ++j) {
      Vector& md = s.modes[i * nv + j];
      for (int k = 0; k < al.size(); ++k) {
        Complex fv = f(m2_element(s.vs.nodes[i], s.vs.nodes[j],
                                  al.nodes[k]));
        if (fv == Complex{}) continue;
        for (int n = -N; n <= N; ++n)
          md[n + N] += fv * al.weights[k] / kTwoPi *
                       std::exp(Complex(0.0, -n * al.nodes[k]));
      }
    }
  return s;
}

Matrix m2_pi_f(const M2Samples& s, double rho) {
  int N = s.N, nv = s.vs.size();
  Matrix F = Matrix::Zero(2 * N + 1, 2 * N + 1);
  const Complex I(0.0, 1.0);
  for (int i = 0; i < nv; ++i)
    for (int j = 0; j < nv; ++j) {
      const Vector& md = s.modes[i * nv + j];
      if (md.cwiseAbs().maxCoeff() == 0.0) continue;
      double x = s.vs.nodes[i], y = s.vs.nodes[j];
      double r = std::hypot(x, y), phi = r > 0 ? std::atan2(y, x) : 0.0;
      double wv = s.vs.weights[i] * s.vs.weights[j] / kTwoPi;
      auto jn = bessel_j_array(2 * N, rho * r);
      // c_k = i^k e^{-ik phi} J_k(rho r), k = -2N..2N
      Vector ck(4 * N + 1);
      for (int k = -2 * N; k <= 2 * N; ++k) {
        double jk = k >= 0 ? jn[k] : (k % 2 ? -jn[-k] : jn[-k]);
        ck[k + 2 * N] = std::exp(I * (kPi / 2.0 - phi) *
                                 static_cast<double>(k)) * jk;
      }
      for (int m = -N; m <= N; ++m)
        for (int n = -N; n <= N; ++n)
          F(m + N, n + N) += wv * md[n + N] * ck[m - n + 2 * N];
    }
  return F;
}

}  // namespace

OperatorField fourier(const GroupId& id, const GroupFunction& f,
                      TransformKind kind, const TransformOptions& o) {
  validate(id);
  PlancherelMeasure pm = plancherel(id, o.window);
  OperatorField out;
  out.group = id;
  switch (id.tag) {
    case GroupTag::SU2:
      for (const auto& a : pm.atoms)
        out.atoms.push_back(
            {a.label, a.weight,
             {su2_pi_f(f, a.label.dim, id, o),
              BasisDescriptor::weight(a.label.dim)}});
      break;
    case GroupTag::AXB: {
      auto b = BasisDescriptor::log_grid(o.rep.grid_n, o.rep.window_L);
      for (const auto& a : pm.atoms)
        out.atoms.push_back({a.label, a.weight,
                             axb_pi_f(f, a.label.sign, b, o)});
      break;
    }
    case GroupTag::HEIS: {
      auto b = BasisDescriptor::uniform_grid(o.rep.grid_n, o.rep.window_L);
      auto s = plane_lattice_samples(f, id, b.spacing(), o);
      for (const auto& c : pm.continuum) {
        FieldComponent fc;
        fc.measure = c;
        for (int i = 0; i < c.size(); ++i)
          fc.values.push_back(heis_pi_f(s, c.rule.nodes[i], b));
        out.components.push_back(std::move(fc));
      }
      break;
    }
    case GroupTag::M2: {
      int N = o.rep.trunc_n;
      auto b = BasisDescriptor::trig(N);
      M2Samples s = m2_modes(f, N, o);
      for (const auto& c : pm.continuum) {
        FieldComponent fc;
        fc.measure = c;
        for (int i = 0; i < c.size(); ++i)
          fc.values.push_back({m2_pi_f(s, c.rule.nodes[i]), b});
        out.components.push_back(std::move(fc));
      }
      break;
    }
    case GroupTag::GRELAUD: {
      auto b = BasisDescriptor::uniform_grid(o.rep.grid_n, o.rep.window_L);
      auto s = plane_lattice_samples(f, id, b.spacing(), o);
      for (const auto& c : pm.continuum) {
        FieldComponent fc;
        fc.measure = c;
        for (int i = 0; i < c.size(); ++i)
          fc.values.push_back(grelaud_pi_f(s, c.rule.nodes[i], id, b));
        out.components.push_back(std::move(fc));
      }
      break;
    }
    default:
      throw UnsupportedOperationError(
          "fourier: group transforms are provided for su2, axb, heis, m2, "
          "grelaud");
  }
  apply_kind(out, id, kind);
  return out;
}

namespace {

// tr(pi^* V) with respect to the basis inner product
Complex pair_trace(const TruncatedOperator& p, const TruncatedOperator& v) {
  if (p.basis.kind != BasisKind::Grid)
    return (p.entries.conjugate().cwiseProduct(v.entries)).sum();
  const RealVector& w = p.basis.weights;
  Complex acc = 0.0;
  for (int i = 0; i < p.size(); ++i)
    for (int j = 0; j < p.size(); ++j) {
      Complex pv = p.entries(i, j);
      if (pv == Complex{}) continue;
      acc += std::conj(pv) * v.entries(i, j) * (w[i] / w[j]);
    }
  return acc;
}

}  // namespace

Complex inverse_A(const GroupId& id, const OperatorField& t,
                  const GroupElement& x) {
  Complex acc = 0.0;
  for (const auto& a : t.atoms) {
    auto p = rep_matrix(id, a.label, x, a.value.basis);
    acc += a.weight * pair_trace(p, a.value);
  }
  for (const auto& c : t.components)
    for (int i = 0; i < c.measure.size(); ++i) {
      auto lab = c.measure.label_of(c.measure.rule.nodes[i]);
      auto p = rep_matrix(id, lab, x, c.values[i].basis);
      acc += c.measure.nu_mass(i) * pair_trace(p, c.values[i]);
    }
  return acc;
}

double a_norm(const GroupId& id, const GroupFunction& f,
              const TransformOptions& o) {
  return field_norm(fourier(id, f, TransformKind::FA, o), FieldNorm::B1);
}

ParsevalReport parseval_check(const GroupId& id, const GroupFunction& f,
                              const TransformOptions& o) {
  ParsevalReport r;
  auto s = group_sampler(id, o);
  r.lhs = std::sqrt(s.norm_sq(f));
  r.group_tail = s.edge_fraction(f);
  OperatorField t = fourier(id, f, TransformKind::L2, o);
  r.rhs = field_norm(t, FieldNorm::B2);
  double total = 0.0, edge = 0.0;
  for (const auto& c : t.components)
    for (int i = 0; i < c.measure.size(); ++i) {
      double hs = op_norm(c.values[i], OperatorNorm::HilbertSchmidt);
      double m = c.measure.nu_mass(i) * hs * hs;
      total += m;
      double p = c.measure.rule.nodes[i];
      double width = c.measure.hi - c.measure.lo;
      if (p > c.measure.hi - 0.1 * width || p < c.measure.lo + 0.1 * width)
        edge += m;
    }
  r.dual_tail = total > 0 ? edge / total : 0.0;
  r.rel_err = std::abs(r.lhs - r.rhs) / std::max(r.lhs, 1e-300);
  return r;
}

}  // namespace ncfa
