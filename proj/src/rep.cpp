#include "ncfa/rep.hpp"

#include <cmath>

#include "ncfa/bessel.hpp"
#include "ncfa/error.hpp"

namespace ncfa {

BasisDescriptor model_basis(const GroupId& id, const IrrepLabel& l,
                            const RepOptions& o) {
  switch (l.kind) {
    case IrrepLabel::Kind::Su2Dim:
      return BasisDescriptor::weight(l.dim);
    case IrrepLabel::Kind::AxbSign:
      return BasisDescriptor::log_grid(o.grid_n, o.window_L);
    case IrrepLabel::Kind::HeisT:
      return BasisDescriptor::uniform_grid(o.grid_n, o.window_L);
    case IrrepLabel::Kind::GrelaudB:
      return BasisDescriptor::uniform_grid(o.grid_n, o.window_L);
    case IrrepLabel::Kind::M2Rho:
    case IrrepLabel::Kind::TRho:
      return BasisDescriptor::trig(o.trunc_n);
    case IrrepLabel::Kind::CharN:
    case IrrepLabel::Kind::PlanarChar:
      return BasisDescriptor::trig(0);
  }
  throw UnsupportedOperationError("model_basis: unknown label kind");
  (void)id;
}

namespace {

int lattice_shift(double x, const BasisDescriptor& b, const char* what) {
  double h = b.spacing();
  double m = x / h;
  double r = std::round(m);
  if (std::abs(m - r) > 1e-9)
    throw GridIncompatibleError(std::string(what) +
                                ": shift is off the model lattice");
  return static_cast<int>(r);
}

// diag(d) * lattice-shift by m:  (A xi)_i = d_i xi_{i+m}
Matrix diag_shift(const Vector& d, int m) {
  int n = static_cast<int>(d.size());
  Matrix a = Matrix::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    int j = i + m;
    if (j >= 0 && j < n) a(i, j) = d[i];
  }
  return a;
}

Matrix su2_matrix(int dim, const Eigen::Matrix2cd& u) {
  // (pi(g) e_n)(z) = e_n(g^{-1} z); expand binomially in the weight basis.
  Eigen::Matrix2cd gi = u.adjoint();
  int d = dim;
  std::vector<double> fact(d + 1, 1.0);
  for (int k = 1; k <= d; ++k) fact[k] = fact[k - 1] * k;
  auto choose = [&](int n, int k) { return fact[n] / (fact[k] * fact[n - k]); };
  Matrix out = Matrix::Zero(d, d);
  Complex a = gi(0, 0), b = gi(0, 1), c = gi(1, 0), e = gi(1, 1);
  for (int n = 0; n < d; ++n) {
    int l = d - 1 - n;  // e_n ~ z1^n z2^l / sqrt(n! l!)
    // (a z1 + b z2)^n (c z1 + e z2)^l
    for (int i = 0; i <= n; ++i)
      for (int j = 0; j <= l; ++j) {
        int m = i + j;  // z1-degree of the product term
        Complex coef = choose(n, i) * choose(l, j) * std::pow(a, i) *
                       std::pow(b, n - i) * std::pow(c, j) *
                       std::pow(e, l - j);
        // renormalize: z1^m z2^{d-1-m} = sqrt(m! (d-1-m)!) e_m
        double nm = std::sqrt(fact[m] * fact[d - 1 - m]) /
                    std::sqrt(fact[n] * fact[l]);
        out(m, n) += coef * nm;
      }
  }
  return out;
}

}  // namespace

TruncatedOperator su2_dpi(int dim, const Eigen::Matrix2cd& X) {
  Eigen::Matrix2cd herm = Complex(0.0, 1.0) * X;
  if ((herm - herm.adjoint()).cwiseAbs().maxCoeff() > 1e-12 ||
      std::abs(X.trace()) > 1e-12)
    throw UnsupportedDirectionError("su2_dpi: X must be in su(2)");
  int d = dim;
  TruncatedOperator out = TruncatedOperator::zero(BasisDescriptor::weight(d));
  // d/ds e_k(exp(-sX) z)|_0 = -(Xz).grad e_k
  for (int k = 0; k < d; ++k) {
    int l = d - 1 - k;
    out.entries(k, k) = -(static_cast<double>(k) * X(0, 0) +
                          static_cast<double>(l) * X(1, 1));
    if (k >= 1)
      out.entries(k - 1, k) = -X(0, 1) * std::sqrt(static_cast<double>(k) *
                                                   (l + 1));
    if (k + 1 < d)
      out.entries(k + 1, k) = -X(1, 0) * std::sqrt(static_cast<double>(l) *
                                                   (k + 1));
  }
  return out;
}

TruncatedOperator rep_matrix(const GroupId& id, const IrrepLabel& l,
                             const GroupElement& g, const BasisDescriptor& b) {
  validate(id);
  TruncatedOperator out = TruncatedOperator::zero(b);
  switch (l.kind) {
    case IrrepLabel::Kind::Su2Dim:
      if (b.kind != BasisKind::Weight || b.dim != l.dim)
        throw InvalidOperandError("rep_matrix: basis/label mismatch");
      out.entries = su2_matrix(l.dim, g.u);
      return out;

    case IrrepLabel::Kind::AxbSign: {
      if (b.kind != BasisKind::Grid)
        throw InvalidOperandError("rep_matrix: grid basis required");
      // log grid: shift in u = log(psi)
      double u0 = std::log(b.nodes[0]), u1 = std::log(b.nodes[1]);
      double h = u1 - u0;
      double m = g.s / h, r = std::round(m);
      if (std::abs(m - r) > 1e-9)
        throw GridIncompatibleError("axb: t is off the model lattice");
      Vector d(b.size());
      for (int i = 0; i < b.size(); ++i)
        d[i] = std::exp(Complex(0.0, l.sign * g.v[0] * b.nodes[i]));
      out.entries = diag_shift(d, static_cast<int>(r));
      return out;
    }

    case IrrepLabel::Kind::HeisT: {
      if (b.kind != BasisKind::Grid)
        throw InvalidOperandError("rep_matrix: grid basis required");
      int m = lattice_shift(g.s, b, "heis");
      Complex central;
      if (l.group == GroupTag::HEIS_K)
        central = gamma_character(l, g);
      else
        central = std::exp(Complex(0.0, l.t * g.v[1]));
      Vector d(b.size());
      for (int i = 0; i < b.size(); ++i)
        d[i] = central * std::exp(Complex(0.0, -l.t * g.v[0] * b.nodes[i]));
      out.entries = diag_shift(d, -m);  // xi(psi - x)
      return out;
    }

    case IrrepLabel::Kind::GrelaudB: {
      if (b.kind != BasisKind::Grid)
        throw InvalidOperandError("rep_matrix: grid basis required");
      int m = lattice_shift(g.s, b, "grelaud");
      Complex wbar(id.params.a, -1.0);
      Complex z(g.v[0], g.v[1]);
      Vector d(b.size());
      for (int i = 0; i < b.size(); ++i) {
        double phase = l.b * (std::conj(z) * std::exp(-wbar * b.nodes[i])).real();
        d[i] = std::exp(Complex(0.0, phase));
      }
      out.entries = diag_shift(d, -m);  // xi(psi - t)
      return out;
    }

    case IrrepLabel::Kind::M2Rho:
    case IrrepLabel::Kind::TRho: {
      if (b.kind != BasisKind::Trig)
        throw InvalidOperandError("rep_matrix: trig basis required");
      double alpha, r, phi;
      Complex twist = 1.0;
      if (l.group == GroupTag::M2_K) {
        alpha = compact_angle(id, g);
        twist = gamma_character(l, g);
      } else if (l.group == GroupTag::M2_TILDE) {
        alpha = g.s;
        twist = std::exp(Complex(0.0, l.t * g.s));
      } else {
        alpha = g.s;
      }
      r = g.v.norm();
      phi = r > 0 ? std::atan2(g.v[1], g.v[0]) : 0.0;
      int N = b.trunc_n;
      auto jn = bessel_j_array(2 * N, l.rho * r);
      const Complex I(0.0, 1.0);
      for (int m = -N; m <= N; ++m)
        for (int n = -N; n <= N; ++n) {
          int k = m - n;
          double jk = k >= 0 ? jn[k] : (k % 2 ? -jn[-k] : jn[-k]);
          Complex ipow = std::exp(I * (kPi / 2.0) * static_cast<double>(k));
          out.at(m, n) = twist * ipow *
                         std::exp(-I * static_cast<double>(k) * phi) * jk *
                         std::exp(-I * static_cast<double>(n) * alpha);
        }
      return out;
    }

    case IrrepLabel::Kind::CharN: {
      double alpha = l.group == GroupTag::M2_K ? compact_angle(id, g) : g.s;
      out.entries(0, 0) = std::exp(Complex(0.0, -l.n * alpha));
      return out;
    }

    case IrrepLabel::Kind::PlanarChar: {
      out.entries(0, 0) =
          std::exp(Complex(0.0, l.w[0] * g.v[0] + l.w[1] * g.s));
      return out;
    }
  }
  throw UnsupportedOperationError("rep_matrix: unknown label kind");
}

RealVector duflo_moore_diag(const GroupId& id, const IrrepLabel& l,
                            const BasisDescriptor& b) {
  RealVector d = RealVector::Ones(b.size());
  if (l.kind == IrrepLabel::Kind::AxbSign) {
    d = b.nodes;
  } else if (l.kind == IrrepLabel::Kind::GrelaudB) {
    for (int i = 0; i < b.size(); ++i)
      d[i] = std::exp(-2.0 * id.params.a * b.nodes[i]);
  }
  return d;
}

}  // namespace ncfa
