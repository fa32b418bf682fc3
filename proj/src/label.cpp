#include "ncfa/label.hpp"

#include <cmath>
#include <sstream>

#include "ncfa/error.hpp"

namespace ncfa {

std::string IrrepLabel::key() const {
  std::ostringstream os;
  os.precision(12);
  switch (kind) {
    case Kind::Su2Dim: os << "d=" << dim; break;
    case Kind::AxbSign: os << "sign=" << (sign > 0 ? "+" : "-"); break;
    case Kind::HeisT: os << "t=" << t; break;
    case Kind::M2Rho: os << "rho=" << rho; break;
    case Kind::CharN: os << "n=" << n; break;
    case Kind::TRho: os << "t=" << t << ";rho=" << rho; break;
    case Kind::GrelaudB: os << "b=" << b; break;
    case Kind::PlanarChar: os << "w=" << w[0] << "," << w[1]; break;
  }
  return os.str();
}

IrrepLabel su2_label(int dim) {
  if (dim < 1) throw InvalidOperandError("su2 label: dim >= 1");
  IrrepLabel l;
  l.group = GroupTag::SU2;
  l.kind = IrrepLabel::Kind::Su2Dim;
  l.dim = dim;
  return l;
}

IrrepLabel axb_label(int sign) {
  IrrepLabel l;
  l.group = GroupTag::AXB;
  l.kind = IrrepLabel::Kind::AxbSign;
  l.sign = sign >= 0 ? +1 : -1;
  return l;
}

IrrepLabel heis_label(double t) {
  if (t == 0.0)
    throw ExcludedParameterError("heis label: t = 0 is excluded");
  IrrepLabel l;
  l.group = GroupTag::HEIS;
  l.kind = IrrepLabel::Kind::HeisT;
  l.t = t;
  return l;
}

namespace {
double gamma_value(const GroupId& id, const IntVector& gcoef) {
  if (gcoef.size() != static_cast<Eigen::Index>(id.params.gamma.size()))
    throw InvalidOperandError("gamma coefficients do not match generators");
  double t = 0.0;
  for (int j = 0; j < gcoef.size(); ++j) t += gcoef[j] * id.params.gamma[j];
  return t;
}
}  // namespace

IrrepLabel heis_k_label(const GroupId& id, const IntVector& gcoef) {
  IrrepLabel l;
  l.group = GroupTag::HEIS_K;
  l.kind = IrrepLabel::Kind::HeisT;
  l.gcoef = gcoef;
  l.t = gamma_value(id, gcoef);
  if (l.t == 0.0)
    throw ExcludedParameterError("heis-k label: t = 0 is excluded");
  return l;
}

IrrepLabel m2_label(double rho) {
  if (!(rho > 0.0)) throw InvalidOperandError("m2 label: rho > 0");
  IrrepLabel l;
  l.group = GroupTag::M2;
  l.kind = IrrepLabel::Kind::M2Rho;
  l.rho = rho;
  return l;
}

IrrepLabel char_label(int n) {
  IrrepLabel l;
  l.group = GroupTag::M2;
  l.kind = IrrepLabel::Kind::CharN;
  l.n = n;
  return l;
}

IrrepLabel m2_tilde_label(double t, double rho) {
  if (!(rho > 0.0)) throw InvalidOperandError("m2-tilde label: rho > 0");
  IrrepLabel l;
  l.group = GroupTag::M2_TILDE;
  l.kind = IrrepLabel::Kind::TRho;
  l.t = t;
  l.rho = rho;
  return l;
}

IrrepLabel m2_k_label(const GroupId& id, const IntVector& gcoef, double rho) {
  if (!(rho > 0.0)) throw InvalidOperandError("m2-k label: rho > 0");
  IrrepLabel l;
  l.group = GroupTag::M2_K;
  l.kind = IrrepLabel::Kind::TRho;
  l.gcoef = gcoef;
  l.t = gamma_value(id, gcoef);
  l.rho = rho;
  return l;
}

IrrepLabel grelaud_label(double b) {
  IrrepLabel l;
  l.group = GroupTag::GRELAUD;
  l.kind = IrrepLabel::Kind::GrelaudB;
  l.b = b;
  return l;
}

Complex gamma_character(const IrrepLabel& l, const GroupElement& g) {
  if (l.gcoef.size() == 0) throw InvalidOperandError("label has no gamma data");
  if (g.kappa.size() != l.gcoef.size())
    throw InvalidOperandError("element compact coordinate mismatch");
  Complex v = 1.0;
  for (int j = 0; j < l.gcoef.size(); ++j) {
    int c = l.gcoef[j];
    Complex base = g.kappa[j];
    Complex p = 1.0;
    for (int k = 0; k < std::abs(c); ++k) p *= base;
    v *= c >= 0 ? p : std::conj(p);
  }
  return v;
}

}  // namespace ncfa
