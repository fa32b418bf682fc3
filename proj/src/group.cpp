#include "ncfa/group.hpp"

#include <cmath>

namespace ncfa {

std::string group_name(GroupTag tag) {
  switch (tag) {
    case GroupTag::SU2: return "su2";
    case GroupTag::AXB: return "axb";
    case GroupTag::HEIS: return "heis";
    case GroupTag::HEIS_K: return "heis-k";
    case GroupTag::M2: return "m2";
    case GroupTag::M2_TILDE: return "m2-tilde";
    case GroupTag::M2_K: return "m2-k";
    case GroupTag::GRELAUD: return "grelaud";
  }
  return "?";
}

GroupTag parse_group(const std::string& name) {
  for (GroupTag t :
       {GroupTag::SU2, GroupTag::AXB, GroupTag::HEIS, GroupTag::HEIS_K,
        GroupTag::M2, GroupTag::M2_TILDE, GroupTag::M2_K, GroupTag::GRELAUD})
    if (group_name(t) == name) return t;
  throw ConfigError("unknown group: " + name);
}

namespace {

bool has_compact_factor(GroupTag t) {
  return t == GroupTag::HEIS_K || t == GroupTag::M2_K;
}

int generator_one_index(const GroupParams& p) {
  for (size_t j = 0; j < p.gamma.size(); ++j)
    if (std::abs(p.gamma[j] - 1.0) < 1e-12) return static_cast<int>(j);
  throw InvalidOperandError("gamma must contain the generator 1");
}

Vector phi0_chars(const GroupParams& p, double z) {
  Vector k(p.gamma.size());
  for (size_t j = 0; j < p.gamma.size(); ++j)
    k[j] = std::exp(Complex(0.0, p.gamma[j] * z));
  return k;
}

double mod_2pi(double a) {
  double r = std::fmod(a, kTwoPi);
  return r < 0 ? r + kTwoPi : r;
}

}  // namespace

void validate(const GroupId& id) {
  if (id.tag == GroupTag::GRELAUD && !(id.params.a > 0.0))
    throw InvalidOperandError("grelaud: parameter a must be positive");
  if (has_compact_factor(id.tag)) {
    if (id.params.gamma.empty())
      throw InvalidOperandError("compact factor needs generators");
    for (double g : id.params.gamma)
      if (g == 0.0) throw InvalidOperandError("gamma generators must be nonzero");
    generator_one_index(id.params);
  }
}

GroupElement identity_element(const GroupId& id) {
  GroupElement e;
  e.tag = id.tag;
  if (has_compact_factor(id.tag))
    e.kappa = Vector::Ones(static_cast<int>(id.params.gamma.size()));
  return e;
}

GroupElement su2_element(const Eigen::Matrix2cd& u) {
  GroupElement g;
  g.tag = GroupTag::SU2;
  g.u = u;
  return g;
}

GroupElement su2_euler(double phi, double theta, double psi) {
  auto zrot = [](double a) {
    Eigen::Matrix2cd m = Eigen::Matrix2cd::Zero();
    m(0, 0) = std::exp(Complex(0.0, 0.5 * a));
    m(1, 1) = std::exp(Complex(0.0, -0.5 * a));
    return m;
  };
  Eigen::Matrix2cd y = Eigen::Matrix2cd::Zero();
  y(0, 0) = std::cos(0.5 * theta);
  y(0, 1) = -std::sin(0.5 * theta);
  y(1, 0) = std::sin(0.5 * theta);
  y(1, 1) = std::cos(0.5 * theta);
  return su2_element(zrot(phi) * y * zrot(psi));
}

GroupElement axb_element(double x, double t) {
  GroupElement g;
  g.tag = GroupTag::AXB;
  g.v[0] = x;
  g.s = t;
  return g;
}

GroupElement heis_element(double y, double z, double x) {
  GroupElement g;
  g.tag = GroupTag::HEIS;
  g.v = {y, z};
  g.s = x;
  return g;
}

GroupElement m2_element(double vx, double vy, double alpha) {
  GroupElement g;
  g.tag = GroupTag::M2;
  g.v = {vx, vy};
  g.s = mod_2pi(alpha);
  return g;
}

GroupElement m2_tilde_element(double vx, double vy, double alpha) {
  GroupElement g;
  g.tag = GroupTag::M2_TILDE;
  g.v = {vx, vy};
  g.s = alpha;
  return g;
}

GroupElement grelaud_element(Complex z, double t) {
  GroupElement g;
  g.tag = GroupTag::GRELAUD;
  g.v = {z.real(), z.imag()};
  g.s = t;
  return g;
}

GroupElement heis_k_element(const GroupId& id, double y, double z, double x) {
  GroupElement g;
  g.tag = GroupTag::HEIS_K;
  g.v = {y, 0.0};
  g.s = x;
  g.kappa = phi0_chars(id.params, z);
  return g;
}

GroupElement m2_k_element(const GroupId& id, double vx, double vy, double z) {
  GroupElement g;
  g.tag = GroupTag::M2_K;
  g.v = {vx, vy};
  g.kappa = phi0_chars(id.params, z);
  return g;
}

double compact_angle(const GroupId& id, const GroupElement& g) {
  int j = generator_one_index(id.params);
  return mod_2pi(std::arg(g.kappa[j]));
}

namespace {

Eigen::Vector2d rotate(double a, const Eigen::Vector2d& v) {
  double c = std::cos(a), s = std::sin(a);
  return {c * v[0] - s * v[1], s * v[0] + c * v[1]};
}

}  // namespace

GroupElement multiply(const GroupId& id, const GroupElement& g,
                      const GroupElement& h) {
  if (g.tag != id.tag || h.tag != id.tag)
    throw InvalidOperandError("multiply: element/group mismatch");
  GroupElement r = g;
  switch (id.tag) {
    case GroupTag::SU2:
      r.u = g.u * h.u;
      break;
    case GroupTag::AXB:
      r.v[0] = g.v[0] + std::exp(g.s) * h.v[0];
      r.s = g.s + h.s;
      break;
    case GroupTag::HEIS:
      r.v[0] = g.v[0] + h.v[0];
      r.v[1] = g.v[1] + h.v[1] + g.s * h.v[0];
      r.s = g.s + h.s;
      break;
    case GroupTag::HEIS_K: {
      r.v[0] = g.v[0] + h.v[0];
      r.s = g.s + h.s;
      Vector extra = phi0_chars(id.params, g.s * h.v[0]);
      r.kappa = g.kappa.cwiseProduct(h.kappa).cwiseProduct(extra);
      break;
    }
    case GroupTag::M2:
    case GroupTag::M2_TILDE:
      r.v = g.v + rotate(g.s, h.v);
      r.s = g.s + h.s;
      if (id.tag == GroupTag::M2) r.s = mod_2pi(r.s);
      break;
    case GroupTag::M2_K: {
      double a = compact_angle(id, g);
      r.v = g.v + rotate(a, h.v);
      r.kappa = g.kappa.cwiseProduct(h.kappa);
      break;
    }
    case GroupTag::GRELAUD: {
      Complex w(id.params.a, 1.0);
      Complex z1(g.v[0], g.v[1]), z2(h.v[0], h.v[1]);
      Complex z = z1 + std::exp(w * g.s) * z2;
      r.v = {z.real(), z.imag()};
      r.s = g.s + h.s;
      break;
    }
  }
  return r;
}

GroupElement inverse(const GroupId& id, const GroupElement& g) {
  GroupElement r = g;
  switch (id.tag) {
    case GroupTag::SU2:
      r.u = g.u.adjoint();
      break;
    case GroupTag::AXB:
      r.v[0] = -std::exp(-g.s) * g.v[0];
      r.s = -g.s;
      break;
    case GroupTag::HEIS:
      r.v[0] = -g.v[0];
      r.v[1] = -g.v[1] + g.s * g.v[0];
      r.s = -g.s;
      break;
    case GroupTag::HEIS_K: {
      r.v[0] = -g.v[0];
      r.s = -g.s;
      Vector extra = phi0_chars(id.params, g.s * g.v[0]);
      r.kappa = g.kappa.conjugate().cwiseProduct(extra);
      break;
    }
    case GroupTag::M2:
    case GroupTag::M2_TILDE:
      r.v = rotate(-g.s, -g.v);
      r.s = id.tag == GroupTag::M2 ? mod_2pi(-g.s) : -g.s;
      break;
    case GroupTag::M2_K: {
      double a = compact_angle(id, g);
      r.v = rotate(-a, -g.v);
      r.kappa = g.kappa.conjugate();
      break;
    }
    case GroupTag::GRELAUD: {
      Complex w(id.params.a, 1.0);
      Complex z(g.v[0], g.v[1]);
      Complex zi = -std::exp(-w * g.s) * z;
      r.v = {zi.real(), zi.imag()};
      r.s = -g.s;
      break;
    }
  }
  return r;
}

bool approx_equal(const GroupId& id, const GroupElement& g,
                  const GroupElement& h, double tol) {
  if (g.tag != h.tag) return false;
  switch (id.tag) {
    case GroupTag::SU2:
      return (g.u - h.u).cwiseAbs().maxCoeff() < tol;
    case GroupTag::M2: {
      double da = std::abs(mod_2pi(g.s - h.s + kPi) - kPi);
      return (g.v - h.v).norm() < tol && da < tol;
    }
    case GroupTag::HEIS_K:
    case GroupTag::M2_K:
      return (g.v - h.v).norm() < tol && std::abs(g.s - h.s) < tol &&
             (g.kappa - h.kappa).cwiseAbs().maxCoeff() < tol;
    default:
      return (g.v - h.v).norm() < tol && std::abs(g.s - h.s) < tol;
  }
}

double haar_weight(const GroupId& id, const GroupElement& g) {
  switch (id.tag) {
    case GroupTag::SU2: {
      // Euler chart density sin(theta)/(16 pi^2); sin(theta) = 2|u00||u10|
      double st = 2.0 * std::abs(g.u(0, 0)) * std::abs(g.u(1, 0));
      return st / (16.0 * kPi * kPi);
    }
    case GroupTag::AXB:
      return std::exp(-g.s);
    case GroupTag::HEIS:
    case GroupTag::HEIS_K:
      return 1.0;
    case GroupTag::M2:
    case GroupTag::M2_TILDE:
    case GroupTag::M2_K:
      return 1.0 / kFourPiSq;
    case GroupTag::GRELAUD:
      return std::exp(-2.0 * id.params.a * g.s);
  }
  return 1.0;
}

double modular(const GroupId& id, const GroupElement& g) {
  switch (id.tag) {
    case GroupTag::AXB:
      return std::exp(-g.s);
    case GroupTag::GRELAUD:
      return std::exp(-2.0 * id.params.a * g.s);
    default:
      return 1.0;
  }
}

GroupElement exp_direction(const GroupId& id, const Direction& d, double s) {
  switch (id.tag) {
    case GroupTag::SU2: {
      // X skew-Hermitian: diagonalize iX (Hermitian), exponentiate
      Eigen::Matrix2cd herm = Complex(0.0, 1.0) * d.su2_x;
      if ((herm - herm.adjoint()).cwiseAbs().maxCoeff() > 1e-12)
        throw UnsupportedDirectionError("su2 direction must be skew-Hermitian");
      Eigen::SelfAdjointEigenSolver<Eigen::Matrix2cd> es(herm);
      Eigen::Vector2cd ph;
      for (int k = 0; k < 2; ++k)
        ph[k] = std::exp(Complex(0.0, -s * es.eigenvalues()[k]));
      return su2_element(es.eigenvectors() * ph.asDiagonal() *
                         es.eigenvectors().adjoint());
    }
    case GroupTag::AXB:
      return axb_element(s * d.vec[0], 0.0);
    case GroupTag::HEIS:
      if (!d.central)
        throw UnsupportedDirectionError("heis: central direction only");
      return heis_element(0.0, s, 0.0);
    case GroupTag::HEIS_K:
      if (!d.central)
        throw UnsupportedDirectionError("heis-k: central direction only");
      return heis_k_element(id, 0.0, s, 0.0);
    case GroupTag::M2:
      return m2_element(s * d.vec[0], s * d.vec[1], 0.0);
    case GroupTag::M2_TILDE:
      return m2_tilde_element(s * d.vec[0], s * d.vec[1], 0.0);
    case GroupTag::M2_K:
      return m2_k_element(id, s * d.vec[0], s * d.vec[1], 0.0);
    case GroupTag::GRELAUD:
      return grelaud_element(Complex(s * d.vec[0], s * d.vec[1]), 0.0);
  }
  throw UnsupportedDirectionError("exp_direction: unsupported group");
}

}  // namespace ncfa
