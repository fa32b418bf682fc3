#pragma once

#include <string>
#include <vector>

#include "ncfa/error.hpp"
#include "ncfa/types.hpp"

namespace ncfa {

enum class GroupTag { SU2, AXB, HEIS, HEIS_K, M2, M2_TILDE, M2_K, GRELAUD };

std::string group_name(GroupTag tag);
GroupTag parse_group(const std::string& name);

struct GroupParams {
  double a = 0.5;                     // Grelaud parameter, a > 0
  std::vector<double> gamma = {1.0};  // generators of the compact dual lattice
};

struct GroupId {
  GroupTag tag = GroupTag::SU2;
  GroupParams params;
};

// Validates params for the tag (a > 0; gamma nonzero and containing 1 where a
// rotation angle must be recoverable).
void validate(const GroupId& id);

// One element chart per group:
//   SU2       u in SU(2)
//   AXB       (x, t): element beta(x) alpha(t); product law
//             beta(x1)alpha(t1) beta(x2)alpha(t2) = beta(x1+e^{t1}x2)alpha(t1+t2)
//   HEIS      (y, z, x) with (y1,z1,x1)(y2,z2,x2) = (y1+y2, z1+z2+x1 y2, x1+x2)
//   HEIS_K    same, but the central coordinate lives in the compact factor and
//             is stored as character values kappa_j = chi_{gamma_j}(k)
//   M2        (v, alpha): v in R^2, alpha an angle mod 2pi; (v1,a1)(v2,a2) =
//             (v1 + R(a1) v2, a1+a2)
//   M2_TILDE  same with alpha in R (universal cover)
//   M2_K      (v, k) with k in the compact factor, stored as kappa
//   GRELAUD   (z, t): z in C ~ R^2, (z1,t1)(z2,t2) = (z1 + e^{w t1} z2, t1+t2),
//             w = a + i
struct GroupElement {
  GroupTag tag = GroupTag::SU2;
  Eigen::Matrix2cd u = Eigen::Matrix2cd::Identity();
  Eigen::Vector2d v = Eigen::Vector2d::Zero();  // (x,.)/(y,z)/v/z
  double s = 0.0;                               // t / x / alpha
  Vector kappa;                                 // compact coordinate
};

GroupElement identity_element(const GroupId& id);

GroupElement su2_element(const Eigen::Matrix2cd& u);
// Euler chart Z(phi) Y(theta) Z(psi).
GroupElement su2_euler(double phi, double theta, double psi);
GroupElement axb_element(double x, double t);
GroupElement heis_element(double y, double z, double x);
GroupElement m2_element(double vx, double vy, double alpha);
GroupElement m2_tilde_element(double vx, double vy, double alpha);
GroupElement grelaud_element(Complex z, double t);
// Compact-factor variants: the central/rotation coordinate is given as a real
// lift z, mapped through phi0 into character values at the gamma generators.
GroupElement heis_k_element(const GroupId& id, double y, double z, double x);
GroupElement m2_k_element(const GroupId& id, double vx, double vy, double z);

GroupElement multiply(const GroupId& id, const GroupElement& g,
                      const GroupElement& h);
GroupElement inverse(const GroupId& id, const GroupElement& g);
bool approx_equal(const GroupId& id, const GroupElement& g,
                  const GroupElement& h, double tol = 1e-9);

// Density of left Haar measure relative to the chart coordinates:
//   SU2: sin(theta)/(16 pi^2) d phi d theta d psi (mass 1)
//   AXB: e^{-t} dx dt
//   HEIS / HEIS_K: dy dz dx
//   M2 family: dv d alpha / (2pi)^2   (d alpha over one period for M2/M2_K)
//   GRELAUD: e^{-2 a t} dz dt
double haar_weight(const GroupId& id, const GroupElement& g);

// Modular function Delta(g).
double modular(const GroupId& id, const GroupElement& g);

// Rotation angle of the compact coordinate recovered from kappa (requires 1
// among the generators).
double compact_angle(const GroupId& id, const GroupElement& g);

// One-parameter subgroup used by derivations: a direction in the relevant
// abelian part of the group.
struct Direction {
  Eigen::Matrix2cd su2_x = Eigen::Matrix2cd::Zero();  // skew-Hermitian, SU2
  Eigen::Vector2d vec = Eigen::Vector2d::UnitX();     // translation part
  bool central = true;  // HEIS: central (z) direction
};

GroupElement exp_direction(const GroupId& id, const Direction& d, double s);

}  // namespace ncfa
