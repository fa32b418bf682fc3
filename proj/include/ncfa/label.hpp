#pragma once

#include <string>

#include "ncfa/group.hpp"
#include "ncfa/types.hpp"

namespace ncfa {

// Label of an irreducible representation in the dual-support catalog.
struct IrrepLabel {
  enum class Kind {
    Su2Dim,      // SU(2), dimension d >= 1
    AxbSign,     // ax+b, the two infinite-dimensional classes (sign = +-1)
    HeisT,       // Heisenberg pi_t, t != 0
    M2Rho,       // M(2) family pi_rho, rho > 0
    CharN,       // circle character chi_n (measure-zero part of M(2)-dual)
    TRho,        // (chi_t tensor pi_rho) for M2-tilde / M2-K / Heis-K planar
    GrelaudB,    // pi_b, b in [1, e^{2 pi a})
    PlanarChar,  // planar character (measure-zero parts)
  };

  GroupTag group = GroupTag::SU2;
  Kind kind = Kind::Su2Dim;
  int dim = 1;        // Su2Dim
  int sign = +1;      // AxbSign
  int n = 0;          // CharN
  double t = 0.0;     // HeisT / TRho twist parameter
  double rho = 0.0;   // M2Rho / TRho
  double b = 1.0;     // GrelaudB
  IntVector gcoef;    // t as integer combination of gamma generators
  Eigen::Vector2d w = Eigen::Vector2d::Zero();  // PlanarChar

  std::string key() const;
};

IrrepLabel su2_label(int dim);
IrrepLabel axb_label(int sign);
IrrepLabel heis_label(double t);
// Heisenberg-with-compact-center: t in Gamma given by generator coefficients.
IrrepLabel heis_k_label(const GroupId& id, const IntVector& gcoef);
IrrepLabel m2_label(double rho);
IrrepLabel char_label(int n);
IrrepLabel m2_tilde_label(double t, double rho);
IrrepLabel m2_k_label(const GroupId& id, const IntVector& gcoef, double rho);
IrrepLabel grelaud_label(double b);

// Value of the character chi_t at the compact coordinate of g, evaluated
// exactly through the generator coefficients of the label.
Complex gamma_character(const IrrepLabel& l, const GroupElement& g);

}  // namespace ncfa
