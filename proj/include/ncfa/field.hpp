#pragma once

#include <functional>
#include <vector>

#include "ncfa/measure.hpp"
#include "ncfa/operator.hpp"

namespace ncfa {

struct FieldAtom {
  IrrepLabel label;
  double weight;  // nu({pi})
  TruncatedOperator value;
};

// Continuum part of an operator field: nodal operator values over a
// discretized measure component, optionally backed by an exact evaluator
// closure (dual convolutions compose these so re-evaluation stays accurate).
struct FieldComponent {
  ContinuumComponent measure;
  std::vector<TruncatedOperator> values;
  std::function<TruncatedOperator(double)> evaluator;

  // evaluator if present, else linear interpolation between nodes
  // (zero outside the component interval).
  TruncatedOperator eval(double param) const;
};

struct OperatorField {
  GroupId group;
  std::vector<FieldAtom> atoms;
  std::vector<FieldComponent> components;

  bool empty() const { return atoms.empty() && components.empty(); }
};

enum class FieldNorm {
  B1,     // integral of trace norms against nu
  B2,     // L^2(nu; HS)
  VNSup,  // essential sup of operator norms over the discretization
};

double field_norm(const OperatorField& f, FieldNorm which);

// Apply op to every operator value (atoms and nodes); evaluator closures are
// composed so evaluated values transform too.
OperatorField map_field(const OperatorField& f,
                        std::function<TruncatedOperator(
                            const IrrepLabel&, const TruncatedOperator&)> op);

}  // namespace ncfa
