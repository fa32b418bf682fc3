#include "ncfa/field.hpp"

#include <cmath>

#include "ncfa/error.hpp"

namespace ncfa {

TruncatedOperator FieldComponent::eval(double param) const {
  if (evaluator) return evaluator(param);
  if (values.empty())
    throw InvalidOperandError("field component has no values");
  if (param < measure.lo || param > measure.hi)
    return TruncatedOperator::zero(values.front().basis);
  const RealVector& x = measure.rule.nodes;
  int n = static_cast<int>(x.size());
  if (param <= x[0]) return values.front();
  if (param >= x[n - 1]) return values.back();
  int i = 0;
  while (i + 1 < n && x[i + 1] < param) ++i;
  double s = (param - x[i]) / (x[i + 1] - x[i]);
  TruncatedOperator out = values[i];
  out.entries = (1.0 - s) * values[i].entries + s * values[i + 1].entries;
  return out;
}

double field_norm(const OperatorField& f, FieldNorm which) {
  if (f.empty())
    throw UnsupportedOperationError("field_norm: empty field");
  auto piece = [&](const TruncatedOperator& v) {
    switch (which) {
      case FieldNorm::B1: return op_norm(v, OperatorNorm::Trace);
      case FieldNorm::B2: {
        double h = op_norm(v, OperatorNorm::HilbertSchmidt);
        return h * h;
      }
      case FieldNorm::VNSup: return op_norm(v, OperatorNorm::Op);
    }
    return 0.0;
  };
  double acc = 0.0;
  for (const auto& a : f.atoms) {
    double p = piece(a.value);
    acc = which == FieldNorm::VNSup ? std::max(acc, p) : acc + a.weight * p;
  }
  for (const auto& c : f.components)
    for (int i = 0; i < c.measure.size(); ++i) {
      double p = piece(c.values[i]);
      acc = which == FieldNorm::VNSup ? std::max(acc, p)
                                      : acc + c.measure.nu_mass(i) * p;
    }
  return which == FieldNorm::B2 ? std::sqrt(acc) : acc;
}

OperatorField map_field(
    const OperatorField& f,
    std::function<TruncatedOperator(const IrrepLabel&,
                                    const TruncatedOperator&)> op) {
  OperatorField out = f;
  for (auto& a : out.atoms) a.value = op(a.label, a.value);
  for (auto& c : out.components) {
    for (int i = 0; i < c.measure.size(); ++i)
      c.values[i] = op(c.measure.label_of(c.measure.rule.nodes[i]),
                       c.values[i]);
    if (c.evaluator) {
      auto base = c.evaluator;
      auto lab = c.measure.label_of;
      c.evaluator = [base, lab, op](double p) { return op(lab(p), base(p)); };
    }
  }
  return out;
}

}  // namespace ncfa
