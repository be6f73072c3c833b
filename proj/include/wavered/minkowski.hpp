#pragma once

#include "wavered/expr.hpp"

namespace wavered {

// Lorentzian context over coordinates x0..xn with signature (+, -, ..., -);
// x0 is the time component.
struct MetricContext {
  VarSpace space;
  explicit MetricContext(VarSpace s) : space(std::move(s)) {}
  int sign(int mu) const { return mu == 0 ? 1 : -1; }
};

// d'Alembert operator: d^2/dx0^2 - sum_i d^2/dxi^2, simplified.
Expr box(const Expr& e, const MetricContext& ctx);

// Lorentzian gradient contraction: da/dx0 db/dx0 - sum_i da/dxi db/dxi.
Expr grad_dot(const Expr& a, const Expr& b, const MetricContext& ctx);

}  // namespace wavered
