#pragma once

#include <optional>

#include "wavered/minkowski.hpp"
#include "wavered/sampling.hpp"

namespace wavered {

// Ansatz pair (y(x), z(x)) for the substitution u = phi(y, z). Construction
// validates that neither is constant and that the pair is functionally
// independent at generic sampled points.
struct AnsatzPair {
  Expr y;
  Expr z;
  VarSpace space;

  AnsatzPair(Expr y_, Expr z_, VarSpace space_, const SamplePlan& plan = {});
};

enum class CaseKind { Elliptic, Hyperbolic, Parabolic, FirstOrder, Mixed, NotClosed };

const char* case_name(CaseKind k);

// One reduction-condition function: the raw x-space expression, the
// (y,z)-closed rewrite when the substitution heuristic found one, and the
// closure verdict (symbolic rewrite or numeric gradient-span rank test).
struct ConditionFunction {
  Expr x_form;
  std::optional<Expr> yz_form;  // over variables "y", "z"
  bool closed = false;
  bool numeric_only = false;  // closed by rank test but with no symbolic form
};

// The five condition functions of the reduction system: gradient
// contractions r = (grad y)^2, q = grad y . grad z, s = (grad z)^2, and the
// wave-operator images R = box y, S = box z.
struct ReductionSystem {
  AnsatzPair ansatz;
  ConditionFunction r, q, s, R_box, S_box;
  CaseKind kind = CaseKind::NotClosed;

  bool all_closed() const {
    return r.closed && q.closed && s.closed && R_box.closed && S_box.closed;
  }
};

struct ClosureResult {
  bool ok = false;
  double fail_fraction = 1.0;
  int tested = 0;
};

// Numeric functional-dependence test: at every sampled non-degenerate point
// the rows (grad cond, grad y, grad z) must have rank <= 2 (relative
// singular value threshold 1e-8).
ClosureResult closure_test(const Expr& cond, const AnsatzPair& a, const SamplePlan& plan);

// Computes the five condition functions, attempts the (y,z) rewrite, runs
// the closure test for each, and classifies the case.
ReductionSystem compute_conditions(const AnsatzPair& a, const SamplePlan& plan = {});

// Sign classification of r s - q^2 at sampled points. Requires the
// contraction conditions r, q, s to be closed.
CaseKind classify(const ReductionSystem& sys, const SamplePlan& plan = {});

// Reduced two-dimensional PDE
//   c_yy phi_yy + c_yz phi_yz + c_zz phi_zz + c_y phi_y + c_z phi_z = F(phi)
// with coefficients (r, 2q, s, R, S) as (y,z)-expressions.
struct ReducedPDE {
  Expr c_yy, c_yz, c_zz, c_y, c_z;
  Expr F;  // right side, expression in "phi"
};

// Refuses (throws SpecError) when any closure flag is false.
ReducedPDE assemble_reduced(const ReductionSystem& sys, const Expr& F);

// Substitution heuristic: rewrite an x-space expression in terms of (y, z),
// matching subtrees equal to y, z, y*z, and rational powers of their bases.
// Returns an expression over variables "y", "z" on success.
std::optional<Expr> rewrite_in_yz(const Expr& cond, const AnsatzPair& a, const SamplePlan& plan);

}  // namespace wavered
