#pragma once

#include <optional>
#include <string>
#include <vector>

#include "wavered/minkowski.hpp"
#include "wavered/sampling.hpp"
#include "wavered/solutions.hpp"

namespace wavered {

// Residual verification harness: evaluates the defining conditions of a
// candidate reduction (null constraints, contraction target, wave-operator
// targets), composed solutions of the original equation, and operator
// invariance, at sampled points.

struct CondStat {
  std::string name;
  double max_abs = 0.0;
  double mean_abs = 0.0;
  int used = 0;
  int excluded = 0;
  bool pass = false;
};

struct ResidualReport {
  std::vector<CondStat> conditions;
  double tol = 0.0;
  bool pass = false;  // all conditions pass

  const CondStat* find(const std::string& name) const {
    for (const auto& c : conditions)
      if (c.name == name) return &c;
    return nullptr;
  }
};

// A candidate pair (v, w) with claimed right sides: box v = V(v,w),
// box w = W(v,w), v_mu w_mu = h(v,w), v_mu v_mu = 0, w_mu w_mu = 0.
// Sources are either explicit expressions over the coordinates or a
// parametric null family (resolved per point, box taken by central finite
// differences along a fixed branch).
struct CandidateSystem {
  VarSpace space = VarSpace(2);
  std::optional<Expr> v_expr;
  std::optional<Expr> w_expr;
  std::optional<NullFamily> family;
  Expr V = kZero;  // targets, expressions in (v, w)
  Expr W = kZero;
  Expr h = kZero;
};

// u = phi(v, w) composed with the claimed right side F(u); residual
// box u - F(u). Sources as in CandidateSystem; u_expr short-circuits the
// composition for direct candidates u(x).
struct ComposedSolution {
  VarSpace space = VarSpace(2);
  std::optional<Expr> u_expr;
  std::optional<Expr> v_expr;
  std::optional<Expr> w_expr;
  std::optional<NullFamily> family;
  Expr phi = kZero;  // in (v, w)
  Expr F = kZero;    // in u
};

// tol < 0 selects the default: 1e-8 for symbolic-derivative paths, 1e-4 for
// finite-difference parametric paths.
ResidualReport check_conditions(const CandidateSystem& sys, const SamplePlan& plan = {},
                                double tol = -1.0, Exec exec = Exec::Parallel);

ResidualReport check_composed(const ComposedSolution& cs, const SamplePlan& plan = {},
                              double tol = -1.0, Exec exec = Exec::Parallel);

// Qv = v_0 + tau1 v_1 + tau2 v_2 and Qw likewise at resolved points, using
// the closed-form derivatives A_mu(p), C_mu(s) and the accepted signs of q.
ResidualReport check_q_invariance(const QOperator& q, const NullFamily& f,
                                  const SamplePlan& plan = {}, double tol = 1e-8,
                                  Exec exec = Exec::Parallel);

}  // namespace wavered
