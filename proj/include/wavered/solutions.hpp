#pragma once

#include <array>
#include <vector>

#include "wavered/expr.hpp"
#include "wavered/sampling.hpp"

namespace wavered {

// Parametric families solving the null-gradient system in 2+1 dimensions:
//   v = A_mu(p) x_mu + B(p),  w = C_mu(s) x_mu + D(s)  (plain summation)
// with Minkowski null constraints A_mu A_mu = 0, C_mu C_mu = 0. The v-side
// parameters are named p (or p1, p2), the w-side ones s (or s1, s2).

struct NullFamily {
  int rank = 0;  // number of parameter symbols per side: 0, 1 or 2
  std::array<Expr, 3> A;
  Expr B;
  std::array<Expr, 3> C;
  Expr D;
  bool shared_parameters = false;  // w reuses the v-side parameters
  bool lie_class = false;          // rank 0: plane-wave symmetry reduction
  bool hidden_symmetry = false;    // shared rank 2
  bool degenerate_h = false;       // contraction A_mu C_mu vanishes
  Expr h;                          // A_mu C_mu under the Minkowski contraction
};

// One local branch of the implicit parameter resolution at a spacetime point.
struct ResolvedBranch {
  std::vector<double> p;  // v-side parameter values
  std::vector<double> s;  // w-side parameter values
  double v = 0.0;
  double w = 0.0;
  double cond = 1.0;      // Jacobian conditioning (1/|g'| scalar, sigma ratio 2x2)
  double residual = 0.0;  // worst implicit-constraint residual at the root
};

struct ResolvedPoint {
  Point x;
  std::vector<ResolvedBranch> branches;
};

struct SobolevFamily {
  std::array<Expr, 3> A;
  Expr B;
};

struct QOperator {
  Expr tau1_expr;  // printed formula (C0 A2 - A0 C2) / (A1 C2 - A2 C1)
  Expr tau2_expr;  // printed formula (C0 A1 - A0 C1) / (A1 C2 - A2 C1)
  double tau1 = 0.0;  // accepted values at the resolved point
  double tau2 = 0.0;
  int sign1 = 1;            // sign applied to the printed tau1
  int sign2 = 1;            // sign applied to the printed tau2
  bool audit_flag = false;  // printed formula failed, a sign variant passed
  bool invariant_ok = false;  // Qv = Qw = 0 held for the accepted signs
};

// Constant null pair; h = A_mu C_mu is constant and box v = box w = 0.
NullFamily make_rank0(const std::array<double, 3>& A, double B, const std::array<double, 3>& C,
                      double D);

// One parameter per side (p for v, s for w); null conditions certified
// symbolically, with a numeric fallback.
NullFamily make_rank1(const std::array<Expr, 3>& A, const Expr& B, const std::array<Expr, 3>& C,
                      const Expr& D);

// Both sides share the pair (p1, p2); additionally requires the contraction
// A_mu C_mu to be constant in the parameters.
NullFamily make_shared_rank2(const std::array<Expr, 3>& A, const Expr& B,
                             const std::array<Expr, 3>& C, const Expr& D);

// Degenerate two-parameter family with all parameter-derivative contractions
// vanishing; solutions built on it satisfy box u = 0 and u_mu u_mu = 0.
SobolevFamily make_sobolev(const std::array<Expr, 3>& A, const Expr& B);

// 17 equally spaced Newton seeds in [0, 2 pi).
std::vector<double> default_seeds();

// Damped Newton resolution of the implicit constraints
//   sum_mu dA_mu/dp x_mu + dB/dp = 0   (and the s / (p1,p2) analogues)
// from every seed; all distinct roots (> 1e-6 apart, modulo 2 pi) are
// returned as branches with residual <= 1e-10.
ResolvedPoint resolve_parameters(const NullFamily& f, const Point& x,
                                 const std::vector<double>& seeds = default_seeds());

// Conditional-symmetry operator Q = d_0 + tau1 d_1 + tau2 d_2 for the pair
// (v, w) at a resolved branch. The printed tau formulas are evaluated first;
// if Qv = Qw = 0 fails, the three sign variants are audited and the passing
// one is kept with audit_flag set.
QOperator build_q_operator(const NullFamily& f, const ResolvedBranch& at);

}  // namespace wavered
