#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "wavered/expr.hpp"

namespace wavered {

// Compatibility analysis for the overdetermined systems attached to a
// two-variable ansatz: given a potential R and coefficient lists, construct
// the drift data (V, W) for which the system admits common solutions, and
// check the operator-power annihilation condition that characterizes
// compatibility.

enum class PdeKind { Hyperbolic, Elliptic, Parabolic };

struct CompatSpec {
  int n = 3;  // spatial dimension count of the original equation
  PdeKind kind = PdeKind::Hyperbolic;
  Expr potential;      // R(v, w) (hyperbolic) or R(v, vs) (elliptic); unused parabolic
  double lambda = 1.0; // parabolic factor, +1 or -1
  std::vector<Expr> f_coeffs;  // f_k(v), k = 0 .. n+1
  std::vector<Expr> g_coeffs;  // g_k(w), hyperbolic only
};

enum class FormTag { Mixed, Real };

// Canonical reduced equation
//   h (2 phi_{v w} + drift_v phi_v + drift_w phi_w) = F(phi)
// over (var1, var2); signature -1 marks the hyperbolic real rewrite
// (phi_ww - phi_tt), +1 the elliptic one (phi_ww + phi_tt).
struct CanonicalReducedPDE {
  Expr h;
  Expr drift_v;
  Expr drift_w;
  std::string var1 = "v";
  std::string var2 = "w";
  int signature = -1;
  FormTag form = FormTag::Mixed;
};

// Real two-variable rewrite via var1 = omega + theta, var2 = omega - theta:
//   h (phi_{omega omega} + signature * phi_{theta theta})
//     + Omega phi_omega + Theta phi_theta = F(phi).
struct RealReducedPDE {
  Expr h;  // expression in omega, theta
  Expr Omega;
  Expr Theta;
  int signature = -1;
};

RealReducedPDE real_form(const CanonicalReducedPDE& red);

struct CompatResult {
  Expr h;
  Expr Phi;
  Expr Psi;  // hyperbolic partner; formal conjugate for elliptic; 1 parabolic
  Expr V;
  Expr W;
  bool annihilation_ok = false;
  bool degenerate = false;  // parabolic: second variable is only a parameter
  std::string witness;      // nonzero annihilation remainder, when any
  CanonicalReducedPDE reduced;
};

// h = 1/R_vw, Phi = sum f_k(v) R_v^k, Psi = sum g_k(w) R_w^k,
// V = h dPhi/dw / Phi, W = h dPsi/dv / Psi; annihilation_ok iff
// (h d/dw)^{n+1} Phi = 0 and (h d/dv)^{n+1} Psi = 0.
CompatResult build_hyperbolic(const CompatSpec& spec);

// Same construction over the formal pair (v, vs).
CompatResult build_elliptic(const CompatSpec& spec);

// Phi = sum f_k(v) v^k, V = lambda Phi'/Phi, W identically 0;
// annihilation_ok iff d^{n+1}Phi/dv^{n+1} = 0.
CompatResult build_parabolic(const CompatSpec& spec);

// The fully degenerate system is compatible only when both right sides
// vanish identically.
bool first_order_check(const Expr& V, const Expr& W);

struct SingleAnsatzQuery {
  int lambda = 1;  // 0, +1, -1: normalized gradient square of the ansatz
  Expr F;          // right side, expression in "u"
  // family reading: false -> F = N lambda / (u + C); true -> lambda / (N (u + C))
  bool printed_reading = false;
};

struct SingleAnsatzResult {
  bool ok = false;
  int N = -1;
  double C = 0.0;
  double residual = 0.0;
};

// True iff F lies in the one-parameter compatible family for some
// N in {0,1,2,3}; C is fitted by least squares over sampled u values.
SingleAnsatzResult check_single_ansatz(const SingleAnsatzQuery& q);

// h -> k(var1) l(var2) h, optional var1 <-> var2 swap; phi -> a phi + b only
// rescales the right side, so a is validated (a != 0) but the left-side
// structure is returned unchanged.
CanonicalReducedPDE apply_equivalence(const CanonicalReducedPDE& red, const Expr& k, const Expr& l,
                                      bool swap, double a, double b);

// Factors h = k(v) l(w) when the mixed log-derivative vanishes
// (h_vw h - h_v h_w = 0, symbolically or numerically at sampled points).
std::optional<std::pair<Expr, Expr>> detect_separable(const Expr& h);

}  // namespace wavered
