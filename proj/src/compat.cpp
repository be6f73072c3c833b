#include "wavered/compat.hpp"

#include <cmath>
#include <random>

#include "wavered/errors.hpp"

namespace wavered {

namespace {

// symbolic-zero check with a numeric fallback at sampled points; vars are the
// free variables of the expression
bool vanishes(const Expr& e, const Expr& scale_ref, std::string* witness) {
  Expr s = simplify(e);
  if (is_zero(s)) return true;
  // numeric fallback: the simplifier is intentionally minimal
  auto vars = free_vars(s);
  {
    auto sv = free_vars(scale_ref);
    vars.insert(sv.begin(), sv.end());
  }
  std::mt19937 rng(777u);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  int done = 0, attempts = 0;
  double worst = 0.0;
  while (done < 100 && attempts < 2000) {
    ++attempts;
    std::map<std::string, double> env;
    for (const auto& v : vars) env[v] = u(rng);
    try {
      double val = eval(s, env, 1e-3);
      double sc = eval(scale_ref, env, 1e-3);
      if (std::abs(val) > 1e-9 * (1.0 + std::abs(sc))) {
        worst = std::max(worst, std::abs(val));
        if (witness) *witness = to_string(s);
        return false;
      }
      ++done;
    } catch (const EvalError&) {
      continue;
    }
  }
  if (done == 0) {
    if (witness) *witness = "no admissible sample points for " + to_string(s);
    return false;
  }
  return true;
}

// (h d/dvar)^times applied to e
Expr operator_power(Expr e, const Expr& h, const std::string& var, int times) {
  for (int i = 0; i < times; ++i) e = simplify(mul2(h, diff(e, var)));
  return e;
}

Expr build_series(const std::vector<Expr>& coeffs, const Expr& base) {
  std::vector<Expr> terms;
  for (std::size_t k = 0; k < coeffs.size(); ++k)
    terms.push_back(mul2(coeffs[k], pow(base, Rational(static_cast<long long>(k)))));
  return simplify(add(std::move(terms)));
}

CompatResult build_two_variable(const CompatSpec& spec, const std::string& v1,
                                const std::string& v2, int signature) {
  if (spec.f_coeffs.empty()) throw SpecError("compat: empty coefficient list f");
  if (spec.n < 1) throw SpecError("compat: n must be at least 1");
  if (!spec.potential) throw SpecError("compat: missing potential R");

  Expr R = simplify(spec.potential);
  Expr Rmixed = simplify(diff(diff(R, v1), v2));
  if (is_zero(Rmixed)) throw SpecError("compat: mixed second derivative of R vanishes");
  Expr h = simplify(pow(Rmixed, Rational(-1)));

  Expr Phi = build_series(spec.f_coeffs, simplify(diff(R, v1)));
  if (is_zero(Phi)) throw SpecError("compat: Phi is identically zero");
  std::vector<Expr> g = spec.g_coeffs.empty() ? std::vector<Expr>{kOne} : spec.g_coeffs;
  Expr Psi = build_series(g, simplify(diff(R, v2)));
  if (is_zero(Psi)) throw SpecError("compat: Psi is identically zero");

  CompatResult res;
  res.h = h;
  res.Phi = Phi;
  res.Psi = Psi;
  res.V = simplify(div(mul2(h, diff(Phi, v2)), Phi));
  res.W = simplify(div(mul2(h, diff(Psi, v1)), Psi));

  std::string w1, w2;
  bool ok1 = vanishes(operator_power(Phi, h, v2, spec.n + 1), Phi, &w1);
  bool ok2 = vanishes(operator_power(Psi, h, v1, spec.n + 1), Psi, &w2);
  res.annihilation_ok = ok1 && ok2;
  if (!ok1) res.witness = w1;
  if (!ok2) res.witness += (res.witness.empty() ? "" : "; ") + w2;

  res.reduced.h = h;
  res.reduced.drift_v = simplify(div(diff(Phi, v2), Phi));
  res.reduced.drift_w = simplify(div(diff(Psi, v1), Psi));
  res.reduced.var1 = v1;
  res.reduced.var2 = v2;
  res.reduced.signature = signature;
  res.reduced.form = FormTag::Mixed;
  return res;
}

}  // namespace

CompatResult build_hyperbolic(const CompatSpec& spec) {
  if (spec.kind != PdeKind::Hyperbolic) throw SpecError("build_hyperbolic: wrong kind");
  return build_two_variable(spec, "v", "w", -1);
}

CompatResult build_elliptic(const CompatSpec& spec) {
  if (spec.kind != PdeKind::Elliptic) throw SpecError("build_elliptic: wrong kind");
  return build_two_variable(spec, "v", "vs", +1);
}

CompatResult build_parabolic(const CompatSpec& spec) {
  if (spec.kind != PdeKind::Parabolic) throw SpecError("build_parabolic: wrong kind");
  if (spec.lambda != 1.0 && spec.lambda != -1.0)
    throw SpecError("build_parabolic: lambda must be +1 or -1");
  if (spec.f_coeffs.empty()) throw SpecError("compat: empty coefficient list f");

  Expr Phi = build_series(spec.f_coeffs, var("v"));
  if (is_zero(Phi)) throw SpecError("compat: Phi is identically zero");

  CompatResult res;
  Expr lam = spec.lambda > 0 ? kOne : num(-1);
  res.h = lam;
  res.Phi = Phi;
  res.Psi = kOne;
  res.V = simplify(div(mul2(lam, diff(Phi, "v")), Phi));
  res.W = kZero;
  res.degenerate = true;  // the second variable only enters as a parameter

  Expr acc = Phi;
  for (int i = 0; i < spec.n + 1; ++i) acc = simplify(diff(acc, "v"));
  res.annihilation_ok = vanishes(acc, Phi, &res.witness);

  res.reduced.h = lam;
  res.reduced.drift_v = simplify(div(diff(Phi, "v"), Phi));
  res.reduced.drift_w = kZero;
  res.reduced.var1 = "v";
  res.reduced.var2 = "w";
  res.reduced.signature = 0;
  return res;
}

bool first_order_check(const Expr& V, const Expr& W) {
  return is_zero(simplify(V)) && is_zero(simplify(W));
}

RealReducedPDE real_form(const CanonicalReducedPDE& red) {
  // var1 = omega + theta, var2 = omega - theta:
  //   phi_v = (phi_o + phi_t)/2, phi_w = (phi_o - phi_t)/2,
  //   2 phi_vw = (phi_oo - phi_tt)/2 for signature -1
  //   (the elliptic formal pair gives the + combination).
  std::map<std::string, Expr> ch = {{red.var1, add2(var("omega"), var("theta"))},
                                    {red.var2, sub(var("omega"), var("theta"))}};
  Expr h_t = simplify(mul2(num(1, 2), subst(red.h, ch)));
  Expr a = subst(red.drift_v, ch);
  Expr b = subst(red.drift_w, ch);
  RealReducedPDE out;
  out.h = h_t;
  out.Omega = simplify(mul2(h_t, add2(a, b)));
  out.Theta = simplify(mul2(h_t, sub(a, b)));
  out.signature = red.signature;
  return out;
}

SingleAnsatzResult check_single_ansatz(const SingleAnsatzQuery& q) {
  if (q.lambda != 0 && q.lambda != 1 && q.lambda != -1)
    throw SpecError("check_single_ansatz: lambda must be 0 or +-1");

  SingleAnsatzResult res;
  Expr F = simplify(q.F);

  // N = 0 (and lambda = 0): the compatible right side is identically zero
  if (is_zero(F)) {
    res.ok = true;
    res.N = 0;
    return res;
  }
  if (q.lambda == 0) return res;  // nonzero F incompatible with a null gradient

  // fit F = c/(u + C) by least squares over sampled u values
  for (int N = 1; N <= 3; ++N) {
    double c = q.printed_reading ? static_cast<double>(q.lambda) / N
                                 : static_cast<double>(N) * q.lambda;
    double num_acc = 0.0, den_acc = 0.0;
    std::vector<double> us, fs;
    bool bad = false;
    for (int i = 0; i < 16; ++i) {
      double u = 0.5 + 0.5 * i;  // away from poles at small |u|
      double fv;
      try {
        fv = eval(F, {{"u", u}}, 1e-6);
      } catch (const EvalError&) {
        bad = true;
        break;
      }
      us.push_back(u);
      fs.push_back(fv);
      // F (u + C) = c  ->  F C = c - F u
      num_acc += fv * (c - fv * u);
      den_acc += fv * fv;
    }
    if (bad || den_acc <= 1e-14) continue;
    double C = num_acc / den_acc;
    double worst = 0.0;
    for (std::size_t i = 0; i < us.size(); ++i)
      worst = std::max(worst, std::abs(fs[i] * (us[i] + C) - c));
    if (worst <= 1e-8 * (1.0 + std::abs(c))) {
      res.ok = true;
      res.N = N;
      res.C = C;
      res.residual = worst;
      return res;
    }
  }
  return res;
}

CanonicalReducedPDE apply_equivalence(const CanonicalReducedPDE& red, const Expr& k, const Expr& l,
                                      bool swap, double a, double b) {
  (void)b;
  if (a == 0.0) throw SpecError("apply_equivalence: a must be nonzero");

  // k and l must not vanish on the sampled domain
  std::mt19937 rng(4242u);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  for (int i = 0; i < 64; ++i) {
    std::map<std::string, double> env = {{red.var1, u(rng)}, {red.var2, u(rng)}};
    try {
      if (std::abs(eval(k, env, 0.0)) < 1e-12 || std::abs(eval(l, env, 0.0)) < 1e-12)
        throw NumericsError("apply_equivalence: k or l vanishes at a sampled point");
    } catch (const EvalError&) {
      continue;
    }
  }

  CanonicalReducedPDE out = red;
  if (swap) {
    std::map<std::string, Expr> sw = {{red.var1, var(red.var2)}, {red.var2, var(red.var1)}};
    out.h = subst(red.h, sw);
    out.drift_v = subst(red.drift_w, sw);
    out.drift_w = subst(red.drift_v, sw);
  }
  out.h = simplify(mul({k, l, out.h}));
  return out;
}

std::optional<std::pair<Expr, Expr>> detect_separable(const Expr& h_in) {
  Expr h = simplify(h_in);
  // separability criterion: d^2 log|h| / dv dw = 0, i.e. h_vw h - h_v h_w = 0
  Expr hv = diff(h, "v");
  Expr hw = diff(h, "w");
  Expr crit = simplify(sub(mul2(diff(hv, "w"), h), mul2(hv, hw)));

  std::mt19937 rng(24u);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  int done = 0;
  Expr scale = simplify(mul2(h, h));
  for (int i = 0; i < 256 && done < 64; ++i) {
    std::map<std::string, double> env = {{"v", u(rng)}, {"w", u(rng)}};
    try {
      double hval = eval(h, env, 0.0);
      if (std::abs(hval) < 1e-9) continue;  // too close to a zero of h
      double cval = eval(crit, env, 1e-6);
      double sval = eval(scale, env, 0.0);
      if (std::abs(cval) > 1e-9 * (1.0 + std::abs(sval))) return std::nullopt;
      ++done;
    } catch (const EvalError&) {
      continue;
    }
  }
  if (done == 0) throw NumericsError("detect_separable: no admissible sample points");

  // factor via a base point where h does not vanish
  const double cands[][2] = {{1.0, 1.0}, {0.5, 0.5}, {1.5, -0.5}, {0.3, 0.7}};
  for (const auto& c : cands) {
    Expr v0 = fnum(c[0]), w0 = fnum(c[1]);
    if (c[0] == 1.0 && c[1] == 1.0) {
      v0 = kOne;
      w0 = kOne;
    }
    try {
      double h00 = eval(h, {{"v", c[0]}, {"w", c[1]}}, 0.0);
      if (std::abs(h00) < 1e-9) continue;
      Expr kf = simplify(subst(h, "w", w0));
      Expr lf = simplify(div(subst(h, "v", v0), subst(subst(h, "v", v0), "w", w0)));
      // sanity: product reproduces h at a few points
      bool good = true;
      std::mt19937 rng2(99u);
      for (int i = 0; i < 16 && good; ++i) {
        std::map<std::string, double> env = {{"v", u(rng2)}, {"w", u(rng2)}};
        try {
          double lhs = eval(kf, env, 0.0) * eval(lf, env, 0.0);
          double rhs = eval(h, env, 0.0);
          if (std::abs(lhs - rhs) > 1e-8 * (1.0 + std::abs(rhs))) good = false;
        } catch (const EvalError&) {
          continue;
        }
      }
      if (good) return std::make_pair(kf, lf);
    } catch (const EvalError&) {
      continue;
    }
  }
  return std::nullopt;
}

}  // namespace wavered
