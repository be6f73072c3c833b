#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "wavered/compat.hpp"
#include "wavered/minkowski.hpp"

using namespace wavered;

namespace {

VarSpace vs_space() {
  return VarSpace(1, {"v", "w", "vs", "u", "phi", "omega", "theta"});
}

Expr P(const std::string& s) { return parse(s, vs_space()); }
Expr S(const std::string& s) { return simplify(P(s)); }

CompatSpec hyp(const std::string& R, std::vector<std::string> f, std::vector<std::string> g,
               int n = 3) {
  CompatSpec spec;
  spec.n = n;
  spec.kind = PdeKind::Hyperbolic;
  spec.potential = P(R);
  for (const auto& s : f) spec.f_coeffs.push_back(P(s));
  for (const auto& s : g) spec.g_coeffs.push_back(P(s));
  return spec;
}

}  // namespace

TEST_CASE("hyperbolic construction: product potential") {
  CompatResult res = build_hyperbolic(hyp("v*w", {"1", "1"}, {"1", "0"}));
  CHECK(res.h.get() == kOne.get());
  CHECK(res.Phi.get() == S("1 + w").get());
  CHECK(res.Psi.get() == kOne.get());
  CHECK(res.V.get() == S("1/(1+w)").get());
  CHECK(res.W.get() == kZero.get());
  CHECK(res.annihilation_ok);
  CHECK(res.witness.empty());
}

TEST_CASE("hyperbolic: lone top-order term fails annihilation") {
  CompatResult res = build_hyperbolic(hyp("v*w", {"0", "0", "0", "0", "1"}, {"1"}));
  CHECK(res.Phi.get() == S("w^4").get());
  CHECK(!res.annihilation_ok);
  CHECK(!res.witness.empty());
}

TEST_CASE("hyperbolic error paths") {
  CHECK_THROWS_AS(build_hyperbolic(hyp("v*w", {"0"}, {"1"})), SpecError);   // Phi = 0
  CHECK_THROWS_AS(build_hyperbolic(hyp("v + w", {"1"}, {"1"})), SpecError); // R_vw = 0
  CompatSpec wrong = hyp("v*w", {"1"}, {"1"});
  wrong.kind = PdeKind::Elliptic;
  CHECK_THROWS_AS(build_hyperbolic(wrong), SpecError);
}

TEST_CASE("hyperbolic with nonconstant h") {
  // R = v^2 w: h = 1/(2v), Phi = 2vw, and (h d/dw) Phi = 1 so the chain
  // terminates
  CompatResult res = build_hyperbolic(hyp("v^2*w", {"0", "1"}, {"1"}));
  CHECK(res.h.get() == S("1/(2*v)").get());
  CHECK(res.annihilation_ok);

  // closed form V Phi - h dPhi/dw = 0 numerically
  Expr resid = simplify(sub(mul2(res.V, res.Phi), mul2(res.h, diff(res.Phi, "w"))));
  std::mt19937 rng(5u);
  std::uniform_real_distribution<double> u(0.2, 2.0);
  for (int i = 0; i < 100; ++i) {
    std::map<std::string, double> env{{"v", u(rng)}, {"w", u(rng)}};
    CHECK(std::abs(eval(resid, env, 1e-6)) <= 1e-10);
  }
}

TEST_CASE("operator-power identity lowers the exponent by one") {
  for (const std::string& Rtxt : {"v*w", "v^2*w", "v*w + v"}) {
    Expr R = S(Rtxt);
    Expr h = simplify(pow(simplify(diff(diff(R, "v"), "w")), Rational(-1)));
    Expr Rv = simplify(diff(R, "v"));
    for (long long k = 1; k <= 4; ++k) {
      Expr lhs = simplify(mul2(h, diff(pow(Rv, Rational(k)), "w")));
      Expr rhs = simplify(mul2(num(k), pow(Rv, Rational(k - 1))));
      CHECK(lhs.get() == rhs.get());
    }
  }
}

TEST_CASE("elliptic construction over the formal pair") {
  CompatSpec spec;
  spec.n = 2;
  spec.kind = PdeKind::Elliptic;
  spec.potential = P("v*vs");
  spec.f_coeffs = {P("1"), P("1")};
  CompatResult res = build_elliptic(spec);
  CHECK(res.V.get() == S("1/(1+vs)").get());
  CHECK(res.annihilation_ok);
  CHECK(res.reduced.signature == +1);

  // lone top term fails
  spec.f_coeffs = {P("0"), P("0"), P("0"), P("1")};
  CHECK(!build_elliptic(spec).annihilation_ok);
}

TEST_CASE("real rewrite matches the mixed form under the change of variables") {
  CompatResult res = build_hyperbolic(hyp("v*w", {"1", "1"}, {"1", "1"}));
  RealReducedPDE rf = real_form(res.reduced);
  CHECK(rf.signature == -1);

  // test profile phi(v, w); its pullback to (omega, theta)
  Expr phi = S("sin(v)*cos(w) + v^2");
  std::map<std::string, Expr> ch = {{"v", S("omega + theta")}, {"w", S("omega - theta")}};
  Expr phit = simplify(subst(phi, ch));

  Expr mixed = simplify(add({mul2(res.reduced.h, mul2(num(2), diff(diff(phi, "v"), "w"))),
                             mul2(mul2(res.reduced.h, res.reduced.drift_v), diff(phi, "v")),
                             mul2(mul2(res.reduced.h, res.reduced.drift_w), diff(phi, "w"))}));
  Expr realf = simplify(add({mul2(rf.h, sub(diff(diff(phit, "omega"), "omega"),
                                            diff(diff(phit, "theta"), "theta"))),
                             mul2(rf.Omega, diff(phit, "omega")),
                             mul2(rf.Theta, diff(phit, "theta"))}));

  std::mt19937 rng(9u);
  std::uniform_real_distribution<double> u(-1.5, 1.5);
  for (int i = 0; i < 40; ++i) {
    double om = u(rng), th = u(rng);
    double v = om + th, w = om - th;
    double lhs;
    try {
      lhs = eval(mixed, {{"v", v}, {"w", w}}, 1e-4);
    } catch (const EvalError&) {
      continue;
    }
    double rhs = eval(realf, {{"omega", om}, {"theta", th}}, 1e-4);
    CHECK(std::abs(lhs - rhs) <= 1e-8 * (1.0 + std::abs(lhs)));
  }
}

TEST_CASE("parabolic construction") {
  CompatSpec spec;
  spec.n = 3;
  spec.kind = PdeKind::Parabolic;
  spec.lambda = 1.0;
  spec.f_coeffs = {P("0"), P("1")};  // Phi = v
  CompatResult res = build_parabolic(spec);
  CHECK(res.V.get() == S("1/v").get());
  CHECK(res.W.get() == kZero.get());
  CHECK(res.degenerate);
  CHECK(res.annihilation_ok);

  spec.f_coeffs = {P("0"), P("0"), P("0"), P("0"), P("0"), P("1")};  // Phi = v^5
  CompatResult high = build_parabolic(spec);
  CHECK(high.W.get() == kZero.get());
  CHECK(!high.annihilation_ok);

  spec.lambda = 2.0;
  CHECK_THROWS_AS(build_parabolic(spec), SpecError);
}

TEST_CASE("first-order systems need both right sides to vanish") {
  CHECK(first_order_check(kZero, kZero));
  CHECK(!first_order_check(P("v"), kZero));
  CHECK(first_order_check(P("sin(v)^2 + cos(v)^2 - 1"), kZero));
}

TEST_CASE("single-ansatz family membership") {
  SingleAnsatzQuery q;
  q.lambda = 1;
  q.F = P("3/u");
  SingleAnsatzResult r = check_single_ansatz(q);
  CHECK(r.ok);
  CHECK(r.N == 3);
  CHECK(std::abs(r.C) <= 1e-8);

  q.F = P("2/(u + 3/2)");
  r = check_single_ansatz(q);
  CHECK(r.ok);
  CHECK(r.N == 2);
  CHECK(r.C == doctest::Approx(1.5).epsilon(1e-8));

  q.F = kZero;
  r = check_single_ansatz(q);
  CHECK(r.ok);
  CHECK(r.N == 0);

  q.F = P("u^2");
  CHECK(!check_single_ansatz(q).ok);

  // alternative reading of the family: the constant is lambda/N
  q.printed_reading = true;
  q.F = P("3/u");
  CHECK(!check_single_ansatz(q).ok);
  q.F = P("1/3/u");
  r = check_single_ansatz(q);
  CHECK(r.ok);
  CHECK(r.N == 3);

  q.printed_reading = false;
  q.lambda = 0;
  q.F = P("1/u");
  CHECK(!check_single_ansatz(q).ok);
  q.lambda = 5;
  CHECK_THROWS_AS(check_single_ansatz(q), SpecError);
}

TEST_CASE("single-ansatz oracle: radial interval solution") {
  // u = sqrt(x0^2 - x1^2 - x2^2 - x3^2) has unit gradient square and
  // box u = 3/u, the N = 3 member of the family
  MetricContext ctx{VarSpace(3)};
  Expr u = parse("sqrt(x0^2 - x1^2 - x2^2 - x3^2)", ctx.space);
  CHECK(is_zero(simplify(sub(grad_dot(u, u, ctx), kOne))));
  Expr bu = box(u, ctx);
  CHECK(is_zero(simplify(sub(bu, mul2(num(3), pow(u, Rational(-1)))))));
}

TEST_CASE("equivalence transformations") {
  CompatResult res = build_hyperbolic(hyp("v*w + v", {"1", "1"}, {"1", "1"}));
  CanonicalReducedPDE red = res.reduced;

  // identity
  CanonicalReducedPDE id = apply_equivalence(red, kOne, kOne, false, 1.0, 0.0);
  CHECK(simplify(id.h).get() == simplify(red.h).get());
  CHECK(simplify(id.drift_v).get() == simplify(red.drift_v).get());

  // swap is an involution
  CanonicalReducedPDE once = apply_equivalence(red, kOne, kOne, true, 1.0, 0.0);
  CanonicalReducedPDE twice = apply_equivalence(once, kOne, kOne, true, 1.0, 0.0);
  CHECK(simplify(twice.h).get() == simplify(red.h).get());
  CHECK(simplify(twice.drift_v).get() == simplify(red.drift_v).get());
  CHECK(simplify(twice.drift_w).get() == simplify(red.drift_w).get());

  // separable h collapses to the flat representative
  CanonicalReducedPDE sep = red;
  sep.h = S("v*w");
  CanonicalReducedPDE flat = apply_equivalence(sep, S("1/v"), S("1/w"), false, 1.0, 0.0);
  CHECK(simplify(flat.h).get() == kOne.get());

  // composition of two transformations equals the composed one
  CanonicalReducedPDE two = apply_equivalence(
      apply_equivalence(red, S("exp(v)"), S("1 + w^2"), false, 1.0, 0.0), S("2 + v^2"),
      S("exp(w)"), false, 1.0, 0.0);
  CanonicalReducedPDE onego = apply_equivalence(red, S("exp(v)*(2 + v^2)"),
                                                S("(1 + w^2)*exp(w)"), false, 1.0, 0.0);
  CHECK(simplify(two.h).get() == simplify(onego.h).get());

  CHECK_THROWS_AS(apply_equivalence(red, kOne, kOne, false, 0.0, 0.0), SpecError);
}

TEST_CASE("separable detection and normalization") {
  auto fac = detect_separable(S("v*w"));
  REQUIRE(fac.has_value());
  std::mt19937 rng(11u);
  std::uniform_real_distribution<double> u(0.2, 2.0);
  for (int i = 0; i < 32; ++i) {
    std::map<std::string, double> env{{"v", u(rng)}, {"w", u(rng)}};
    double prod = eval(fac->first, env, 0.0) * eval(fac->second, env, 0.0);
    CHECK(prod == doctest::Approx(env["v"] * env["w"]).epsilon(1e-9));
  }

  auto face = detect_separable(S("exp(v + w)"));
  REQUIRE(face.has_value());
  for (int i = 0; i < 32; ++i) {
    std::map<std::string, double> env{{"v", u(rng)}, {"w", u(rng)}};
    double prod = eval(face->first, env, 0.0) * eval(face->second, env, 0.0);
    CHECK(prod == doctest::Approx(std::exp(env["v"] + env["w"])).epsilon(1e-9));
  }

  CHECK(!detect_separable(S("1 + v*w")).has_value());

  // normalizing with the reciprocal factors flattens h at sampled points
  CompatResult res = build_hyperbolic(hyp("v*w + v", {"1", "1"}, {"1", "1"}));
  CanonicalReducedPDE sep = res.reduced;
  sep.h = S("v*w");
  CanonicalReducedPDE flat = apply_equivalence(sep, simplify(pow(fac->first, Rational(-1))),
                                               simplify(pow(fac->second, Rational(-1))), false,
                                               1.0, 0.0);
  for (int i = 0; i < 32; ++i) {
    std::map<std::string, double> env{{"v", u(rng)}, {"w", u(rng)}};
    CHECK(eval(simplify(flat.h), env, 1e-6) == doctest::Approx(1.0).epsilon(1e-9));
  }
}
