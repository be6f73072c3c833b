#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "wavered/reduction.hpp"

using namespace wavered;

namespace {

VarSpace sp(int n) { return VarSpace(n, {"y", "z", "phi"}); }

AnsatzPair make(int n, const std::string& y, const std::string& z) {
  VarSpace s = sp(n);
  return AnsatzPair(parse(y, s), parse(z, s), s);
}

Expr yz(const std::string& s) { return simplify(parse(s, sp(2))); }

}  // namespace

TEST_CASE("ansatz validation rejects constants and dependent pairs") {
  VarSpace s = sp(2);
  CHECK_THROWS_AS(AnsatzPair(parse("3/2", s), parse("x1", s), s), SpecError);
  CHECK_THROWS_AS(AnsatzPair(parse("x0", s), parse("x1 - x1 + 2", s), s), SpecError);
  CHECK_THROWS_AS(AnsatzPair(parse("x0", s), parse("2*x0 + 1", s), s), SpecError);
  CHECK_THROWS_AS(AnsatzPair(parse("x0 + x1", s), parse("(x0 + x1)^2", s), s), SpecError);
  CHECK_NOTHROW(AnsatzPair(parse("x0", s), parse("x1*x2", s), s));
}

TEST_CASE("plane-wave pair: constant coefficients, hyperbolic") {
  ReductionSystem sys = compute_conditions(make(2, "x0", "x1"));
  CHECK(sys.all_closed());
  CHECK(sys.r.yz_form.value().get() == kOne.get());
  CHECK(sys.q.yz_form.value().get() == kZero.get());
  CHECK(sys.s.yz_form.value().get() == num(-1).get());
  CHECK(sys.R_box.yz_form.value().get() == kZero.get());
  CHECK(sys.S_box.yz_form.value().get() == kZero.get());
  CHECK(sys.kind == CaseKind::Hyperbolic);
  CHECK(std::string(case_name(sys.kind)) == "hyperbolic");
}

TEST_CASE("time + radial distance: S = -1/z, closed, hyperbolic") {
  ReductionSystem sys = compute_conditions(make(2, "x0", "sqrt(x1^2 + x2^2)"));
  CHECK(sys.all_closed());
  CHECK(sys.r.yz_form.value().get() == kOne.get());
  CHECK(sys.q.yz_form.value().get() == kZero.get());
  CHECK(sys.s.yz_form.value().get() == num(-1).get());
  CHECK(sys.R_box.yz_form.value().get() == kZero.get());
  CHECK(sys.S_box.yz_form.value().get() == yz("-1/z").get());
  CHECK(sys.kind == CaseKind::Hyperbolic);

  ReducedPDE pde = assemble_reduced(sys, parse("phi^3", sp(2)));
  CHECK(pde.c_yy.get() == kOne.get());
  CHECK(pde.c_yz.get() == kZero.get());
  CHECK(pde.c_zz.get() == num(-1).get());
  CHECK(pde.c_y.get() == kZero.get());
  CHECK(pde.c_z.get() == yz("-1/z").get());
}

TEST_CASE("two spatial coordinates classify elliptic") {
  ReductionSystem sys = compute_conditions(make(2, "x1", "x2"));
  CHECK(sys.kind == CaseKind::Elliptic);
}

TEST_CASE("null coordinate plus transverse coordinate classifies parabolic") {
  ReductionSystem sys = compute_conditions(make(2, "x0 + x1", "x2"));
  CHECK(sys.all_closed());
  CHECK(sys.r.yz_form.value().get() == kZero.get());
  CHECK(sys.q.yz_form.value().get() == kZero.get());
  CHECK(sys.s.yz_form.value().get() == num(-1).get());
  CHECK(sys.kind == CaseKind::Parabolic);
}

TEST_CASE("light-cone square with a spatial coordinate gives sign-changing case") {
  // y = x0^2 - x1^2 - x2^2, z = x1: r = 4y, q = 2z, s = -1 all close,
  // and r s - q^2 = 4(x2^2 - x0^2) changes sign over the box.
  ReductionSystem sys = compute_conditions(make(2, "x0^2 - x1^2 - x2^2", "x1"));
  CHECK(sys.r.closed);
  CHECK(sys.q.closed);
  CHECK(sys.s.closed);
  CHECK(sys.r.yz_form.value().get() == yz("4*y").get());
  CHECK(sys.q.yz_form.value().get() == yz("2*z").get());
  CHECK(sys.s.yz_form.value().get() == num(-1).get());
  CHECK(sys.R_box.yz_form.value().get() == num(6).get());
  CHECK(sys.kind == CaseKind::Mixed);
}

TEST_CASE("product ansatz does not close") {
  ReductionSystem sys = compute_conditions(make(2, "x0", "x1*x2"));
  CHECK(!sys.s.closed);
  CHECK(sys.kind == CaseKind::NotClosed);
  CHECK_THROWS_AS(assemble_reduced(sys, parse("phi", sp(2))), SpecError);
}

TEST_CASE("closure test reports failure fraction for the open case") {
  AnsatzPair a = make(2, "x0", "x1*x2");
  MetricContext ctx(a.space);
  Expr s_cond = grad_dot(a.z, a.z, ctx);  // -(x1^2 + x2^2)
  ClosureResult cr = closure_test(s_cond, a, SamplePlan{});
  CHECK(!cr.ok);
  CHECK(cr.tested > 0);
  CHECK(cr.fail_fraction >= 0.9);
}

TEST_CASE("closure test accepts a condition dependent on the ansatz") {
  AnsatzPair a = make(2, "x0", "sqrt(x1^2 + x2^2)");
  Expr cond = simplify(parse("x0^2 + x1^2 + x2^2", a.space));  // y^2 + z^2
  ClosureResult cr = closure_test(cond, a, SamplePlan{});
  CHECK(cr.ok);
  CHECK(cr.fail_fraction == 0.0);
}

TEST_CASE("rewrite heuristic maps powers of the ansatz bases") {
  AnsatzPair a = make(2, "x0", "sqrt(x1^2 + x2^2)");
  auto r = rewrite_in_yz(simplify(parse("(x1^2 + x2^2)^-1/2 + x0^2", a.space)), a, SamplePlan{});
  REQUIRE(r.has_value());
  CHECK(simplify(*r).get() == yz("1/z + y^2").get());

  // a condition outside the span of (y, z) is rejected
  CHECK(!rewrite_in_yz(parse("x1", a.space), a, SamplePlan{}).has_value());
}
