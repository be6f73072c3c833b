#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "wavered/verify.hpp"

using namespace wavered;

namespace {

VarSpace red_space(int n) { return VarSpace(n, {"v", "w", "u"}, {"p", "s"}); }

Expr P(const std::string& t, int n = 2) { return parse(t, red_space(n)); }

}  // namespace

TEST_CASE("flat null pair satisfies all five conditions") {
  CandidateSystem sys;
  sys.space = red_space(2);
  sys.v_expr = P("x0 + x1");
  sys.w_expr = P("x0 - x1");
  sys.h = num(2);
  ResidualReport rep = check_conditions(sys);
  CHECK(rep.pass);
  for (const auto& c : rep.conditions) {
    CHECK(c.pass);
    CHECK(c.max_abs <= 1e-12);
    CHECK(c.excluded == 0);
  }

  // deliberately wrong contraction target
  sys.h = num(3);
  ResidualReport bad = check_conditions(sys);
  CHECK(!bad.pass);
  const CondStat* c = bad.find("contraction");
  REQUIRE(c != nullptr);
  CHECK(!c->pass);
  CHECK(c->max_abs == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(bad.find("null_v")->pass);
}

TEST_CASE("serial and parallel sweeps produce identical statistics") {
  CandidateSystem sys;
  sys.space = red_space(2);
  sys.v_expr = P("x0 + x1");
  sys.w_expr = P("sin(x0)*x2 + x1");
  sys.h = kZero;
  ResidualReport a = check_conditions(sys, {}, 1e-8, Exec::Serial);
  ResidualReport b = check_conditions(sys, {}, 1e-8, Exec::Parallel);
  REQUIRE(a.conditions.size() == b.conditions.size());
  for (std::size_t i = 0; i < a.conditions.size(); ++i) {
    CHECK(a.conditions[i].max_abs == b.conditions[i].max_abs);
    CHECK(a.conditions[i].mean_abs == b.conditions[i].mean_abs);
    CHECK(a.conditions[i].used == b.conditions[i].used);
  }
}

TEST_CASE("composed residual for the trivial radial solution") {
  // phi = v solves the reduced radial equation with F = 0, and the composed
  // u = x0 satisfies the wave equation
  ComposedSolution cs;
  cs.space = red_space(2);
  cs.v_expr = P("x0");
  cs.w_expr = P("sqrt(x1^2 + x2^2)");
  cs.phi = P("v");
  cs.F = kZero;
  ResidualReport rep = check_composed(cs);
  CHECK(rep.pass);
  CHECK(rep.conditions.at(0).max_abs <= 1e-10);
  CHECK(rep.conditions.at(0).used == 64);
}

TEST_CASE("interval solution of the single-ansatz system") {
  ComposedSolution cs;
  cs.space = red_space(3);
  cs.u_expr = P("sqrt(x0^2 - x1^2 - x2^2 - x3^2)", 3);
  cs.F = P("3/u", 3);
  ResidualReport good = check_composed(cs, {}, 1e-9);
  CHECK(good.pass);
  CHECK(good.conditions.at(0).max_abs <= 1e-9);

  cs.F = P("2/u", 3);
  ResidualReport bad = check_composed(cs, {}, 1e-9);
  CHECK(!bad.pass);
  CHECK(bad.conditions.at(0).max_abs > 0.4);  // residual is 1/u with u <= 2
}

TEST_CASE("rank-0 family conditions via finite-difference wave operator") {
  NullFamily f = make_rank0({1, 1, 0}, 0, {1, -1, 0}, 0);
  CandidateSystem sys;
  sys.family = f;
  sys.h = num(2);
  SamplePlan plan;
  plan.points = 16;
  ResidualReport rep = check_conditions(sys, plan);
  CHECK(rep.pass);
  CHECK(rep.find("box_v")->max_abs <= 1e-4);

  sys.V = kOne;  // wrong claim: box v is 0, not 1
  ResidualReport bad = check_conditions(sys, plan);
  CHECK(!bad.pass);
  CHECK(bad.find("box_v")->max_abs == doctest::Approx(1.0).epsilon(1e-3));
  CHECK(bad.find("null_v")->pass);
}

TEST_CASE("rank-1 family: nulls hold, wave-operator value is quantified") {
  NullFamily f = make_rank1({P("1"), P("cos(p)"), P("sin(p)")}, kZero,
                            {P("1"), P("cos(s)"), P("sin(s)")}, kZero);
  CandidateSystem sys;
  sys.family = f;
  sys.h = kZero;  // deliberately unclaimed; only the null rows must pass
  SamplePlan plan;
  plan.points = 12;
  ResidualReport rep = check_conditions(sys, plan, 1e-4);
  CHECK(rep.find("null_v")->max_abs <= 1e-9);
  CHECK(rep.find("null_w")->max_abs <= 1e-9);
  // box v = -+1/r on the resolved branch: clearly nonzero against claim 0
  CHECK(rep.find("box_v")->max_abs > 0.3);
  CHECK(!rep.find("box_v")->pass);
}

TEST_CASE("finite-difference box validated against an exact constant") {
  // u = phi(v, w) = v w = x0^2 - x1^2 has box u = 4 under the (+,-,-)
  // signature
  NullFamily f = make_rank0({1, 1, 0}, 0, {1, -1, 0}, 0);
  ComposedSolution cs;
  cs.family = f;
  cs.phi = P("v*w");
  cs.F = num(4);
  SamplePlan plan;
  plan.points = 16;
  ResidualReport rep = check_composed(cs, plan);
  CHECK(rep.pass);
  CHECK(rep.conditions.at(0).max_abs <= 1e-4);

  cs.F = kZero;
  ResidualReport bad = check_composed(cs, plan);
  CHECK(!bad.pass);
  CHECK(bad.conditions.at(0).max_abs == doctest::Approx(4.0).epsilon(1e-3));
}

TEST_CASE("operator invariance on resolved points") {
  NullFamily f = make_rank0({1, 1, 0}, 0, {1, 0, 1}, 0);
  ResolvedPoint rp = resolve_parameters(f, {0.0, 0.0, 0.0});
  QOperator q = build_q_operator(f, rp.branches[0]);
  REQUIRE(q.invariant_ok);
  ResidualReport rep = check_q_invariance(q, f, {}, 1e-10);
  CHECK(rep.pass);
  CHECK(rep.find("Qv")->max_abs <= 1e-10);
  CHECK(rep.find("Qw")->max_abs <= 1e-10);
  CHECK(rep.find("Qv")->used == 64);

  // parallel spatial parts: every denominator vanishes
  NullFamily par = make_rank0({1, 1, 0}, 0, {1, -1, 0}, 0);
  QOperator fake;  // signs irrelevant, the denominator guard rejects all points
  CHECK_THROWS_AS(check_q_invariance(fake, par), NumericsError);
}
