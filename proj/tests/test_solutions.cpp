#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "wavered/solutions.hpp"

using namespace wavered;

namespace {

VarSpace fam_space() { return VarSpace(2, {"v", "w"}, {"p", "s", "p1", "p2"}); }

Expr P(const std::string& t) { return parse(t, fam_space()); }

NullFamily circle_pair() {
  return make_rank1({P("1"), P("cos(p)"), P("sin(p)")}, kZero,
                    {P("1"), P("cos(s)"), P("sin(s)")}, kZero);
}

bool has_branch_p(const ResolvedPoint& rp, double p, double s) {
  for (const auto& b : rp.branches) {
    double dp = std::remainder(b.p[0] - p, 2 * M_PI);
    double ds = std::remainder(b.s[0] - s, 2 * M_PI);
    if (std::abs(dp) < 1e-8 && std::abs(ds) < 1e-8) return true;
  }
  return false;
}

}  // namespace

TEST_CASE("rank-0 families: constant null pairs") {
  NullFamily f = make_rank0({1, 1, 0}, 0, {1, -1, 0}, 0);
  CHECK(f.rank == 0);
  CHECK(f.lie_class);
  CHECK(f.h.get() == num(2).get());
  CHECK(!f.degenerate_h);

  NullFamily frat = make_rank0({1, 0.6, 0.8}, 0, {1, -0.6, -0.8}, 1);
  CHECK(eval(frat.h, {}, 0.0) == doctest::Approx(2.0).epsilon(1e-12));

  CHECK_THROWS_AS(make_rank0({1, 0, 0}, 0, {1, 1, 0}, 0), SpecError);

  NullFamily self = make_rank0({1, 1, 0}, 0, {1, 1, 0}, 0);
  CHECK(self.degenerate_h);
}

TEST_CASE("rank-1 construction certifies the null conditions") {
  NullFamily f = circle_pair();
  CHECK(f.rank == 1);
  CHECK(is_zero(simplify(f.h)) == false);  // h = 1 - cos(p - s) as expression

  CHECK_THROWS_AS(make_rank1({P("1"), P("p"), P("0")}, kZero,
                             {P("1"), P("cos(s)"), P("sin(s)")}, kZero),
                  SpecError);
  // wrong parameter letter on the w side
  CHECK_THROWS_AS(make_rank1({P("1"), P("cos(p)"), P("sin(p)")}, kZero,
                             {P("1"), P("cos(p)"), P("sin(p)")}, kZero),
                  SpecError);
}

TEST_CASE("parameter resolution on the circle family") {
  NullFamily f = circle_pair();
  ResolvedPoint rp = resolve_parameters(f, {0.0, 1.0, 0.0});
  // constraint -sin(p) x1 + cos(p) x2 = -sin(p): roots p = 0 and p = pi
  CHECK(rp.branches.size() == 4);  // 2 v-roots x 2 w-roots
  CHECK(has_branch_p(rp, 0.0, 0.0));
  CHECK(has_branch_p(rp, M_PI, M_PI));
  CHECK(has_branch_p(rp, 0.0, M_PI));
  for (const auto& b : rp.branches) {
    CHECK(b.residual <= 1e-10 * 2.0);
    CHECK(b.cond < 1e8);
    // v = x0 + cos(p) x1 + sin(p) x2
    CHECK(b.v == doctest::Approx(std::cos(b.p[0])).epsilon(1e-9));
  }

  // singular locus: the constraint degenerates when x1 = x2 = 0
  CHECK_THROWS_AS(resolve_parameters(f, {1.0, 0.0, 0.0}), NumericsError);
}

TEST_CASE("rank-0 resolution is direct evaluation") {
  NullFamily f = make_rank0({1, 1, 0}, 2, {1, -1, 0}, -1);
  ResolvedPoint rp = resolve_parameters(f, {0.5, 0.25, 3.0});
  REQUIRE(rp.branches.size() == 1);
  CHECK(rp.branches[0].v == doctest::Approx(0.5 + 0.25 + 2.0).epsilon(1e-12));
  CHECK(rp.branches[0].w == doctest::Approx(0.5 - 0.25 - 1.0).epsilon(1e-12));
}

TEST_CASE("total-derivative cancellation: dv/dx_mu equals A_mu at resolved points") {
  NullFamily f = circle_pair();
  Point x = {0.3, 1.0, 0.2};
  ResolvedPoint base = resolve_parameters(f, x);
  REQUIRE(!base.branches.empty());
  const ResolvedBranch& b0 = base.branches[0];

  auto v_on_branch = [&](const Point& xx) {
    ResolvedPoint rp = resolve_parameters(f, xx);
    double best = 1e18, v = 0.0;
    for (const auto& b : rp.branches) {
      double d = std::abs(std::remainder(b.p[0] - b0.p[0], 2 * M_PI)) +
                 std::abs(std::remainder(b.s[0] - b0.s[0], 2 * M_PI));
      if (d < best) {
        best = d;
        v = b.v;
      }
    }
    return v;
  };

  double Amu[3] = {1.0, std::cos(b0.p[0]), std::sin(b0.p[0])};
  for (int mu = 0; mu < 3; ++mu) {
    Point xp = x, xm = x;
    double h = 1e-6;
    xp[mu] += h;
    xm[mu] -= h;
    double fd = (v_on_branch(xp) - v_on_branch(xm)) / (2 * h);
    CHECK(fd == doctest::Approx(Amu[mu]).epsilon(1e-5));
  }

  // null condition at the resolved point: A(p) . A(p) = 0 (Minkowski)
  double nn = Amu[0] * Amu[0] - Amu[1] * Amu[1] - Amu[2] * Amu[2];
  CHECK(std::abs(nn) <= 1e-9);
}

TEST_CASE("shared-parameter rank-2 families") {
  NullFamily f = make_shared_rank2({P("1"), P("cos(p1)"), P("sin(p1)")}, kZero,
                                   {P("1"), P("cos(p1)"), P("sin(p1)")}, kZero);
  CHECK(f.hidden_symmetry);
  CHECK(f.shared_parameters);
  CHECK(f.degenerate_h);  // self-pairing: A_mu C_mu = 0

  CHECK_THROWS_AS(make_shared_rank2({P("1"), P("cos(p1)"), P("sin(p1)")}, kZero,
                                    {P("1"), P("cos(p2)"), P("sin(p2)")}, kZero),
                  SpecError);
}

TEST_CASE("degenerate two-parameter family constraints") {
  // constant null vector: every contraction vanishes
  CHECK_NOTHROW(make_sobolev({P("1"), P("cos(1)"), P("sin(1)")}, kZero));

  // unit-circle dependence on p1 has A_p1 . A_p1 = -1
  CHECK_THROWS_AS(make_sobolev({P("1"), P("cos(p1)"), P("sin(p1)")}, kZero), SpecError);

  // parameter derivative proportional to a null A contracts to zero
  CHECK_NOTHROW(make_sobolev({P("exp(p1)"), P("exp(p1)"), P("0")}, kZero));
}

TEST_CASE("conditional-symmetry operator with sign audit") {
  // the printed tau2 formula has the wrong sign for this pair; the audit
  // finds the variant satisfying Qv = Qw = 0
  NullFamily f = make_rank0({1, 1, 0}, 0, {1, 0, 1}, 0);
  ResolvedPoint rp = resolve_parameters(f, {0.1, 0.2, 0.3});
  QOperator q = build_q_operator(f, rp.branches[0]);
  CHECK(q.invariant_ok);
  CHECK(q.audit_flag);
  CHECK(q.tau1 == doctest::Approx(-1.0).epsilon(1e-12));
  CHECK(q.tau2 == doctest::Approx(-1.0).epsilon(1e-12));
  CHECK(q.sign1 == 1);
  CHECK(q.sign2 == -1);
  // the accepted values annihilate both linear forms
  CHECK(std::abs(1.0 + q.tau1 * 1.0 + q.tau2 * 0.0) <= 1e-12);
  CHECK(std::abs(1.0 + q.tau1 * 0.0 + q.tau2 * 1.0) <= 1e-12);

  // a mirror-symmetric pair where the printed formula passes unchanged
  NullFamily g = make_rank0({1, 0.6, 0.8}, 0, {1, 0.6, -0.8}, 0);
  ResolvedPoint rg = resolve_parameters(g, {0.0, 0.0, 0.0});
  QOperator qg = build_q_operator(g, rg.branches[0]);
  CHECK(qg.invariant_ok);
  CHECK(!qg.audit_flag);
  CHECK(qg.tau1 == doctest::Approx(-1.0 / 0.6).epsilon(1e-12));
  CHECK(qg.tau2 == doctest::Approx(0.0));

  // parallel spatial parts: vanishing denominator
  NullFamily par = make_rank0({1, 1, 0}, 0, {1, -1, 0}, 0);
  ResolvedPoint rpar = resolve_parameters(par, {0.0, 0.0, 0.0});
  CHECK_THROWS_AS(build_q_operator(par, rpar.branches[0]), NumericsError);
}
