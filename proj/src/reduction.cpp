#include "wavered/reduction.hpp"

#include <Eigen/Dense>
#include <Eigen/SVD>
#include <cmath>
#include <functional>

namespace wavered {

namespace {

std::map<std::string, double> coord_env(const VarSpace& space, const Point& p) {
  std::map<std::string, double> env;
  for (int mu = 0; mu <= space.n(); ++mu) env[space.coord(mu)] = p[mu];
  return env;
}

std::vector<Expr> gradient(const Expr& e, const VarSpace& space) {
  std::vector<Expr> g;
  for (int mu = 0; mu <= space.n(); ++mu) g.push_back(diff(e, space.coord(mu)));
  return g;
}

std::set<std::string> coord_set(const VarSpace& space) {
  std::set<std::string> s;
  for (const auto& c : space.coords()) s.insert(c);
  return s;
}

}  // namespace

const char* case_name(CaseKind k) {
  switch (k) {
    case CaseKind::Elliptic: return "elliptic";
    case CaseKind::Hyperbolic: return "hyperbolic";
    case CaseKind::Parabolic: return "parabolic";
    case CaseKind::FirstOrder: return "first-order";
    case CaseKind::Mixed: return "mixed";
    case CaseKind::NotClosed: return "not-closed";
  }
  return "?";
}

AnsatzPair::AnsatzPair(Expr y_, Expr z_, VarSpace space_, const SamplePlan& plan)
    : y(simplify(y_)), z(simplify(z_)), space(std::move(space_)) {
  auto coords = coord_set(space);
  if (!depends_on(y, coords)) throw SpecError("ansatz: y is constant");
  if (!depends_on(z, coords)) throw SpecError("ansatz: z is constant");

  // functional independence: Jacobian of (y, z) has rank 2 at generic points
  auto gy = gradient(y, space);
  auto gz = gradient(z, space);
  auto pts = sample_points(space.dim(), plan);
  int rank2 = 0, valid = 0;
  for (const auto& p : pts) {
    auto env = coord_env(space, p);
    Eigen::MatrixXd J(2, space.dim());
    try {
      for (int mu = 0; mu < space.dim(); ++mu) {
        J(0, mu) = eval(gy[mu], env, plan.tube);
        J(1, mu) = eval(gz[mu], env, plan.tube);
      }
    } catch (const EvalError&) {
      continue;
    }
    ++valid;
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(J);
    auto sv = svd.singularValues();
    if (sv(0) > 0 && sv(1) > 1e-8 * sv(0)) ++rank2;
  }
  if (valid == 0) throw SpecError("ansatz: no valid sample points");
  if (rank2 < valid / 2) throw SpecError("ansatz: y and z are functionally dependent");
}

ClosureResult closure_test(const Expr& cond, const AnsatzPair& a, const SamplePlan& plan) {
  Expr c = simplify(cond);
  ClosureResult res;
  if (!depends_on(c, coord_set(a.space))) {
    res.ok = true;
    res.fail_fraction = 0.0;
    return res;
  }
  auto gc = gradient(c, a.space);
  auto gy = gradient(a.y, a.space);
  auto gz = gradient(a.z, a.space);
  auto pts = sample_points(a.space.dim(), plan);
  int fail = 0;
  for (const auto& p : pts) {
    auto env = coord_env(a.space, p);
    Eigen::MatrixXd M(3, a.space.dim());
    try {
      for (int mu = 0; mu < a.space.dim(); ++mu) {
        M(0, mu) = eval(gc[mu], env, plan.tube);
        M(1, mu) = eval(gy[mu], env, plan.tube);
        M(2, mu) = eval(gz[mu], env, plan.tube);
      }
    } catch (const EvalError&) {
      continue;
    }
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(M);
    auto sv = svd.singularValues();
    // degenerate point: the ansatz gradients themselves are dependent here
    Eigen::MatrixXd J(2, a.space.dim());
    J.row(0) = M.row(1);
    J.row(1) = M.row(2);
    Eigen::JacobiSVD<Eigen::MatrixXd> jsvd(J);
    if (jsvd.singularValues()(1) <= 1e-10 * (1.0 + jsvd.singularValues()(0))) continue;
    ++res.tested;
    if (sv(2) > 1e-8 * sv(0)) ++fail;
  }
  if (res.tested == 0) throw NumericsError("closure_test: degenerate sampling, all points excluded");
  res.fail_fraction = static_cast<double>(fail) / res.tested;
  res.ok = fail == 0;
  return res;
}

std::optional<Expr> rewrite_in_yz(const Expr& cond, const AnsatzPair& a, const SamplePlan& plan) {
  Expr Y = var("y"), Z = var("z");
  struct Cand {
    Expr pat;
    Expr rep;
  };
  std::vector<Cand> cands = {
      {a.y, Y},
      {a.z, Z},
      {simplify(mul2(a.y, a.z)), mul2(Y, Z)},
      {simplify(pow(a.y, Rational(2))), pow(Y, Rational(2))},
      {simplify(pow(a.z, Rational(2))), pow(Z, Rational(2))},
  };

  std::function<Expr(const Expr&)> rec = [&](const Expr& e) -> Expr {
    for (const Cand& c : cands)
      if (e.get() == c.pat.get()) return c.rep;
    if (e->kind == Kind::Pow) {
      for (const Cand& c : cands) {
        if (c.pat->kind == Kind::Pow && c.pat->kids[0].get() == e->kids[0].get() &&
            !c.pat->exponent.is_zero()) {
          if (auto ratio = rat::div(e->exponent, c.pat->exponent)) return pow(c.rep, *ratio);
        }
        if (c.pat.get() == e->kids[0].get()) return pow(c.rep, e->exponent);
      }
    }
    if (e->kids.empty()) return e;
    std::vector<Expr> kids;
    for (const Expr& k : e->kids) kids.push_back(rec(k));
    switch (e->kind) {
      case Kind::Add: return add(std::move(kids));
      case Kind::Mul: return mul(std::move(kids));
      case Kind::Pow: return pow(kids[0], e->exponent);
      case Kind::Call: return call(e->fn, kids[0]);
      default: return e;
    }
  };

  auto numeric_ok = [&](const Expr& yz_expr) {
    auto pts = sample_points(a.space.dim(), plan);
    int checked = 0;
    for (const auto& p : pts) {
      auto env = coord_env(a.space, p);
      try {
        double orig = eval(cond, env, plan.tube);
        double yv = eval(a.y, env, plan.tube);
        double zv = eval(a.z, env, plan.tube);
        double sub = eval(yz_expr, {{"y", yv}, {"z", zv}}, 0.0);
        if (std::abs(orig - sub) > 1e-9 * (1.0 + std::abs(orig))) return false;
        ++checked;
      } catch (const EvalError&) {
        continue;
      }
    }
    return checked > 0;
  };

  Expr candidate = simplify(rec(simplify(cond)));
  if (depends_on(candidate, coord_set(a.space))) {
    // fallback: exact linear combination over a small (y, z) basis, fitted
    // numerically and confirmed symbolically
    struct Basis {
      Expr xs;
      Expr yz;
    };
    std::vector<Basis> basis = {
        {kOne, kOne},
        {a.y, Y},
        {a.z, Z},
        {simplify(pow(a.y, Rational(2))), pow(Y, Rational(2))},
        {simplify(pow(a.z, Rational(2))), pow(Z, Rational(2))},
        {simplify(mul2(a.y, a.z)), mul2(Y, Z)},
        {simplify(pow(a.y, Rational(-1))), pow(Y, Rational(-1))},
        {simplify(pow(a.z, Rational(-1))), pow(Z, Rational(-1))},
    };
    const int nb = static_cast<int>(basis.size());
    auto pts = sample_points(a.space.dim(), plan);
    std::vector<std::vector<double>> rows;
    std::vector<double> rhs;
    for (const auto& p : pts) {
      auto env = coord_env(a.space, p);
      std::vector<double> row(nb);
      try {
        double target = eval(cond, env, plan.tube);
        for (int j = 0; j < nb; ++j) row[j] = eval(basis[j].xs, env, plan.tube);
        rows.push_back(std::move(row));
        rhs.push_back(target);
      } catch (const EvalError&) {
        continue;
      }
      if (static_cast<int>(rows.size()) >= 4 * nb) break;
    }
    if (static_cast<int>(rows.size()) < 2 * nb) return std::nullopt;
    Eigen::MatrixXd A(rows.size(), nb);
    Eigen::VectorXd b(rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
      for (int j = 0; j < nb; ++j) A(i, j) = rows[i][j];
      b(i) = rhs[i];
    }
    Eigen::VectorXd coef = A.bdcSvd(Eigen::ComputeThinU | Eigen::ComputeThinV).solve(b);
    // snap each coefficient to a nearby rational; reject if none is close
    std::vector<Expr> terms_x, terms_yz;
    for (int j = 0; j < nb; ++j) {
      double c = coef(j);
      if (std::abs(c) <= 1e-9) continue;
      auto rc = rat::from_double(c, 1e-8, 100000);
      if (!rc) return std::nullopt;
      terms_x.push_back(mul2(num(*rc), basis[j].xs));
      terms_yz.push_back(mul2(num(*rc), basis[j].yz));
    }
    Expr combo_x = simplify(add(std::move(terms_x)));
    if (!is_zero(simplify(sub(cond, combo_x)))) return std::nullopt;
    candidate = simplify(add(std::move(terms_yz)));
    if (!numeric_ok(candidate)) return std::nullopt;
    return candidate;
  }

  // numeric cross-check of the rewrite
  if (!numeric_ok(candidate)) return std::nullopt;
  return candidate;
}

namespace {

ConditionFunction make_condition(const Expr& x_form, const AnsatzPair& a, const SamplePlan& plan) {
  ConditionFunction cf;
  cf.x_form = simplify(x_form);
  if (!depends_on(cf.x_form, [&] {
        std::set<std::string> s;
        for (const auto& c : a.space.coords()) s.insert(c);
        return s;
      }())) {
    cf.yz_form = cf.x_form;
    cf.closed = true;
    return cf;
  }
  if (auto yz = rewrite_in_yz(cf.x_form, a, plan)) {
    cf.yz_form = yz;
    cf.closed = true;
    return cf;
  }
  ClosureResult cr = closure_test(cf.x_form, a, plan);
  cf.closed = cr.ok;
  cf.numeric_only = cr.ok;
  return cf;
}

}  // namespace

ReductionSystem compute_conditions(const AnsatzPair& a, const SamplePlan& plan) {
  MetricContext ctx(a.space);
  ReductionSystem sys{a, {}, {}, {}, {}, {}, CaseKind::NotClosed};
  sys.r = make_condition(grad_dot(a.y, a.y, ctx), a, plan);
  sys.q = make_condition(grad_dot(a.y, a.z, ctx), a, plan);
  sys.s = make_condition(grad_dot(a.z, a.z, ctx), a, plan);
  sys.R_box = make_condition(box(a.y, ctx), a, plan);
  sys.S_box = make_condition(box(a.z, ctx), a, plan);
  if (sys.r.closed && sys.q.closed && sys.s.closed) {
    sys.kind = classify(sys, plan);
  }
  return sys;
}

CaseKind classify(const ReductionSystem& sys, const SamplePlan& plan) {
  if (!(sys.r.closed && sys.q.closed && sys.s.closed))
    throw SpecError("classify: contraction conditions are not closed");
  const double ztol = 1e-10;
  auto pts = sample_points(sys.ansatz.space.dim(), plan);
  int pos = 0, negc = 0, parab = 0, first = 0, used = 0;
  for (const auto& p : pts) {
    auto env = coord_env(sys.ansatz.space, p);
    double rv, qv, sv;
    try {
      rv = eval(sys.r.x_form, env, plan.tube);
      qv = eval(sys.q.x_form, env, plan.tube);
      sv = eval(sys.s.x_form, env, plan.tube);
    } catch (const EvalError&) {
      continue;
    }
    ++used;
    double disc = rv * sv - qv * qv;
    double mag = rv * rv + qv * qv + sv * sv;
    if (disc > ztol) {
      ++pos;
    } else if (disc < -ztol) {
      ++negc;
    } else if (mag > ztol) {
      ++parab;
    } else {
      ++first;
    }
  }
  if (used == 0) throw NumericsError("classify: degenerate sampling");
  if (pos == used) return CaseKind::Elliptic;
  if (negc == used) return CaseKind::Hyperbolic;
  if (parab == used) return CaseKind::Parabolic;
  if (first == used) return CaseKind::FirstOrder;
  return CaseKind::Mixed;
}

ReducedPDE assemble_reduced(const ReductionSystem& sys, const Expr& F) {
  if (!sys.all_closed())
    throw SpecError("assemble_reduced: reduction conditions do not close over (y, z)");
  auto coeff = [](const ConditionFunction& c) { return c.yz_form ? *c.yz_form : c.x_form; };
  ReducedPDE pde;
  pde.c_yy = coeff(sys.r);
  pde.c_yz = simplify(mul2(num(2), coeff(sys.q)));
  pde.c_zz = coeff(sys.s);
  pde.c_y = coeff(sys.R_box);
  pde.c_z = coeff(sys.S_box);
  pde.F = F;
  return pde;
}

}  // namespace wavered
