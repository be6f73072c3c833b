#include "wavered/verify.hpp"

#include <cmath>
#include <functional>

#include "wavered/errors.hpp"

namespace wavered {

namespace {

using PointFn = std::function<std::optional<double>(const Point&)>;

std::map<std::string, double> env_of(const VarSpace& space, const Point& p) {
  std::map<std::string, double> env;
  for (int mu = 0; mu <= space.n(); ++mu) env[space.coord(mu)] = p[mu];
  return env;
}

CondStat run_condition(const std::string& name, const std::vector<Point>& pts, const PointFn& fn,
                       double tol, Exec exec) {
  SweepStats st = sweep(pts, fn, exec);
  CondStat c;
  c.name = name;
  c.max_abs = st.max_abs;
  c.mean_abs = st.mean_abs;
  c.used = st.used;
  c.excluded = st.excluded;
  c.pass = st.used * 2 > static_cast<int>(pts.size()) && st.max_abs <= tol;
  return c;
}

ResidualReport assemble(std::vector<CondStat> conds, double tol) {
  ResidualReport rep;
  rep.conditions = std::move(conds);
  rep.tol = tol;
  rep.pass = !rep.conditions.empty();
  for (const auto& c : rep.conditions) rep.pass = rep.pass && c.pass;
  return rep;
}

// Deterministic rejection sampling: oversample and keep the first
// plan.points points where every condition evaluates, so singular loci and
// domain boundaries do not poison the statistics. Throws when fewer than
// half of the requested points are admissible.
std::vector<Point> admissible_points(int dim, const SamplePlan& plan,
                                     const std::vector<PointFn>& fns, int oversample,
                                     const char* who) {
  SamplePlan big = plan;
  big.points = plan.points * oversample;
  auto cand = sample_points(dim, big);
  std::vector<Point> keep;
  for (const auto& p : cand) {
    if (static_cast<int>(keep.size()) >= plan.points) break;
    bool ok = true;
    for (const auto& f : fns)
      if (!f(p).has_value()) {
        ok = false;
        break;
      }
    if (ok) keep.push_back(p);
  }
  if (static_cast<int>(keep.size()) * 2 < plan.points)
    throw NumericsError(std::string(who) +
                        ": fewer than half of the requested points are admissible");
  return keep;
}

double param_dist(const ResolvedBranch& a, const ResolvedBranch& b) {
  double d = 0.0;
  for (std::size_t i = 0; i < a.p.size() && i < b.p.size(); ++i)
    d += std::abs(std::remainder(a.p[i] - b.p[i], 2 * M_PI));
  for (std::size_t i = 0; i < a.s.size() && i < b.s.size(); ++i)
    d += std::abs(std::remainder(a.s[i] - b.s[i], 2 * M_PI));
  return d;
}

// resolve at x and return the branch closest in parameters to ref (or branch
// 0 when ref is null); nullopt on resolution failure or branch jump > 0.1
std::optional<ResolvedBranch> branch_at(const NullFamily& f, const Point& x,
                                        const ResolvedBranch* ref) {
  ResolvedPoint rp;
  try {
    rp = resolve_parameters(f, x);
  } catch (const std::exception&) {
    return std::nullopt;
  }
  if (rp.branches.empty()) return std::nullopt;
  if (!ref || f.rank == 0) return rp.branches.front();
  std::size_t best = 0;
  double bestd = param_dist(rp.branches[0], *ref);
  for (std::size_t i = 1; i < rp.branches.size(); ++i) {
    double d = param_dist(rp.branches[i], *ref);
    if (d < bestd) {
      bestd = d;
      best = i;
    }
  }
  if (bestd > 0.1) return std::nullopt;  // branch discontinuity
  return rp.branches[best];
}

// central finite-difference d'Alembertian of a branch-resolved scalar field
std::optional<double> fd_box(const std::function<std::optional<double>(const Point&)>& field,
                             const Point& x, double center) {
  double acc = 0.0;
  for (int mu = 0; mu < 3; ++mu) {
    double h = 1e-5 * (1.0 + std::abs(x[mu]));
    Point xp = x, xm = x;
    xp[mu] += h;
    xm[mu] -= h;
    auto fp = field(xp);
    auto fm = field(xm);
    if (!fp || !fm) return std::nullopt;
    double second = (*fp - 2.0 * center + *fm) / (h * h);
    acc += (mu == 0 ? 1.0 : -1.0) * second;
  }
  return acc;
}

double eval_vw(const Expr& target, double v, double w) {
  return eval(target, {{"v", v}, {"w", w}}, 0.0);
}

struct FamilyData {
  NullFamily f;
  double mink(const double a[3], const double b[3]) const {
    return a[0] * b[0] - a[1] * b[1] - a[2] * b[2];
  }
  bool components(const ResolvedBranch& b, double A[3], double C[3]) const {
    std::map<std::string, double> env;
    if (f.rank == 1) {
      env["p"] = b.p.at(0);
      env["s"] = b.s.at(0);
    } else if (f.rank == 2) {
      env["p1"] = b.p.at(0);
      env["p2"] = b.p.at(1);
    }
    try {
      for (int mu = 0; mu < 3; ++mu) {
        A[mu] = eval(f.A[mu], env, 0.0);
        C[mu] = eval(f.C[mu], env, 0.0);
      }
    } catch (const EvalError&) {
      return false;
    }
    return true;
  }
};

}  // namespace

ResidualReport check_conditions(const CandidateSystem& sys, const SamplePlan& plan, double tol,
                                Exec exec) {
  const bool parametric = sys.family.has_value();
  if (tol < 0) tol = parametric ? 1e-4 : 1e-8;
  if (!parametric && (!sys.v_expr || !sys.w_expr))
    throw SpecError("check_conditions: need either explicit v, w or a family");

  std::vector<CondStat> conds;

  if (!parametric) {
    MetricContext ctx(sys.space);
    Expr v = simplify(*sys.v_expr), w = simplify(*sys.w_expr);
    Expr gv = grad_dot(v, v, ctx);
    Expr gw = grad_dot(w, w, ctx);
    Expr gvw = grad_dot(v, w, ctx);
    Expr bv = box(v, ctx);
    Expr bw = box(w, ctx);

    auto residual = [&](const Expr& lhs, const Expr& target, bool with_target) {
      return [&, lhs, target, with_target](const Point& x) -> std::optional<double> {
        try {
          auto env = env_of(sys.space, x);
          double val = eval(lhs, env, plan.tube);
          if (!with_target) return std::abs(val);
          double vv = eval(v, env, plan.tube);
          double ww = eval(w, env, plan.tube);
          return std::abs(val - eval_vw(target, vv, ww));
        } catch (const EvalError&) {
          return std::nullopt;
        }
      };
    };

    const std::vector<std::pair<const char*, PointFn>> fns = {
        {"null_v", residual(gv, kZero, false)},
        {"null_w", residual(gw, kZero, false)},
        {"contraction", residual(gvw, sys.h, true)},
        {"box_v", residual(bv, sys.V, true)},
        {"box_w", residual(bw, sys.W, true)}};
    std::vector<PointFn> all;
    for (const auto& [name, fn] : fns) all.push_back(fn);
    auto pts = admissible_points(sys.space.dim(), plan, all, 64, "check_conditions");
    for (const auto& [name, fn] : fns) conds.push_back(run_condition(name, pts, fn, tol, exec));
    return assemble(std::move(conds), tol);
  }

  FamilyData fd{*sys.family};

  auto algebraic = [&](int which) {
    return [&, which](const Point& x) -> std::optional<double> {
      auto b = branch_at(fd.f, x, nullptr);
      if (!b) return std::nullopt;
      double A[3], C[3];
      if (!fd.components(*b, A, C)) return std::nullopt;
      switch (which) {
        case 0: return std::abs(fd.mink(A, A));
        case 1: return std::abs(fd.mink(C, C));
        default:
          try {
            return std::abs(fd.mink(A, C) - eval_vw(sys.h, b->v, b->w));
          } catch (const EvalError&) {
            return std::nullopt;
          }
      }
    };
  };

  auto box_residual = [&](bool v_side, const Expr& target) {
    return [&, v_side, target](const Point& x) -> std::optional<double> {
      auto center = branch_at(fd.f, x, nullptr);
      if (!center) return std::nullopt;
      auto field = [&](const Point& xx) -> std::optional<double> {
        auto b = branch_at(fd.f, xx, &*center);
        if (!b) return std::nullopt;
        return v_side ? b->v : b->w;
      };
      auto bx = fd_box(field, x, v_side ? center->v : center->w);
      if (!bx) return std::nullopt;
      try {
        return std::abs(*bx - eval_vw(target, center->v, center->w));
      } catch (const EvalError&) {
        return std::nullopt;
      }
    };
  };

  const std::vector<std::pair<const char*, PointFn>> fns = {
      {"null_v", algebraic(0)},
      {"null_w", algebraic(1)},
      {"contraction", algebraic(2)},
      {"box_v", box_residual(true, sys.V)},
      {"box_w", box_residual(false, sys.W)}};
  std::vector<PointFn> all;
  for (const auto& [name, fn] : fns) all.push_back(fn);
  auto pts = admissible_points(3, plan, all, 4, "check_conditions");
  for (const auto& [name, fn] : fns) conds.push_back(run_condition(name, pts, fn, tol, exec));
  return assemble(std::move(conds), tol);
}

ResidualReport check_composed(const ComposedSolution& cs, const SamplePlan& plan, double tol,
                              Exec exec) {
  const bool parametric = cs.family.has_value();
  if (tol < 0) tol = parametric ? 1e-4 : 1e-8;

  std::vector<CondStat> conds;

  if (!parametric) {
    Expr u;
    if (cs.u_expr) {
      u = simplify(*cs.u_expr);
    } else if (cs.v_expr && cs.w_expr) {
      u = simplify(subst(cs.phi, {{"v", *cs.v_expr}, {"w", *cs.w_expr}}));
    } else {
      throw SpecError("check_composed: need u, explicit v and w, or a family");
    }
    MetricContext ctx(cs.space);
    Expr bu = box(u, ctx);
    auto fn = [&](const Point& x) -> std::optional<double> {
      try {
        auto env = env_of(cs.space, x);
        double uval = eval(u, env, plan.tube);
        double bval = eval(bu, env, plan.tube);
        double fval = eval(cs.F, {{"u", uval}}, plan.tube);
        return std::abs(bval - fval);
      } catch (const EvalError&) {
        return std::nullopt;
      }
    };
    auto pts = admissible_points(cs.space.dim(), plan, {fn}, 64, "check_composed");
    conds.push_back(run_condition("wave_residual", pts, fn, tol, exec));
    return assemble(std::move(conds), tol);
  }

  NullFamily f = *cs.family;
  auto fn = [&](const Point& x) -> std::optional<double> {
    auto center = branch_at(f, x, nullptr);
    if (!center) return std::nullopt;
    auto field = [&](const Point& xx) -> std::optional<double> {
      auto b = branch_at(f, xx, &*center);
      if (!b) return std::nullopt;
      try {
        return eval(cs.phi, {{"v", b->v}, {"w", b->w}}, plan.tube);
      } catch (const EvalError&) {
        return std::nullopt;
      }
    };
    auto ucen = field(x);
    if (!ucen) return std::nullopt;
    auto bu = fd_box(field, x, *ucen);
    if (!bu) return std::nullopt;
    try {
      return std::abs(*bu - eval(cs.F, {{"u", *ucen}}, plan.tube));
    } catch (const EvalError&) {
      return std::nullopt;
    }
  };
  auto pts = admissible_points(3, plan, {fn}, 4, "check_composed");
  conds.push_back(run_condition("wave_residual", pts, fn, tol, exec));
  return assemble(std::move(conds), tol);
}

ResidualReport check_q_invariance(const QOperator& q, const NullFamily& f, const SamplePlan& plan,
                                  double tol, Exec exec) {
  FamilyData fd{f};

  auto residual = [&](bool v_side) {
    return [&, v_side](const Point& x) -> std::optional<double> {
      auto b = branch_at(fd.f, x, nullptr);
      if (!b) return std::nullopt;
      double A[3], C[3];
      if (!fd.components(*b, A, C)) return std::nullopt;
      double den = A[1] * C[2] - A[2] * C[1];
      if (std::abs(den) <= 1e-10) return std::nullopt;
      double t1 = q.sign1 * (C[0] * A[2] - A[0] * C[2]) / den;
      double t2 = q.sign2 * (C[0] * A[1] - A[0] * C[1]) / den;
      const double* L = v_side ? A : C;
      return std::abs(L[0] + t1 * L[1] + t2 * L[2]);
    };
  };

  auto pts = admissible_points(3, plan, {residual(true), residual(false)}, 4,
                               "check_q_invariance");
  std::vector<CondStat> conds;
  conds.push_back(run_condition("Qv", pts, residual(true), tol, exec));
  conds.push_back(run_condition("Qw", pts, residual(false), tol, exec));
  return assemble(std::move(conds), tol);
}

}  // namespace wavered
