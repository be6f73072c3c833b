#include "wavered/minkowski.hpp"

namespace wavered {

Expr box(const Expr& e, const MetricContext& ctx) {
  std::vector<Expr> terms;
  for (int mu = 0; mu <= ctx.space.n(); ++mu) {
    std::string c = ctx.space.coord(mu);
    Expr second = diff(diff(e, c), c);
    terms.push_back(mu == 0 ? second : neg(second));
  }
  return simplify(add(std::move(terms)));
}

Expr grad_dot(const Expr& a, const Expr& b, const MetricContext& ctx) {
  std::vector<Expr> terms;
  for (int mu = 0; mu <= ctx.space.n(); ++mu) {
    std::string c = ctx.space.coord(mu);
    Expr t = mul2(diff(a, c), diff(b, c));
    terms.push_back(mu == 0 ? t : neg(t));
  }
  return simplify(add(std::move(terms)));
}

}  // namespace wavered
