// Benchmark of the point-sweep kernel: OpenMP-parallel policy against the
// serial reference, on the wave-operator residual of a composed radial
// solution. Both policies must report bit-identical statistics.

#include <chrono>
#include <cstdio>

#include "wavered/minkowski.hpp"
#include "wavered/sampling.hpp"

using namespace wavered;

namespace {

double run(const std::vector<Point>& pts,
           const std::function<std::optional<double>(const Point&)>& fn, Exec exec,
           SweepStats& stats) {
  auto t0 = std::chrono::steady_clock::now();
  stats = sweep(pts, fn, exec);
  auto t1 = std::chrono::steady_clock::now();
  return std::chrono::duration<double, std::milli>(t1 - t0).count();
}

}  // namespace

int main() {
  VarSpace space(3);
  MetricContext ctx(space);
  Expr u = parse("sqrt(x0^2 - x1^2 - x2^2 - x3^2)", space);
  Expr residual = simplify(sub(box(u, ctx), parse("3 / sqrt(x0^2 - x1^2 - x2^2 - x3^2)", space)));

  auto fn = [&](const Point& x) -> std::optional<double> {
    std::map<std::string, double> env;
    for (int mu = 0; mu < space.dim(); ++mu) env[space.coord(mu)] = x[mu];
    try {
      return std::abs(eval(residual, env, 1e-3));
    } catch (const EvalError&) {
      return std::nullopt;
    }
  };

  std::printf("%-10s %10s %12s %12s %8s\n", "points", "serial ms", "parallel ms", "speedup",
              "match");
  for (int n : {1024, 8192, 65536, 262144}) {
    SamplePlan plan;
    plan.points = n;
    std::vector<Point> pts = sample_points(space.dim(), plan);
    SweepStats a, b;
    double ts = run(pts, fn, Exec::Serial, a);
    double tp = run(pts, fn, Exec::Parallel, b);
    bool match = a.max_abs == b.max_abs && a.mean_abs == b.mean_abs && a.used == b.used &&
                 a.excluded == b.excluded;
    std::printf("%-10d %10.2f %12.2f %11.2fx %8s\n", n, ts, tp, ts / tp,
                match ? "yes" : "NO");
    if (!match) return 1;
  }
  return 0;
}
