#include "wavered/sampling.hpp"

#include <cmath>
#include <random>

namespace wavered {

std::vector<Point> sample_points(int dim, const SamplePlan& plan) {
  std::mt19937 rng(plan.seed);
  std::uniform_real_distribution<double> dist(plan.lo, plan.hi);
  std::vector<Point> pts(plan.points, Point(dim));
  for (auto& p : pts)
    for (double& c : p) c = dist(rng);
  return pts;
}

std::vector<std::optional<double>> sweep_values(
    const std::vector<Point>& pts, const std::function<std::optional<double>(const Point&)>& fn,
    Exec exec) {
  std::vector<std::optional<double>> vals(pts.size());
  if (exec == Exec::Parallel) {
#pragma omp parallel for schedule(dynamic)
    for (long long i = 0; i < static_cast<long long>(pts.size()); ++i) vals[i] = fn(pts[i]);
  } else {
    for (std::size_t i = 0; i < pts.size(); ++i) vals[i] = fn(pts[i]);
  }
  return vals;
}

SweepStats sweep(const std::vector<Point>& pts,
                 const std::function<std::optional<double>(const Point&)>& fn, Exec exec) {
  auto vals = sweep_values(pts, fn, exec);
  SweepStats st;
  double sum = 0.0;
  for (const auto& v : vals) {
    if (!v) {
      ++st.excluded;
      continue;
    }
    double a = std::abs(*v);
    if (a > st.max_abs) st.max_abs = a;
    sum += a;
    ++st.used;
  }
  st.mean_abs = st.used ? sum / st.used : 0.0;
  return st;
}

}  // namespace wavered
