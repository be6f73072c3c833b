#pragma once

#include <functional>
#include <optional>
#include <vector>

namespace wavered {

// Execution policy for the point-sweep kernels. Parallel runs the per-point
// work under OpenMP; aggregation order is fixed, so both policies produce
// bit-identical statistics. Serial is the reference path used in tests and
// the benchmark.
enum class Exec { Serial, Parallel };

struct SamplePlan {
  int points = 64;
  unsigned seed = 12345u;
  double lo = -2.0;
  double hi = 2.0;
  double tube = 1e-3;  // exclusion radius around singular loci
};

using Point = std::vector<double>;

// Deterministic uniform sample of `plan.points` points in [lo, hi]^dim.
std::vector<Point> sample_points(int dim, const SamplePlan& plan);

struct SweepStats {
  double max_abs = 0.0;
  double mean_abs = 0.0;
  int used = 0;
  int excluded = 0;
};

// Evaluates fn at every point (nullopt = excluded) and aggregates in point
// order regardless of policy.
SweepStats sweep(const std::vector<Point>& pts,
                 const std::function<std::optional<double>(const Point&)>& fn, Exec exec);

// Per-point results without aggregation; same policy semantics.
std::vector<std::optional<double>> sweep_values(
    const std::vector<Point>& pts, const std::function<std::optional<double>(const Point&)>& fn,
    Exec exec);

}  // namespace wavered
