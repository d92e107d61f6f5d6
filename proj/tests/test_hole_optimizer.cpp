#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "stc/hole_optimizer.hpp"

namespace stc {
namespace {

ProblemConfig quadratic() { return ProblemConfig{}; }

// Exhaustive oracle: every single arc of `facets` consecutive facets.
double best_single_arc(const Mesh& m, const ProblemConfig& cfg, int facets) {
  const int n = static_cast<int>(m.num_facets());
  double best = std::numeric_limits<double>::infinity();
  for (int s = 0; s < n; ++s) {
    std::vector<int> ids;
    for (int k = 0; k < facets; ++k) ids.push_back((s + k) % n);
    best = std::min(best, solve_trace_constant(m, cfg, BoundaryHole(m, ids)).s_value);
  }
  return best;
}

TEST(Optimizer, TargetMeasure) {
  const Mesh m = generate_mesh(Disk{1.0}, 0.2);
  EXPECT_NEAR(target_measure(m, 0.25), 0.25 * m.boundary_measure(), 1e-14);
}

TEST(Optimizer, RandomHolesAreReproducibleAndFitTheTarget) {
  const Mesh m = generate_mesh(Disk{1.0}, 0.1);
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const BoundaryHole a = random_hole(m, 0.3, seed);
    EXPECT_EQ(a, random_hole(m, 0.3, seed));
    EXPECT_LE(std::abs(a.measure() - target_measure(m, 0.3)), m.max_facet_measure());
    EXPECT_GE(hole_arcs(m, a).size(), 1u);
    EXPECT_LE(hole_arcs(m, a).size(), 3u);
  }
}

TEST(Optimizer, AlternatingFindsASingleArcOnTheDisk) {
  const Mesh m = generate_mesh(Disk{1.0}, 0.15);
  const ProblemConfig cfg = quadratic();
  const OptimizationRun run = optimize_hole_alternating(m, cfg, 0.25, random_hole(m, 0.25, 3));
  EXPECT_TRUE(run.converged);
  EXPECT_TRUE(run.solve_converged);
  EXPECT_EQ(hole_arcs(m, run.best_hole).size(), 1u);
  EXPECT_LE(std::abs(run.best_hole.measure() - target_measure(m, 0.25)), m.max_facet_measure());
  EXPECT_NEAR(run.alpha_effective * m.boundary_measure(), run.best_hole.measure(), 1e-12);
  const int facets = static_cast<int>(run.best_hole.size());
  EXPECT_NEAR(run.best_value, best_single_arc(m, cfg, facets), 1e-9 * run.best_value);
  for (std::size_t i = 1; i < run.history.size(); ++i) {
    EXPECT_LT(run.history[i].value, run.history[i - 1].value);
  }
  EXPECT_EQ(run.history.back().value, run.best_value);
}

TEST(Optimizer, SingleArcBeatsTwoAntipodalArcs) {
  const Mesh m = generate_mesh(Disk{1.0}, 0.1);
  const ProblemConfig cfg = quadratic();
  const double P = m.boundary_measure();
  const double single = solve_trace_constant(m, cfg, make_hole_from_arc(m, 0.0, 0.25 * P)).s_value;
  const BoundaryHole two = hole_union(m, make_hole_from_arc(m, 0.0, 0.125 * P),
                                      make_hole_from_arc(m, 0.5 * P, 0.125 * P));
  EXPECT_LT(single, solve_trace_constant(m, cfg, two).s_value);
}

TEST(Optimizer, ZeroSetMatchesTheHole) {
  const Mesh m = generate_mesh(Disk{1.0}, 0.15);
  const ProblemConfig cfg = quadratic();
  EXPECT_EQ(zero_set_measure(m, TraceResult{1.0, Field(m.num_vertices(), 1.0)}), 0.0);
  const OptimizationRun run = optimize_hole_alternating(m, cfg, 0.3);
  TraceResult r;
  r.extremal = run.best_extremal;
  EXPECT_NEAR(zero_set_measure(m, r), run.best_hole.measure(), 1e-12);
  EXPECT_LE(std::abs(zero_set_measure(m, r) - target_measure(m, 0.3)), m.max_facet_measure());
}

// At coarser resolutions the ring structure of the mesh makes S vary by a
// few 1e-4 with the arc position, enough for real one-facet descents.
TEST(Optimizer, ShapeGradientLeavesDiskArcsInPlace) {
  const Mesh m = generate_mesh(Disk{1.0}, 0.05);
  const BoundaryHole init = make_hole_from_arc(m, 1.0, target_measure(m, 0.25));
  const OptimizationRun run = optimize_hole_shape_gradient(m, quadratic(), 0.25, init);
  EXPECT_TRUE(run.converged);
  const Arc before = hole_arcs(m, init).front();
  const Arc after = hole_arcs(m, run.best_hole).front();
  EXPECT_LE(std::abs(after.start - before.start), m.max_facet_measure() + 1e-12);
  EXPECT_LE(std::abs(after.length - before.length), m.max_facet_measure() + 1e-12);
}

TEST(Optimizer, ShapeGradientReachesTheSweepOptimumOnARectangle) {
  const Mesh m = generate_mesh(Rectangle{2.0, 1.0}, 0.1);
  const ProblemConfig cfg = quadratic();
  // Arc centred on the bottom edge.
  const double length = target_measure(m, 0.2);
  const BoundaryHole init = make_hole_from_arc(m, 1.0 - 0.5 * length, length);
  const OptimizationRun run = optimize_hole_shape_gradient(m, cfg, 0.2, init);
  const double oracle = best_single_arc(m, cfg, static_cast<int>(init.size()));
  EXPECT_LE(run.best_value, oracle * 1.005);
  EXPECT_GE(run.best_value, oracle * (1 - 1e-9));
}

TEST(Optimizer, CombinedIsNoWorseThanAlternating) {
  const Mesh m = generate_mesh(Rectangle{2.0, 1.0}, 0.2);
  const ProblemConfig cfg = quadratic();
  const BoundaryHole init = random_hole(m, 0.2, 4);
  const double alt = optimize_hole_alternating(m, cfg, 0.2, init).best_value;
  const OptimizationRun comb = optimize_hole_combined(m, cfg, 0.2, init);
  EXPECT_LE(comb.best_value, alt * (1 + 1e-12));
  EXPECT_EQ(comb.strategy, Strategy::Combined);
}

TEST(Optimizer, MultistartIsDeterministic) {
  const Mesh m = generate_mesh(Disk{1.0}, 0.25);
  const auto a = optimize_hole_multistart(m, quadratic(), 0.25, Strategy::Alternating, 3, 9, 1);
  const auto b = optimize_hole_multistart(m, quadratic(), 0.25, Strategy::Alternating, 3, 9, 2);
  ASSERT_EQ(a.runs.size(), 3u);
  EXPECT_EQ(a.best, b.best);
  for (std::size_t i = 0; i < a.runs.size(); ++i) {
    EXPECT_EQ(a.runs[i].best_value, b.runs[i].best_value);
    EXPECT_EQ(a.runs[i].best_hole, b.runs[i].best_hole);
  }
  for (const auto& r : a.runs) EXPECT_GE(r.best_value, a.best_run().best_value);
}

TEST(Optimizer, RejectsIntervalsAndBadFractions) {
  const Mesh line = generate_mesh(Interval{0.0, 1.0}, 0.1);
  EXPECT_THROW(optimize_hole_alternating(line, quadratic(), 0.5), GeometryError);
  const Mesh m = generate_mesh(Disk{1.0}, 0.25);
  EXPECT_ANY_THROW(optimize_hole_alternating(m, quadratic(), 1.5));
}

// The optimal constant increases strictly with the hole fraction.
TEST(OptimizerProperty, OptimalValueIncreasesWithAlpha) {
  const Mesh m = generate_mesh(Disk{1.0}, 0.2);
  double prev = 0.0;
  for (int i = 1; i <= 9; ++i) {
    const OptimizationRun run = optimize_hole_alternating(m, quadratic(), 0.1 * i);
    EXPECT_GT(run.best_value, prev) << "alpha " << 0.1 * i;
    prev = run.best_value;
  }
}

}  // namespace
}  // namespace stc
