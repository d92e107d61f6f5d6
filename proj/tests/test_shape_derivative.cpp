#include <cmath>

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "stc/shape_derivative.hpp"

namespace stc {
namespace {

struct DiskCase {
  Mesh mesh = generate_mesh(Disk{1.0}, 0.1);
  ProblemConfig cfg;
  BoundaryHole hole;
  TraceResult base;
  double period = 0.0;
  double arc_end = 0.0;

  DiskCase() {
    cfg.dof_tolerance = 1e-10;
    period = mesh.boundary_measure();
    hole = make_hole_from_arc(mesh, 0.0, 0.25 * period);
    const Arc arc = hole_arcs(mesh, hole).front();
    arc_end = arc.start + arc.length;
    base = solve_trace_constant(mesh, cfg, hole);
  }
  TangentialField bump(double center, double half_width = 0.3) const {
    return TangentialField::tube(mesh, periodic_bump(center, half_width, period),
                                 periodic_bump_derivative(center, half_width, period));
  }
};

const DiskCase& disk() {
  static const DiskCase c;
  return c;
}

TEST(ShapeDerivative, ZeroFieldGivesZero) {
  const auto& c = disk();
  const auto r = evaluate_shape_derivative(c.mesh, c.cfg, c.hole, TangentialField::zero(c.mesh), c.base);
  EXPECT_EQ(r.ds_dt, 0.0);
}

TEST(ShapeDerivative, RotationGivesZero) {
  const auto& c = disk();
  for (double speed : {1.0, -2.5}) {
    const auto r =
        evaluate_shape_derivative(c.mesh, c.cfg, c.hole, TangentialField::rotation(c.mesh, speed), c.base);
    EXPECT_LE(std::abs(r.ds_dt), 1e-12);
  }
}

TEST(ShapeDerivative, MatchesCentralDifferences) {
  const auto& c = disk();
  const TangentialField V = c.bump(c.arc_end);
  const auto r = evaluate_shape_derivative(c.mesh, c.cfg, c.hole, V, c.base);
  const std::vector<double> steps{1e-3 * c.period};
  const auto fd = fd_check(c.mesh, c.cfg, c.hole, V, steps, TransportMode::MeshFlow, 1);
  ASSERT_EQ(fd.size(), 1u);
  EXPECT_TRUE(fd[0].converged);
  EXPECT_NEAR(fd[0].analytic, r.ds_dt, 1e-14);
  EXPECT_LE(std::abs(fd[0].fd_value - r.ds_dt) / std::abs(r.ds_dt), 0.02);
}

TEST(ShapeDerivative, ClosedFormDivergenceIsConsistent) {
  const auto& c = disk();
  const TangentialField V = c.bump(c.arc_end);
  const auto stretch = evaluate_shape_derivative(c.mesh, c.cfg, c.hole, V, c.base);
  const auto closed = evaluate_shape_derivative(c.mesh, c.cfg, c.hole, V, c.base, BoundaryDivergence::ClosedForm);
  EXPECT_NEAR(closed.volume_term, stretch.volume_term, 1e-14);
  EXPECT_NEAR(closed.ds_dt, stretch.ds_dt, 0.05 * std::abs(stretch.ds_dt));
}

TEST(ShapeDerivative, ShiftingTheArcEndOutwardIncreasesS) {
  const auto& c = disk();
  // Positive speed at the end of the arc lengthens the hole.
  const auto r = evaluate_shape_derivative(c.mesh, c.cfg, c.hole, c.bump(c.arc_end), c.base);
  EXPECT_GT(r.ds_dt, 0.0);
  const auto s = evaluate_shape_derivative(c.mesh, c.cfg, c.hole, c.bump(0.0), c.base);
  EXPECT_LT(s.ds_dt, 0.0);
}

// ds/dt is linear in the field.
TEST(ShapeDerivativeProperty, LinearInTheField) {
  const auto& c = disk();
  testing::Generator gen(31);
  for (int trial = 0; trial < 6; ++trial) {
    const TangentialField V1 = c.bump(gen.uniform(0, c.period), gen.uniform(0.2, 0.6));
    const TangentialField V2 = c.bump(gen.uniform(0, c.period), gen.uniform(0.2, 0.6));
    const double a = gen.uniform(-2, 2);
    const double d1 = evaluate_shape_derivative(c.mesh, c.cfg, c.hole, V1, c.base).ds_dt;
    const double d2 = evaluate_shape_derivative(c.mesh, c.cfg, c.hole, V2, c.base).ds_dt;
    const double d = evaluate_shape_derivative(c.mesh, c.cfg, c.hole, V1.scaled(a) + V2, c.base).ds_dt;
    EXPECT_NEAR(d, a * d1 + d2, 1e-10 * (std::abs(a * d1) + std::abs(d2)));
  }
}

TEST(Transport, ZeroTimeKeepsTheHole) {
  const auto& c = disk();
  EXPECT_EQ(transport_hole(c.mesh, c.hole, c.bump(c.arc_end), 0.0), c.hole);
}

TEST(Transport, ConstantSpeedSlidesTheArc) {
  const auto& c = disk();
  const TangentialField V = TangentialField::tube(c.mesh, [](double) { return 0.5; });
  const double t = 0.6;
  const BoundaryHole moved = transport_hole(c.mesh, c.hole, V, t);
  const double h = c.mesh.max_facet_measure();
  EXPECT_NEAR(moved.measure(), c.hole.measure(), h);
  const Arc before = hole_arcs(c.mesh, c.hole).front();
  const Arc after = hole_arcs(c.mesh, moved).front();
  EXPECT_NEAR(after.start, before.start + 0.5 * t, h);
}

TEST(Transport, OneMovingEndpointChangesTheMeasure) {
  const auto& c = disk();
  const TangentialField V = c.bump(c.arc_end, 0.5);
  const double t = 0.2;
  const BoundaryHole moved = transport_hole(c.mesh, c.hole, V, t);
  EXPECT_NEAR(moved.measure() - c.hole.measure(), t, c.mesh.max_facet_measure());
  EXPECT_NEAR(hole_arcs(c.mesh, moved).front().start, hole_arcs(c.mesh, c.hole).front().start, 1e-12);
}

TEST(Transport, SolveIsContinuousInTime) {
  const auto& c = disk();
  const TangentialField V = c.bump(c.arc_end);
  const double h = 1e-2 * c.period;
  const TraceResult r = transported_solve(c.mesh, c.cfg, c.hole, V, h, TransportMode::MeshFlow, c.base.extremal);
  EXPECT_NEAR(r.s_value, c.base.s_value, 0.01 * c.base.s_value);
  // Snapping moves the endpoint by whole facets, so the step here is one
  // facet rather than h.
  const TraceResult snap =
      transported_solve(c.mesh, c.cfg, c.hole, V, h, TransportMode::FacetSnap, c.base.extremal);
  EXPECT_GE(snap.s_value, c.base.s_value);
  EXPECT_NEAR(snap.s_value, c.base.s_value, 0.02 * c.base.s_value);
}

TEST(Transport, RotationFiniteDifferencesVanish) {
  const auto& c = disk();
  const std::vector<double> steps{1e-2 * c.period, 1e-3 * c.period};
  const auto fd = fd_check(c.mesh, c.cfg, c.hole, TangentialField::rotation(c.mesh, 1.0), steps,
                           TransportMode::MeshFlow, 1);
  for (const auto& s : fd) EXPECT_LE(std::abs(s.fd_value), 1e-6);
}

}  // namespace
}  // namespace stc
