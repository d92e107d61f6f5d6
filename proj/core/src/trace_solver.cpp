#include "stc/trace_solver.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "stc/descent.hpp"

namespace stc {

namespace {

QuotientEvaluator trace_evaluator(const Mesh& mesh, const ProblemConfig& cfg) {
  return [&mesh, &cfg](std::span<const double> u, QuotientSample& s) {
    QuotientParts parts;
    parts.energy_variation = std::move(s.numerator_variation);
    parts.boundary_variation = std::move(s.denominator_variation);
    evaluate_parts(mesh, cfg, u, parts);
    s.numerator = parts.energy;
    s.denominator = parts.boundary;
    s.numerator_variation = std::move(parts.energy_variation);
    s.denominator_variation = std::move(parts.boundary_variation);
  };
}

}  // namespace

TraceResult solve_trace_constant(const Mesh& mesh, const ProblemConfig& cfg,
                                 const BoundaryHole& hole, std::span<const double> init) {
  validate(cfg, mesh.dim());
  if (hole.size() >= mesh.num_facets()) {
    throw EmptyAdmissibleClass("hole covers the entire boundary: empty admissible class");
  }
  const auto fixed = hole_vertex_mask(mesh, hole);
  bool free_boundary = false;
  for (std::size_t v = 0; v < mesh.num_vertices() && !free_boundary; ++v) {
    free_boundary = mesh.is_boundary_vertex(v) && !fixed[v];
  }
  if (!free_boundary) {
    throw EmptyAdmissibleClass("every boundary vertex is constrained: empty admissible class");
  }

  Field start(mesh.num_vertices(), 1.0);
  if (!init.empty()) {
    if (init.size() != mesh.num_vertices()) throw std::invalid_argument("warm start size mismatch");
    start.assign(init.begin(), init.end());
    // A warm start from a different hole may vanish on every free boundary vertex.
    double boundary_max = 0.0;
    for (std::size_t v = 0; v < start.size(); ++v) {
      if (mesh.is_boundary_vertex(v) && !fixed[v]) boundary_max = std::max(boundary_max, std::abs(start[v]));
    }
    if (boundary_max == 0.0) start.assign(mesh.num_vertices(), 1.0);
  }

  const Field scale = basis_h1_norms(mesh);
  DescentSettings settings;
  settings.p = cfg.p;
  settings.q = cfg.q;
  settings.residual_tolerance = cfg.dof_tolerance;
  settings.decrease_tolerance = cfg.decrease_tolerance;
  settings.max_iterations = cfg.max_inner_iterations;
  settings.residual_scale = scale;

  DescentOutcome outcome = minimize_quotient(trace_evaluator(mesh, cfg), std::move(start), fixed, settings);

  TraceResult result;
  result.s_value = outcome.value;
  result.extremal = std::move(outcome.u);
  result.lambda = outcome.lambda;
  result.el_residual = outcome.residual;
  result.iterations = outcome.iterations;
  result.converged = outcome.converged;
  result.history = std::move(outcome.history);
  return result;
}

double el_residual(const Mesh& mesh, const ProblemConfig& cfg, const TraceResult& result,
                   const BoundaryHole& hole) {
  QuotientSample sample;
  trace_evaluator(mesh, cfg)(result.extremal, sample);
  const auto fixed = hole_vertex_mask(mesh, hole);
  const Field scale = basis_h1_norms(mesh);
  double residual = 0.0;
  for (std::size_t i = 0; i < fixed.size(); ++i) {
    if (fixed[i]) continue;
    const double r = sample.numerator_variation[i] - result.lambda * sample.denominator_variation[i];
    residual = std::max(residual, std::abs(r) / scale[i]);
  }
  return residual;
}

PositivityReport positivity_check(const Mesh& mesh, const TraceResult& result,
                                  const BoundaryHole& hole) {
  const auto on_hole = hole_vertex_mask(mesh, hole);
  std::vector<bool> adjacent = on_hole;
  for (std::size_t c = 0; c < mesh.num_cells(); ++c) {
    auto v = mesh.cell(c);
    const bool touches = std::any_of(v.begin(), v.end(), [&](int k) { return on_hole[k]; });
    if (touches) {
      for (int k : v) adjacent[k] = true;
    }
  }
  PositivityReport report;
  report.min_off_hole = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < mesh.num_vertices(); ++i) {
    const double x = result.extremal[i];
    if (on_hole[i]) report.max_on_hole = std::max(report.max_on_hole, std::abs(x));
    if (adjacent[i]) continue;
    report.min_off_hole = std::min(report.min_off_hole, x);
    ++report.checked_vertices;
  }
  report.violation = report.min_off_hole < 0.0 || report.max_on_hole != 0.0;
  return report;
}

RestartSpread restart_spread(const Mesh& mesh, const ProblemConfig& cfg, const BoundaryHole& hole,
                             int restarts, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> dist(0.1, 1.0);
  RestartSpread out;
  for (int r = 0; r < restarts; ++r) {
    Field init(mesh.num_vertices());
    for (double& x : init) x = dist(rng);
    out.values.push_back(solve_trace_constant(mesh, cfg, hole, init).s_value);
  }
  const auto [lo, hi] = std::minmax_element(out.values.begin(), out.values.end());
  out.best = *lo;
  out.spread = *hi - *lo;
  return out;
}

}  // namespace stc
