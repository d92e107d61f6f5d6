#include "stc/shape_derivative.hpp"

#include <cmath>
#include <string>

#include "power.hpp"
#include "stc/parallel.hpp"

namespace stc {

namespace {

constexpr double kGaussLo = 0.21132486540518711775;
constexpr double kGaussHi = 0.78867513459481288225;

void check_support(const Mesh& mesh, const TangentialField& V) {
  if (V.rule() != ExtensionRule::CutoffTube) return;
  const auto vel = V.nodal_velocity();
  for (std::size_t v = 0; v < mesh.num_vertices(); ++v) {
    if (vel[v].x == 0.0 && vel[v].y == 0.0) continue;
    const double d =
        mesh.is_boundary_vertex(v) ? 0.0 : project_to_boundary(mesh, mesh.vertex(v)).distance;
    if (d > V.delta() * (1.0 + 1e-12)) {
      throw GeometryError("tangential field support leaves the delta-tube at vertex " +
                          std::to_string(v));
    }
  }
}

}  // namespace

ShapeDerivativeResult evaluate_shape_derivative(const Mesh& mesh, const ProblemConfig& cfg,
                                                const BoundaryHole& hole, const TangentialField& V,
                                                const TraceResult& trace,
                                                BoundaryDivergence divergence) {
  if (mesh.dim() != 2) throw GeometryError("shape derivatives are implemented for 2D meshes");
  const auto& u = trace.extremal;
  if (u.size() != mesh.num_vertices()) throw std::invalid_argument("extremal size mismatch");
  const double norm_q = boundary_norm_q(mesh, cfg, u);
  if (std::abs(norm_q - 1.0) > 1e-8) {
    throw std::invalid_argument("shape derivative needs an extremal with unit boundary q-norm, got " +
                                std::to_string(norm_q));
  }
  if (V.nodal_velocity().size() != mesh.num_vertices()) {
    throw GeometryError("tangential field belongs to a different mesh");
  }
  check_support(mesh, V);
  const auto on_hole = hole_vertex_mask(mesh, hole);
  for (std::size_t v = 0; v < u.size(); ++v) {
    if (on_hole[v] && u[v] != 0.0) throw std::invalid_argument("extremal does not vanish on the hole");
  }

  const double p = cfg.p, q = cfg.q;
  const double eps2 = cfg.effective_epsilon() * cfg.effective_epsilon();
  const auto vel = V.nodal_velocity();

  double volume = 0.0;
  for (std::size_t c = 0; c < mesh.num_cells(); ++c) {
    const auto grads = basis_gradients(mesh, c);
    auto v = mesh.cell(c);
    Point g;
    // DV[a][b] = d V_a / d x_b
    double dv[2][2] = {{0.0, 0.0}, {0.0, 0.0}};
    double mass = 0.0;
    for (int k = 0; k < 3; ++k) {
      g = g + u[v[k]] * grads[k];
      const Point w = vel[v[k]];
      dv[0][0] += w.x * grads[k].x;
      dv[0][1] += w.x * grads[k].y;
      dv[1][0] += w.y * grads[k].x;
      dv[1][1] += w.y * grads[k].y;
      mass += abs_pow(u[v[k]], p);
    }
    const double div = dv[0][0] + dv[1][1];
    const double off = 0.5 * (dv[0][1] + dv[1][0]);
    const double quad = g.x * (dv[0][0] * g.x + off * g.y) + g.y * (off * g.x + dv[1][1] * g.y);
    const double r2 = eps2 + dot(g, g);
    const double area = mesh.cell_measure(c);
    volume += area * ((half_pow(r2, p) + mass / 3.0) * div - p * flux_coefficient(r2, p) * quad);
  }

  double weighted = 0.0;  // int |u|^q div_tau V dH
  for (std::size_t fi = 0; fi < mesh.num_facets(); ++fi) {
    const auto& f = mesh.facet(fi);
    const double a = u[f.vertices[0]], b = u[f.vertices[1]];
    const double lo = a + kGaussLo * (b - a), hi = a + kGaussHi * (b - a);
    if (divergence == BoundaryDivergence::FacetStretch) {
      const Point e = mesh.vertex(f.vertices[1]) - mesh.vertex(f.vertices[0]);
      const Point dw = vel[f.vertices[1]] - vel[f.vertices[0]];
      const double stretch = dot(dw, e) / dot(e, e);
      weighted += 0.5 * f.measure * (abs_pow(lo, q) + abs_pow(hi, q)) * stretch;
    } else {
      if (!V.has_closed_form_derivative()) {
        throw std::invalid_argument("closed-form tangential divergence needs a speed derivative");
      }
      const double slo = f.s_begin + kGaussLo * f.measure;
      const double shi = f.s_begin + kGaussHi * f.measure;
      weighted += 0.5 * f.measure *
                  (abs_pow(lo, q) * *V.speed_derivative(slo) + abs_pow(hi, q) * *V.speed_derivative(shi));
    }
  }

  ShapeDerivativeResult out;
  out.volume_term = volume;
  out.boundary_term = -(p / q) * trace.s_value * weighted;
  out.ds_dt = out.boundary_term + out.volume_term;
  return out;
}

BoundaryHole transport_hole(const Mesh& mesh, const BoundaryHole& hole, const TangentialField& V,
                            double t) {
  if (t == 0.0) return hole;
  const auto arcs = hole_arcs(mesh, hole);
  const double period = mesh.facets().back().s_begin + mesh.facets().back().measure;
  std::vector<int> facets;
  double total = 0.0;
  for (const auto& arc : arcs) {
    const double s0 = arc.start;
    const double s1 = arc.start + arc.length;
    const double n0 = s0 + t * V.speed(s0);
    const double n1 = s1 + t * V.speed(s1);
    if (n1 < n0) throw GeometryError("transported arc inverts; step too large");
    total += n1 - n0;
    const BoundaryHole moved = make_hole_from_arc(mesh, n0, n1 - n0);
    facets.insert(facets.end(), moved.facets().begin(), moved.facets().end());
  }
  if (total >= period) throw GeometryError("transported arcs cover the whole boundary");
  const std::size_t count = facets.size();
  BoundaryHole out(mesh, std::move(facets));
  if (out.size() != count) throw GeometryError("transported arcs collide");
  return out;
}

TraceResult transported_solve(const Mesh& mesh, const ProblemConfig& cfg, const BoundaryHole& hole,
                              const TangentialField& V, double t, TransportMode mode,
                              std::span<const double> warm_start) {
  if (mode == TransportMode::FacetSnap) {
    return solve_trace_constant(mesh, cfg, transport_hole(mesh, hole, V, t), warm_start);
  }
  const auto vel = V.nodal_velocity();
  std::vector<Point> moved(mesh.num_vertices());
  for (std::size_t v = 0; v < moved.size(); ++v) moved[v] = mesh.vertex(v) + t * vel[v];
  const Mesh flowed = mesh.deformed(moved);
  return solve_trace_constant(flowed, cfg, hole, warm_start);
}

std::vector<FdSample> fd_check(const Mesh& mesh, const ProblemConfig& cfg, const BoundaryHole& hole,
                               const TangentialField& V, std::span<const double> steps,
                               TransportMode mode, unsigned workers) {
  const TraceResult base = solve_trace_constant(mesh, cfg, hole);
  const double analytic = evaluate_shape_derivative(mesh, cfg, hole, V, base).ds_dt;
  std::vector<FdSample> out(steps.size());
  parallel_for(steps.size(), workers, [&](std::size_t i) {
    const double h = steps[i];
    const TraceResult plus = transported_solve(mesh, cfg, hole, V, h, mode, base.extremal);
    const TraceResult minus = transported_solve(mesh, cfg, hole, V, -h, mode, base.extremal);
    FdSample s;
    s.h = h;
    s.s_plus = plus.s_value;
    s.s_minus = minus.s_value;
    s.fd_value = (plus.s_value - minus.s_value) / (2.0 * h);
    s.analytic = analytic;
    const double diff = std::abs(s.fd_value - analytic);
    s.relative_error = analytic != 0.0 ? diff / std::abs(analytic) : diff;
    s.converged = plus.converged && minus.converged;
    out[i] = s;
  });
  return out;
}

}  // namespace stc
