#pragma once

#include <span>
#include <vector>

#include "stc/fem.hpp"
#include "stc/geometry.hpp"
#include "stc/trace_solver.hpp"

namespace stc {

/// How the tangential divergence on boundary facets is evaluated.
enum class BoundaryDivergence {
  /// Stretch rate of each facet under the nodal velocities,
  /// (V_1 - V_0) . e / |e|^2. Consistent with moving the mesh.
  FacetStretch,
  /// Derivative of the closed-form speed at the facet quadrature points.
  ClosedForm,
};

/// How Gamma_t = Phi_t(Gamma) is realized for finite differences.
enum class TransportMode {
  /// Move every vertex by t V and keep the hole facets; the hole travels with
  /// the mesh.
  MeshFlow,
  /// Move arc endpoints along the fixed mesh and snap to whole facets.
  FacetSnap,
};

struct FdSample {
  double h = 0.0;
  double s_plus = 0.0;
  double s_minus = 0.0;
  double fd_value = 0.0;
  double analytic = 0.0;
  double relative_error = 0.0;
  bool converged = true;
};

struct ShapeDerivativeResult {
  double ds_dt = 0.0;
  /// -(p/q) S int |u|^q div_tau V dH
  double boundary_term = 0.0;
  /// int (|u|^p + |grad u|^p) div V - p int |grad u|^{p-2} <grad u, DV^T grad u>
  double volume_term = 0.0;
  std::vector<FdSample> fd_estimates;
};

/// First-order sensitivity of S(Gamma_t) for the flow of V, evaluated at a
/// normalized extremal. DV and div V are taken cell-wise from the P1
/// interpolant of V.
ShapeDerivativeResult evaluate_shape_derivative(
    const Mesh& mesh, const ProblemConfig& cfg, const BoundaryHole& hole, const TangentialField& V,
    const TraceResult& trace, BoundaryDivergence divergence = BoundaryDivergence::FacetStretch);

/// Moves the endpoints of each maximal arc of the hole by t * speed and
/// re-snaps to whole facets. Throws GeometryError when arcs collide or invert.
BoundaryHole transport_hole(const Mesh& mesh, const BoundaryHole& hole, const TangentialField& V,
                            double t);

/// Discrete s(t) = S(Gamma_t) for the chosen realization of the flow.
TraceResult transported_solve(const Mesh& mesh, const ProblemConfig& cfg, const BoundaryHole& hole,
                              const TangentialField& V, double t, TransportMode mode,
                              std::span<const double> warm_start = {});

/// Central differences (s(h) - s(-h)) / (2h) against the analytic derivative.
/// Steps are solved in parallel on up to `workers` threads (0 = all cores).
std::vector<FdSample> fd_check(const Mesh& mesh, const ProblemConfig& cfg, const BoundaryHole& hole,
                               const TangentialField& V, std::span<const double> steps,
                               TransportMode mode = TransportMode::MeshFlow, unsigned workers = 0);

}  // namespace stc
