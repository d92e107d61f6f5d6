#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

#include "stc/fem.hpp"
#include "stc/geometry.hpp"

namespace stc {

/// The hole covers the whole boundary: no admissible field remains.
class EmptyAdmissibleClass : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

struct TraceResult {
  /// Discrete S(Gamma).
  double s_value = 0.0;
  /// Nonnegative, zero on hole vertices, boundary q-norm 1.
  Field extremal;
  double lambda = 0.0;
  double el_residual = 0.0;
  int iterations = 0;
  bool converged = false;
  std::vector<double> history;
};

/// Minimizes the discrete Rayleigh quotient over fields vanishing on every
/// vertex of the hole. `init` (optional) warm-starts the descent; the default
/// start is 1 on free vertices.
TraceResult solve_trace_constant(const Mesh& mesh, const ProblemConfig& cfg,
                                 const BoundaryHole& hole, std::span<const double> init = {});

/// max over free vertices of |a(u,phi_i) - lambda b(u,phi_i)| / ||phi_i||_{H^1}.
double el_residual(const Mesh& mesh, const ProblemConfig& cfg, const TraceResult& result,
                   const BoundaryHole& hole);

struct PositivityReport {
  /// Minimum over vertices that share no cell with a hole vertex.
  double min_off_hole = 0.0;
  /// max |u| over hole vertices (exactly 0 for solver output).
  double max_on_hole = 0.0;
  std::size_t checked_vertices = 0;
  bool violation = false;
};
PositivityReport positivity_check(const Mesh& mesh, const TraceResult& result,
                                  const BoundaryHole& hole);

/// Solves from `restarts` random positive initial fields and reports the spread
/// of the resulting values.
struct RestartSpread {
  std::vector<double> values;
  double best = 0.0;
  double spread = 0.0;
};
RestartSpread restart_spread(const Mesh& mesh, const ProblemConfig& cfg, const BoundaryHole& hole,
                             int restarts = 3, std::uint64_t seed = 1);

}  // namespace stc
