#pragma once

#include <array>
#include <limits>
#include <span>
#include <stdexcept>
#include <vector>

#include "stc/geometry.hpp"

namespace stc {

/// Nodal values of a P1 field, one per mesh vertex.
using Field = std::vector<double>;

class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Thrown when a field vanishes on the whole boundary, i.e. lies in W_0^{1,p}.
class NotAdmissible : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

struct ProblemConfig {
  double p = 2.0;
  double q = 2.0;
  /// Gradient regularization (eps^2 + |grad u|^2)^{p/2}. Negative selects the
  /// default: 1e-8 for p < 2, 0 otherwise.
  double epsilon = -1.0;
  /// Bound on the scaled Euler-Lagrange residual at convergence.
  double dof_tolerance = 1e-9;
  /// Bound on the relative quotient decrease over the last 5 iterations.
  double decrease_tolerance = 1e-12;
  int max_inner_iterations = 200000;

  double effective_epsilon() const { return epsilon >= 0.0 ? epsilon : (p < 2.0 ? 1e-8 : 0.0); }
};

/// p_* = p(N-1)/(N-p) for p < N, infinity otherwise.
double critical_trace_exponent(double p, int dim);

/// Rejects p <= 1, q < 1, q >= p_*, negative epsilon, nonpositive tolerances.
void validate(const ProblemConfig& cfg, int dim);

/// sum_T |T| (eps^2 + |grad u|^2)^{p/2} + lumped sum_i w_i |u_i|^p.
double energy(const Mesh& mesh, const ProblemConfig& cfg, std::span<const double> u);

/// Boundary integral of |u|^q: two-point Gauss per edge, endpoint values in 1D.
double boundary_norm_q(const Mesh& mesh, const ProblemConfig& cfg, std::span<const double> u);

/// Throws NotAdmissible when max |u| over boundary vertices is at most
/// dof_tolerance times max |u|.
void require_admissible(const Mesh& mesh, const ProblemConfig& cfg, std::span<const double> u);

/// energy(u) / boundary_norm_q(u)^{p/q}. Throws NotAdmissible when the
/// boundary integral vanishes.
double rayleigh_quotient(const Mesh& mesh, const ProblemConfig& cfg, std::span<const double> u);

/// Exact gradient of rayleigh_quotient with respect to the nodal values.
Field quotient_gradient(const Mesh& mesh, const ProblemConfig& cfg, std::span<const double> u);

/// Energy, boundary integral and their scaled first variations:
///   energy_variation[i]   = a(u, phi_i) = (1/p) dE/du_i
///   boundary_variation[i] = b(u, phi_i) = (1/q) dD/du_i
struct QuotientParts {
  double energy = 0.0;
  double boundary = 0.0;
  Field energy_variation;
  Field boundary_variation;
};
void evaluate_parts(const Mesh& mesh, const ProblemConfig& cfg, std::span<const double> u,
                    QuotientParts& out);

/// Integral of |u|^exponent over one boundary facet (same quadrature as the
/// boundary norm).
double facet_power_integral(const Mesh& mesh, int facet, std::span<const double> u,
                            double exponent);

/// Adds weight * integral_f |u|^exponent over the given facets to `value` and
/// weight * integral_f |u|^{exponent-2} u phi_i to `variation` (when non-empty).
void add_facet_power_term(const Mesh& mesh, std::span<const int> facets,
                          std::span<const double> u, double exponent, double weight,
                          double& value, std::span<double> variation);

/// Gradients of the P1 basis functions of a triangle (or segment) cell.
std::array<Point, 3> basis_gradients(const Mesh& mesh, std::size_t cell);

/// H^1 norm of each nodal basis function (with lumped mass), used to scale
/// nodal residuals.
Field basis_h1_norms(const Mesh& mesh);

}  // namespace stc
