#include "stc/fem.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "power.hpp"

namespace stc {

namespace {

// Two-point Gauss rule on [0,1].
constexpr double kGaussLo = 0.21132486540518711775;  // 1/2 - 1/(2 sqrt 3)
constexpr double kGaussHi = 0.78867513459481288225;

double cell_gradient_norm2(const Mesh& mesh, std::size_t c, std::span<const double> u,
                           const std::array<Point, 3>& grads, Point& g) {
  auto v = mesh.cell(c);
  g = {0.0, 0.0};
  for (int k = 0; k <= mesh.dim(); ++k) g = g + u[v[k]] * grads[k];
  return dot(g, g);
}

void check_size(const Mesh& mesh, std::span<const double> u) {
  if (u.size() != mesh.num_vertices()) {
    throw std::invalid_argument("field has " + std::to_string(u.size()) + " values, mesh has " +
                                std::to_string(mesh.num_vertices()) + " vertices");
  }
}

void accumulate_facet(const Mesh& mesh, int idx, std::span<const double> u, double exponent,
                      double weight, double& value, std::span<double> variation) {
  const auto& f = mesh.facet(idx);
  if (mesh.dim() == 1) {
    const double x = u[f.vertices[0]];
    value += weight * f.measure * abs_pow(x, exponent);
    if (!variation.empty()) variation[f.vertices[0]] += weight * f.measure * signed_pow(x, exponent);
    return;
  }
  const double a = u[f.vertices[0]], b = u[f.vertices[1]];
  const double lo = a + kGaussLo * (b - a), hi = a + kGaussHi * (b - a);
  value += weight * 0.5 * f.measure * (abs_pow(lo, exponent) + abs_pow(hi, exponent));
  if (!variation.empty()) {
    const double w = weight * 0.5 * f.measure;
    const double slo = signed_pow(lo, exponent), shi = signed_pow(hi, exponent);
    variation[f.vertices[0]] += w * (slo * (1.0 - kGaussLo) + shi * (1.0 - kGaussHi));
    variation[f.vertices[1]] += w * (slo * kGaussLo + shi * kGaussHi);
  }
}

}  // namespace

double critical_trace_exponent(double p, int dim) {
  if (p < dim) return p * (dim - 1) / (dim - p);
  return std::numeric_limits<double>::infinity();
}

void validate(const ProblemConfig& cfg, int dim) {
  if (!(cfg.p > 1.0)) throw ConfigError("p must exceed 1, got " + std::to_string(cfg.p));
  if (!(cfg.q >= 1.0)) throw ConfigError("q must be at least 1, got " + std::to_string(cfg.q));
  const double crit = critical_trace_exponent(cfg.p, dim);
  if (!(cfg.q < crit)) {
    throw ConfigError("q = " + std::to_string(cfg.q) +
                      " is not subcritical: trace exponent p_* = p(N-1)/(N-p) = " +
                      std::to_string(crit) + " for p = " + std::to_string(cfg.p) +
                      ", N = " + std::to_string(dim));
  }
  if (!(cfg.dof_tolerance > 0)) throw ConfigError("dof_tolerance must be positive");
  if (!(cfg.decrease_tolerance > 0)) throw ConfigError("decrease_tolerance must be positive");
  if (cfg.max_inner_iterations < 1) throw ConfigError("max_inner_iterations must be positive");
}

std::array<Point, 3> basis_gradients(const Mesh& mesh, std::size_t c) {
  auto v = mesh.cell(c);
  if (mesh.dim() == 1) {
    const double h = mesh.vertex(v[1]).x - mesh.vertex(v[0]).x;
    return {Point{-1.0 / h, 0.0}, Point{1.0 / h, 0.0}, Point{}};
  }
  const Point x0 = mesh.vertex(v[0]), x1 = mesh.vertex(v[1]), x2 = mesh.vertex(v[2]);
  const double inv = 1.0 / (2.0 * mesh.cell_measure(c));
  return {Point{(x1.y - x2.y) * inv, (x2.x - x1.x) * inv},
          Point{(x2.y - x0.y) * inv, (x0.x - x2.x) * inv},
          Point{(x0.y - x1.y) * inv, (x1.x - x0.x) * inv}};
}

double energy(const Mesh& mesh, const ProblemConfig& cfg, std::span<const double> u) {
  check_size(mesh, u);
  const double p = cfg.p;
  const double eps2 = cfg.effective_epsilon() * cfg.effective_epsilon();
  const double lump = 1.0 / (mesh.dim() + 1);
  double total = 0.0;
  for (std::size_t c = 0; c < mesh.num_cells(); ++c) {
    const auto grads = basis_gradients(mesh, c);
    Point g;
    const double g2 = cell_gradient_norm2(mesh, c, u, grads, g);
    const double area = mesh.cell_measure(c);
    double mass = 0.0;
    for (int v : mesh.cell(c)) mass += abs_pow(u[v], p);
    total += area * (half_pow(eps2 + g2, p) + lump * mass);
  }
  return total;
}

double facet_power_integral(const Mesh& mesh, int facet, std::span<const double> u,
                            double exponent) {
  const auto& f = mesh.facet(facet);
  if (mesh.dim() == 1) return f.measure * abs_pow(u[f.vertices[0]], exponent);
  const double a = u[f.vertices[0]], b = u[f.vertices[1]];
  const double lo = a + kGaussLo * (b - a), hi = a + kGaussHi * (b - a);
  return 0.5 * f.measure * (abs_pow(lo, exponent) + abs_pow(hi, exponent));
}

void add_facet_power_term(const Mesh& mesh, std::span<const int> facets,
                          std::span<const double> u, double exponent, double weight,
                          double& value, std::span<double> variation) {
  for (int idx : facets) accumulate_facet(mesh, idx, u, exponent, weight, value, variation);
}

double boundary_norm_q(const Mesh& mesh, const ProblemConfig& cfg, std::span<const double> u) {
  check_size(mesh, u);
  double total = 0.0;
  for (std::size_t f = 0; f < mesh.num_facets(); ++f) {
    total += facet_power_integral(mesh, static_cast<int>(f), u, cfg.q);
  }
  return total;
}

void evaluate_parts(const Mesh& mesh, const ProblemConfig& cfg, std::span<const double> u,
                    QuotientParts& out) {
  check_size(mesh, u);
  const std::size_t n = mesh.num_vertices();
  out.energy_variation.assign(n, 0.0);
  out.boundary_variation.assign(n, 0.0);
  const double p = cfg.p;
  const double eps2 = cfg.effective_epsilon() * cfg.effective_epsilon();
  const double lump = 1.0 / (mesh.dim() + 1);
  double e = 0.0;
  for (std::size_t c = 0; c < mesh.num_cells(); ++c) {
    const auto grads = basis_gradients(mesh, c);
    Point g;
    const double g2 = cell_gradient_norm2(mesh, c, u, grads, g);
    const double area = mesh.cell_measure(c);
    const double r2 = eps2 + g2;
    const double coeff = flux_coefficient(r2, p);  // (eps^2+|g|^2)^{(p-2)/2}
    auto v = mesh.cell(c);
    double mass = 0.0;
    for (int k = 0; k <= mesh.dim(); ++k) {
      const double uk = u[v[k]];
      mass += abs_pow(uk, p);
      out.energy_variation[v[k]] +=
          area * (coeff * dot(g, grads[k]) + lump * signed_pow(uk, p));
    }
    e += area * (half_pow(r2, p) + lump * mass);
  }
  out.energy = e;
  out.boundary = 0.0;
  for (std::size_t f = 0; f < mesh.num_facets(); ++f) {
    accumulate_facet(mesh, static_cast<int>(f), u, cfg.q, 1.0, out.boundary, out.boundary_variation);
  }
}

void require_admissible(const Mesh& mesh, const ProblemConfig& cfg, std::span<const double> u) {
  double boundary_max = 0.0, overall_max = 0.0;
  for (std::size_t v = 0; v < u.size(); ++v) {
    overall_max = std::max(overall_max, std::abs(u[v]));
    if (mesh.is_boundary_vertex(v)) boundary_max = std::max(boundary_max, std::abs(u[v]));
  }
  if (overall_max == 0.0 || boundary_max <= cfg.dof_tolerance * overall_max) {
    throw NotAdmissible("field vanishes on the whole boundary (lies in W_0^{1,p})");
  }
}

double rayleigh_quotient(const Mesh& mesh, const ProblemConfig& cfg, std::span<const double> u) {
  require_admissible(mesh, cfg, u);
  const double d = boundary_norm_q(mesh, cfg, u);
  return energy(mesh, cfg, u) / std::pow(d, cfg.p / cfg.q);
}

Field quotient_gradient(const Mesh& mesh, const ProblemConfig& cfg, std::span<const double> u) {
  require_admissible(mesh, cfg, u);
  QuotientParts parts;
  evaluate_parts(mesh, cfg, u, parts);
  const double scale = cfg.p / std::pow(parts.boundary, cfg.p / cfg.q);
  const double ratio = parts.energy / parts.boundary;
  Field grad(u.size());
  for (std::size_t i = 0; i < grad.size(); ++i) {
    grad[i] = scale * (parts.energy_variation[i] - ratio * parts.boundary_variation[i]);
  }
  return grad;
}

Field basis_h1_norms(const Mesh& mesh) {
  Field sq(mesh.num_vertices(), 0.0);
  const double lump = 1.0 / (mesh.dim() + 1);
  for (std::size_t c = 0; c < mesh.num_cells(); ++c) {
    const auto grads = basis_gradients(mesh, c);
    const double area = mesh.cell_measure(c);
    auto v = mesh.cell(c);
    for (int k = 0; k <= mesh.dim(); ++k) sq[v[k]] += area * (dot(grads[k], grads[k]) + lump);
  }
  for (auto& s : sq) s = std::sqrt(s);
  return sq;
}

}  // namespace stc
