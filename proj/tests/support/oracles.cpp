#include "oracles.hpp"

#include <cmath>
#include <stdexcept>

#include <Eigen/Dense>

namespace stc::testing {

DenseEigenPair dense_trace_eigenpair(const Mesh& mesh, const BoundaryHole& hole) {
  if (mesh.dim() != 2) throw std::invalid_argument("dense oracle expects a 2D mesh");
  const std::size_t n = mesh.num_vertices();
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(n, n);
  Eigen::MatrixXd B = Eigen::MatrixXd::Zero(n, n);
  for (std::size_t c = 0; c < mesh.num_cells(); ++c) {
    const auto cell = mesh.cell(c);
    Eigen::Vector2d x[3];
    for (int k = 0; k < 3; ++k) x[k] = {mesh.vertex(cell[k]).x, mesh.vertex(cell[k]).y};
    // Edge opposite vertex k, rotated: grad phi_k = -J e_k / (2 area).
    Eigen::Vector2d e[3];
    for (int k = 0; k < 3; ++k) e[k] = x[(k + 2) % 3] - x[(k + 1) % 3];
    const double area = 0.5 * std::abs(e[0].x() * e[1].y() - e[0].y() * e[1].x());
    for (int i = 0; i < 3; ++i) {
      for (int j = 0; j < 3; ++j) A(cell[i], cell[j]) += e[i].dot(e[j]) / (4.0 * area);
      A(cell[i], cell[i]) += area / 3.0;
    }
  }
  for (const auto& f : mesh.facets()) {
    const int i = f.vertices[0], j = f.vertices[1];
    const double len = (Eigen::Vector2d(mesh.vertex(i).x, mesh.vertex(i).y) -
                        Eigen::Vector2d(mesh.vertex(j).x, mesh.vertex(j).y)).norm();
    B(i, i) += len / 3.0;
    B(j, j) += len / 3.0;
    B(i, j) += len / 6.0;
    B(j, i) += len / 6.0;
  }

  std::vector<bool> fixed(n, false);
  for (int f : hole.facets()) {
    fixed[mesh.facet(f).vertices[0]] = true;
    fixed[mesh.facet(f).vertices[1]] = true;
  }
  std::vector<bool> on_boundary(n, false);
  for (const auto& f : mesh.facets()) on_boundary[f.vertices[0]] = on_boundary[f.vertices[1]] = true;
  std::vector<int> bdry, inner;
  for (std::size_t v = 0; v < n; ++v) {
    if (fixed[v]) continue;
    (on_boundary[v] ? bdry : inner).push_back(static_cast<int>(v));
  }
  const auto nb = static_cast<Eigen::Index>(bdry.size());
  const auto ni = static_cast<Eigen::Index>(inner.size());
  Eigen::MatrixXd Abb(nb, nb), Abi(nb, ni), Aii(ni, ni), Bbb(nb, nb);
  for (Eigen::Index r = 0; r < nb; ++r) {
    for (Eigen::Index s = 0; s < nb; ++s) {
      Abb(r, s) = A(bdry[r], bdry[s]);
      Bbb(r, s) = B(bdry[r], bdry[s]);
    }
    for (Eigen::Index s = 0; s < ni; ++s) Abi(r, s) = A(bdry[r], inner[s]);
  }
  for (Eigen::Index r = 0; r < ni; ++r) {
    for (Eigen::Index s = 0; s < ni; ++s) Aii(r, s) = A(inner[r], inner[s]);
  }
  const Eigen::LLT<Eigen::MatrixXd> inner_solve(Aii);
  const Eigen::MatrixXd schur = Abb - Abi * inner_solve.solve(Abi.transpose());
  const Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> eig(schur, Bbb);
  if (eig.info() != Eigen::Success) throw std::runtime_error("dense eigensolver failed");

  Eigen::VectorXd ub = eig.eigenvectors().col(0);
  if (ub.sum() < 0) ub = -ub;
  const Eigen::VectorXd ui = -inner_solve.solve(Abi.transpose() * ub);
  DenseEigenPair out;
  out.value = eig.eigenvalues()(0);
  out.vector.assign(n, 0.0);
  for (Eigen::Index r = 0; r < nb; ++r) out.vector[bdry[r]] = ub(r);
  for (Eigen::Index r = 0; r < ni; ++r) out.vector[inner[r]] = ui(r);
  out.free_dofs = bdry.size() + inner.size();
  return out;
}

namespace {

// w(length) for v(0) = 0, w(0) = 1, w = |v'|^{p-2} v'; NaN once w changes
// sign before the end (mu too large).
double shoot_flux(double p, double mu, double length, int steps) {
  auto rhs = [p, mu](double v, double w) {
    const double dv = std::copysign(std::pow(std::abs(w), 1.0 / (p - 1.0)), w);
    const double dw = -mu * std::copysign(std::pow(std::abs(v), p - 1.0), v);
    return std::pair{dv, dw};
  };
  double v = 0.0, w = 1.0;
  const double h = length / steps;
  for (int i = 0; i < steps; ++i) {
    const auto [k1v, k1w] = rhs(v, w);
    const auto [k2v, k2w] = rhs(v + 0.5 * h * k1v, w + 0.5 * h * k1w);
    const auto [k3v, k3w] = rhs(v + 0.5 * h * k2v, w + 0.5 * h * k2w);
    const auto [k4v, k4w] = rhs(v + h * k3v, w + h * k3w);
    v += h / 6.0 * (k1v + 2 * k2v + 2 * k3v + k4v);
    w += h / 6.0 * (k1w + 2 * k2w + 2 * k3w + k4w);
    if (w < 0.0) return -1.0;
  }
  return w;
}

}  // namespace

double shooting_mixed_eigenvalue(double p, double length, int steps) {
  double lo = 0.0, hi = 1.0;
  while (shoot_flux(p, hi, length, steps) > 0.0) hi *= 2.0;
  for (int it = 0; it < 100 && hi - lo > 1e-13 * hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    (shoot_flux(p, mid, length, steps) > 0.0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

double shooting_trace_constant(double p, double a, double b, int steps) {
  // State (u, w) with w = |u'|^{p-2} u'.
  auto rhs = [p](double u, double w) {
    const double du = std::copysign(std::pow(std::abs(w), 1.0 / (p - 1.0)), w);
    const double dw = std::copysign(std::pow(std::abs(u), p - 1.0), u);
    return std::pair{du, dw};
  };
  double u = 0.0, w = 1.0;
  const double h = (b - a) / steps;
  for (int i = 0; i < steps; ++i) {
    const auto [k1u, k1w] = rhs(u, w);
    const auto [k2u, k2w] = rhs(u + 0.5 * h * k1u, w + 0.5 * h * k1w);
    const auto [k3u, k3w] = rhs(u + 0.5 * h * k2u, w + 0.5 * h * k2w);
    const auto [k4u, k4w] = rhs(u + h * k3u, w + h * k3w);
    u += h / 6.0 * (k1u + 2 * k2u + 2 * k3u + k4u);
    w += h / 6.0 * (k1w + 2 * k2w + 2 * k3w + k4w);
  }
  // Natural condition at b: |u'|^{p-2} u' = lambda |u|^{p-2} u.
  return w / std::pow(u, p - 1.0);
}

}  // namespace stc::testing
