#pragma once

#include <functional>
#include <span>
#include <vector>

#include "stc/fem.hpp"

namespace stc {

/// One evaluation of a quotient N(u) / D(u)^{p/q} with N p-homogeneous and D
/// q-homogeneous. The variations are the scaled first derivatives
/// (1/p) dN/du and (1/q) dD/du.
struct QuotientSample {
  double numerator = 0.0;
  double denominator = 0.0;
  Field numerator_variation;
  Field denominator_variation;
};

using QuotientEvaluator = std::function<void(std::span<const double>, QuotientSample&)>;

struct DescentSettings {
  double p = 2.0;
  double q = 2.0;
  double residual_tolerance = 1e-9;
  double decrease_tolerance = 1e-12;
  int max_iterations = 200000;
  /// Per-dof scaling of the nodal residual (typically basis H^1 norms).
  std::span<const double> residual_scale;
  /// Compare the residual against residual_tolerance * max(1, |lambda|).
  bool relative_residual = false;
};

struct DescentOutcome {
  Field u;
  double value = 0.0;
  /// Least-squares multiplier of a(u,.) = lambda b(u,.) over the free dofs.
  double lambda = 0.0;
  /// max_i |a(u,phi_i) - lambda b(u,phi_i)| / scale_i over free dofs.
  double residual = 0.0;
  int iterations = 0;
  bool converged = false;
  /// Quotient values of accepted iterates (every iterate early on, then
  /// every 100th).
  std::vector<double> history;
};

/// Projected Barzilai-Borwein descent on the unit sphere {D(u) = 1} restricted
/// to the positive cone: each step moves along the negative quotient gradient
/// over free dofs, replaces the iterate by its absolute value and rescales to
/// D = 1. Steps failing a nonmonotone sufficient-decrease test are halved.
/// Fixed dofs are held at zero.
DescentOutcome minimize_quotient(const QuotientEvaluator& evaluate, Field init,
                                 const std::vector<bool>& fixed, const DescentSettings& settings);

/// Multiplier and scaled residual for a sample normalized to D = 1.
struct StationarityReport {
  double lambda = 0.0;
  double residual = 0.0;
};
StationarityReport stationarity(const QuotientSample& sample, const std::vector<bool>& fixed,
                                std::span<const double> residual_scale);

}  // namespace stc
