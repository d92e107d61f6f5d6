#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "stc/fem.hpp"
#include "stc/geometry.hpp"
#include "stc/hole_optimizer.hpp"

namespace stc {

/// Fiber statistics of a field on a thin rectangle: for each vertical column
/// of vertices, the trapezoid mean and standard deviation in y.
struct LimitProjection {
  std::vector<double> x;
  std::vector<double> mean;
  std::vector<double> stddev;
  /// max stddev / max |mean|.
  double max_relative_stddev = 0.0;
};

/// Groups vertices by x coordinate (structured thin meshes have aligned
/// columns) and averages each fiber.
LimitProjection project_to_limit(const Mesh& mesh, std::span<const double> u);

struct MuRecord {
  double mu = 0.0;
  double resolution = 0.0;
  std::size_t vertices = 0;
  double s_mu = 0.0;
  /// S_mu / mu^{(k(q-p)+p)/q} with k = 1.
  double rescaled = 0.0;
  /// Local log-log slope between this and the previous mu (NaN for the first).
  double slope_estimate = 0.0;
  double alpha_effective = 0.0;
  double max_relative_stddev = 0.0;
  /// L2 distance between the normalized fiber mean and the normalized 1D
  /// limit extremal.
  double limit_distance = 0.0;
  /// Every hole facet on a long edge lies within one facet of an end segment
  /// of length alpha (b-a).
  bool hole_in_end_segment = false;
  bool converged = false;
  OptimizationRun run;
};

struct MuSweep {
  double a = 0.0;
  double b = 1.0;
  double alpha = 0.5;
  double p = 2.0;
  double q = 2.0;
  double exponent = 1.0;
  std::vector<MuRecord> records;
  /// Richardson limit: the quadratic in mu through the last three rescaled
  /// values, evaluated at mu = 0. NaN with fewer than three records.
  double fitted_limit = 0.0;
  /// Least-squares slope of log S_mu against log mu.
  double slope = 0.0;
  /// 2^{-p/q} times the interval constant for a hole fraction alpha.
  double target_limit = 0.0;
  /// |rescaled at the smallest mu - target| / target.
  double relative_gap = 0.0;
  /// The limit theorem assumes p < n; the n = 1 base here lies outside it.
  bool extrapolated_regime = true;
  std::vector<std::string> warnings;
};

using ResolutionRule = std::function<double(double mu)>;

struct MuSweepSettings {
  /// Defaults to mu / 4.
  ResolutionRule resolution;
  /// Mu values whose mesh would exceed this are skipped with a warning.
  std::size_t max_vertices = 2'000'000;
  /// Random starts per mu in addition to the default arc start.
  int extra_starts = 0;
  std::uint64_t seed = 1;
  /// Cells of the 1D reference problem.
  int limit_cells = 400;
  unsigned workers = 0;
  OptimizerSettings optimizer;
};

/// (k(q-p)+p)/q for k = 1.
double thin_exponent(double p, double q);

/// For each mu: mesh (a,b) x (0,mu), optimize the hole of measure
/// alpha H(boundary) with the alternating scheme, record S and the rescaled
/// value. mu_values must be strictly decreasing in (0,1), and the resolution
/// rule must give at least two layers (resolution <= mu/2).
MuSweep run_mu_sweep(double a, double b, double alpha, const ProblemConfig& cfg,
                     std::span<const double> mu_values, const MuSweepSettings& settings = {});

}  // namespace stc
