#pragma once

#include <functional>
#include <span>
#include <utility>
#include <vector>

#include "stc/fem.hpp"

namespace stc {

/// Interval limit problem
///   min  int_a^b rho (|v'|^p + |v|^p)  /  (int_a^b beta |v|^q)^{p/q}
/// over fields vanishing on a sub-interval (the hole) of measure alpha (b-a).
/// Unlike the trace problem the denominator is an interior weighted norm.
struct OneDimProblem {
  double a = 0.0;
  double b = 1.0;
  double alpha = 0.5;
  ProblemConfig cfg;
  /// Volume and denominator weights, sampled at the nodes. Empty means 1.
  std::function<double(double)> rho;
  std::function<double(double)> beta;
};

/// (2 pi)^p (p-1) / (2 alpha L p sin(pi/p))^p + 1, evaluated as displayed.
/// alpha * L is the length of the segment on which the extremal is free.
double closed_form_limit_constant(double p, double alpha, double length);

/// The optimal constant for a hole of measure hole_fraction * L, i.e. the
/// closed form with a free segment of length (1 - hole_fraction) L.
double limit_constant_for_hole_fraction(double p, double hole_fraction, double length);

struct LimitResult {
  double value = 0.0;
  double lambda = 0.0;
  double residual = 0.0;
  int iterations = 0;
  bool converged = false;
  double hole_start = 0.0;
  double hole_end = 0.0;
  std::vector<double> nodes;
  /// Extremal, nonnegative, normalized so that int beta |v|^q = 1.
  Field field;
};

/// Solves the limit problem with the hole [hole_start, hole_end] on a uniform
/// grid of n_cells. Nodes inside the closed hole are fixed to zero. The
/// residual test is relative: residual <= dof_tolerance * max(1, lambda).
LimitResult solve_limit_problem(const OneDimProblem& problem, double hole_start, double hole_end,
                                int n_cells, std::span<const double> warm_start = {});

struct LimitSweep {
  double best_start = 0.0;
  double best_end = 0.0;
  double best_value = 0.0;
  /// (hole start, value) for every cell-aligned candidate.
  std::vector<std::pair<double, double>> candidates;
  bool all_converged = true;
};

/// Exhaustive sweep over cell-aligned holes of round(alpha n) cells. Ties go
/// to the leftmost candidate.
LimitSweep optimize_limit_hole(const OneDimProblem& problem, int n_cells, unsigned workers = 0);

}  // namespace stc
