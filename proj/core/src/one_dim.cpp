#include "stc/one_dim.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "power.hpp"
#include "stc/descent.hpp"
#include "stc/parallel.hpp"

namespace stc {

namespace {

void validate_problem(const OneDimProblem& problem, int n_cells) {
  if (!(problem.a < problem.b)) throw ConfigError("limit problem needs a < b");
  if (!(problem.alpha > 0.0 && problem.alpha < 1.0)) throw ConfigError("alpha must lie in (0,1)");
  if (n_cells < 16) throw ConfigError("limit problem needs at least 16 cells");
  validate(problem.cfg, 1);
}

struct Grid {
  std::vector<double> x;
  std::vector<double> lumped;  // trapezoid weights
  std::vector<double> rho;     // nodal
  std::vector<double> beta;    // nodal
  double h = 0.0;
};

Grid make_grid(const OneDimProblem& problem, int n) {
  Grid g;
  g.h = (problem.b - problem.a) / n;
  g.x.resize(n + 1);
  g.lumped.assign(n + 1, g.h);
  g.lumped.front() = g.lumped.back() = 0.5 * g.h;
  g.rho.assign(n + 1, 1.0);
  g.beta.assign(n + 1, 1.0);
  for (int i = 0; i <= n; ++i) {
    g.x[i] = (i == n) ? problem.b : problem.a + g.h * i;
    if (problem.rho) g.rho[i] = problem.rho(g.x[i]);
    if (problem.beta) g.beta[i] = problem.beta(g.x[i]);
  }
  return g;
}

QuotientEvaluator limit_evaluator(const Grid& grid, const ProblemConfig& cfg) {
  return [&grid, &cfg](std::span<const double> v, QuotientSample& s) {
    const std::size_t n = v.size();
    const double p = cfg.p, q = cfg.q;
    const double eps2 = cfg.effective_epsilon() * cfg.effective_epsilon();
    s.numerator = 0.0;
    s.denominator = 0.0;
    s.numerator_variation.assign(n, 0.0);
    s.denominator_variation.assign(n, 0.0);
    for (std::size_t c = 0; c + 1 < n; ++c) {
      const double slope = (v[c + 1] - v[c]) / grid.h;
      const double r2 = eps2 + slope * slope;
      const double weight = 0.5 * (grid.rho[c] + grid.rho[c + 1]) * grid.h;
      s.numerator += weight * half_pow(r2, p);
      const double flux = weight * flux_coefficient(r2, p) * slope / grid.h;
      s.numerator_variation[c] -= flux;
      s.numerator_variation[c + 1] += flux;
    }
    for (std::size_t i = 0; i < n; ++i) {
      const double wm = grid.lumped[i] * grid.rho[i];
      const double wd = grid.lumped[i] * grid.beta[i];
      s.numerator += wm * abs_pow(v[i], p);
      s.numerator_variation[i] += wm * signed_pow(v[i], p);
      s.denominator += wd * abs_pow(v[i], q);
      s.denominator_variation[i] += wd * signed_pow(v[i], q);
    }
  };
}

}  // namespace

double closed_form_limit_constant(double p, double alpha, double length) {
  if (!(p > 1.0)) throw ConfigError("closed form needs p > 1 (sin(pi/p) degenerates)");
  if (!(alpha > 0.0 && alpha < 1.0)) throw ConfigError("alpha must lie in (0,1)");
  if (!(length > 0.0)) throw ConfigError("interval length must be positive");
  const double pi = std::numbers::pi;
  const double num = std::pow(2.0 * pi, p) * (p - 1.0);
  const double den = std::pow(2.0 * alpha * length * p * std::sin(pi / p), p);
  return num / den + 1.0;
}

double limit_constant_for_hole_fraction(double p, double hole_fraction, double length) {
  return closed_form_limit_constant(p, 1.0 - hole_fraction, length);
}

LimitResult solve_limit_problem(const OneDimProblem& problem, double hole_start, double hole_end,
                                int n_cells, std::span<const double> warm_start) {
  validate_problem(problem, n_cells);
  if (!(hole_start <= hole_end) || hole_start < problem.a - 1e-12 || hole_end > problem.b + 1e-12) {
    throw ConfigError("hole must be a sub-interval of (a,b)");
  }
  const Grid grid = make_grid(problem, n_cells);
  const double target = problem.alpha * (problem.b - problem.a);
  if (std::abs((hole_end - hole_start) - target) > grid.h * (1.0 + 1e-9)) {
    throw ConfigError("hole measure " + std::to_string(hole_end - hole_start) +
                      " differs from alpha (b-a) = " + std::to_string(target) + " by more than one cell");
  }
  for (double w : grid.rho) {
    if (!(w > 0.0)) throw ConfigError("volume weight rho must be positive");
  }
  for (double w : grid.beta) {
    if (!(w >= 0.0)) throw ConfigError("denominator weight beta must be nonnegative");
  }

  const double tol = 1e-9 * grid.h;
  std::vector<bool> fixed(grid.x.size(), false);
  for (std::size_t i = 0; i < grid.x.size(); ++i) {
    fixed[i] = grid.x[i] >= hole_start - tol && grid.x[i] <= hole_end + tol;
  }

  Field init(grid.x.size(), 1.0);
  if (!warm_start.empty() && warm_start.size() == init.size()) init.assign(warm_start.begin(), warm_start.end());
  bool free_mass = false;
  for (std::size_t i = 0; i < init.size(); ++i) free_mass = free_mass || (!fixed[i] && init[i] != 0.0);
  if (!free_mass) init.assign(grid.x.size(), 1.0);

  // H^1 norms of the hat functions.
  Field scale(grid.x.size());
  for (std::size_t i = 0; i < scale.size(); ++i) {
    const double cells = (i == 0 || i + 1 == scale.size()) ? 1.0 : 2.0;
    scale[i] = std::sqrt(cells / grid.h + grid.lumped[i]);
  }

  DescentSettings settings;
  settings.p = problem.cfg.p;
  settings.q = problem.cfg.q;
  settings.residual_tolerance = problem.cfg.dof_tolerance;
  settings.decrease_tolerance = problem.cfg.decrease_tolerance;
  settings.max_iterations = problem.cfg.max_inner_iterations;
  settings.residual_scale = scale;
  settings.relative_residual = true;
  DescentOutcome outcome = minimize_quotient(limit_evaluator(grid, problem.cfg), std::move(init), fixed, settings);

  LimitResult out;
  out.value = outcome.value;
  out.lambda = outcome.lambda;
  out.residual = outcome.residual;
  out.iterations = outcome.iterations;
  out.converged = outcome.converged;
  out.hole_start = hole_start;
  out.hole_end = hole_end;
  out.nodes = grid.x;
  out.field = std::move(outcome.u);
  return out;
}

LimitSweep optimize_limit_hole(const OneDimProblem& problem, int n_cells, unsigned workers) {
  validate_problem(problem, n_cells);
  const int m = static_cast<int>(std::lround(problem.alpha * n_cells));
  if (m < 1 || m >= n_cells) throw ConfigError("alpha too small or too large for the grid");
  const double h = (problem.b - problem.a) / n_cells;
  const int count = n_cells - m + 1;
  std::vector<LimitResult> results(count);
  parallel_for(count, workers, [&](std::size_t k) {
    const double start = problem.a + h * static_cast<double>(k);
    const double end = (static_cast<int>(k) + m == n_cells) ? problem.b : start + h * m;
    results[k] = solve_limit_problem(problem, start, end, n_cells);
  });

  LimitSweep sweep;
  sweep.best_value = std::numeric_limits<double>::infinity();
  for (const auto& r : results) {
    sweep.candidates.emplace_back(r.hole_start, r.value);
    sweep.all_converged = sweep.all_converged && r.converged;
    if (r.value < sweep.best_value) {
      sweep.best_value = r.value;
      sweep.best_start = r.hole_start;
      sweep.best_end = r.hole_end;
    }
  }
  return sweep;
}

}  // namespace stc
