#include "stc/thin_domain.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

#include "stc/one_dim.hpp"
#include "stc/parallel.hpp"

namespace stc {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// Piecewise-linear interpolation on increasing nodes.
double interpolate(std::span<const double> xs, std::span<const double> ys, double x) {
  if (x <= xs.front()) return ys.front();
  if (x >= xs.back()) return ys.back();
  const auto it = std::upper_bound(xs.begin(), xs.end(), x);
  const std::size_t i = static_cast<std::size_t>(it - xs.begin());
  const double t = (x - xs[i - 1]) / (xs[i] - xs[i - 1]);
  return ys[i - 1] + t * (ys[i] - ys[i - 1]);
}

// Trapezoid L2 norm of a nodal profile.
double l2_norm(std::span<const double> xs, std::span<const double> ys) {
  double s = 0.0;
  for (std::size_t i = 0; i + 1 < xs.size(); ++i) {
    s += 0.5 * (xs[i + 1] - xs[i]) * (ys[i] * ys[i] + ys[i + 1] * ys[i + 1]);
  }
  return std::sqrt(s);
}

// The optimal hole may sit at either end, so the reference is compared in
// both orientations.
double limit_distance(const LimitProjection& proj, const LimitResult& limit) {
  const double n_thin = l2_norm(proj.x, proj.mean);
  const double n_limit = l2_norm(limit.nodes, limit.field);
  const double a = limit.nodes.front(), b = limit.nodes.back();
  double best = std::numeric_limits<double>::infinity();
  for (bool mirrored : {false, true}) {
    std::vector<double> diff(limit.nodes.size());
    for (std::size_t i = 0; i < diff.size(); ++i) {
      const double x = mirrored ? a + b - limit.nodes[i] : limit.nodes[i];
      diff[i] = interpolate(proj.x, proj.mean, x) / n_thin - limit.field[i] / n_limit;
    }
    best = std::min(best, l2_norm(limit.nodes, diff));
  }
  return best;
}

bool hole_in_end_segment(const Mesh& mesh, const BoundaryHole& hole, double a, double b,
                         double alpha) {
  const double reach = alpha * (b - a) + mesh.max_facet_measure() * (1.0 + 1e-9);
  double lo = std::numeric_limits<double>::infinity(), hi = -lo;
  for (int f : hole.facets()) {
    const auto& facet = mesh.facet(f);
    if (std::abs(facet.normal.y) < 0.5) continue;  // short edges
    for (int v : facet.vertices) {
      lo = std::min(lo, mesh.vertex(v).x);
      hi = std::max(hi, mesh.vertex(v).x);
    }
  }
  if (lo > hi) return false;
  return hi <= a + reach || lo >= b - reach;
}

// Quadratic through three points evaluated at 0 (Lagrange form).
double extrapolate_to_zero(const double x[3], const double y[3]) {
  double out = 0.0;
  for (int i = 0; i < 3; ++i) {
    double w = 1.0;
    for (int j = 0; j < 3; ++j) {
      if (j != i) w *= (0.0 - x[j]) / (x[i] - x[j]);
    }
    out += w * y[i];
  }
  return out;
}

double loglog_slope(const std::vector<MuRecord>& recs) {
  const double n = static_cast<double>(recs.size());
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  for (const auto& r : recs) {
    const double x = std::log(r.mu), y = std::log(r.s_mu);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

}  // namespace

LimitProjection project_to_limit(const Mesh& mesh, std::span<const double> u) {
  if (u.size() != mesh.num_vertices()) throw std::invalid_argument("field size mismatch");
  if (mesh.dim() != 2) throw GeometryError("projection needs a 2D mesh");
  const double tol = 1e-9 * std::max(1.0, mesh.resolution());
  // Columns keyed by x, each a list of (y, value).
  std::map<double, std::vector<std::pair<double, double>>> columns;
  for (std::size_t v = 0; v < mesh.num_vertices(); ++v) {
    const Point x = mesh.vertex(v);
    auto it = columns.lower_bound(x.x - tol);
    if (it == columns.end() || it->first > x.x + tol) it = columns.try_emplace(x.x).first;
    it->second.emplace_back(x.y, u[v]);
  }
  LimitProjection out;
  double mean_max = 0.0, std_max = 0.0;
  for (auto& [x, fiber] : columns) {
    std::sort(fiber.begin(), fiber.end());
    double len = 0.0, m1 = 0.0, m2 = 0.0;
    for (std::size_t i = 0; i + 1 < fiber.size(); ++i) {
      const double h = fiber[i + 1].first - fiber[i].first;
      const double a = fiber[i].second, b = fiber[i + 1].second;
      len += h;
      m1 += 0.5 * h * (a + b);
      m2 += 0.5 * h * (a * a + b * b);
    }
    double mean = fiber.front().second, var = 0.0;
    if (len > 0.0) {
      mean = m1 / len;
      var = std::max(0.0, m2 / len - mean * mean);
    }
    out.x.push_back(x);
    out.mean.push_back(mean);
    out.stddev.push_back(std::sqrt(var));
    mean_max = std::max(mean_max, std::abs(mean));
    std_max = std::max(std_max, std::sqrt(var));
  }
  out.max_relative_stddev = mean_max > 0.0 ? std_max / mean_max : 0.0;
  return out;
}

double thin_exponent(double p, double q) {
  constexpr double k = 1.0;
  return (k * (q - p) + p) / q;
}

MuSweep run_mu_sweep(double a, double b, double alpha, const ProblemConfig& cfg,
                     std::span<const double> mu_values, const MuSweepSettings& settings) {
  if (!(a < b)) throw ConfigError("thin domain needs a < b");
  if (!(alpha > 0.0 && alpha < 1.0)) throw ConfigError("alpha must lie in (0,1)");
  if (mu_values.empty()) throw ConfigError("mu sweep needs at least one mu");
  for (std::size_t i = 0; i < mu_values.size(); ++i) {
    if (!(mu_values[i] > 0.0 && mu_values[i] < 1.0)) throw ConfigError("mu values must lie in (0,1)");
    if (i > 0 && !(mu_values[i] < mu_values[i - 1])) throw ConfigError("mu values must be strictly decreasing");
  }
  validate(cfg, 2);
  const ResolutionRule rule = settings.resolution ? settings.resolution : [](double mu) { return mu / 4.0; };

  MuSweep sweep;
  sweep.a = a;
  sweep.b = b;
  sweep.alpha = alpha;
  sweep.p = cfg.p;
  sweep.q = cfg.q;
  sweep.exponent = thin_exponent(cfg.p, cfg.q);
  sweep.target_limit = std::pow(2.0, -cfg.p / cfg.q) * limit_constant_for_hole_fraction(cfg.p, alpha, b - a);

  // Interval reference with an endpoint hole; its extremal is the expected
  // fiber profile.
  OneDimProblem limit_problem;
  limit_problem.a = a;
  limit_problem.b = b;
  limit_problem.alpha = alpha;
  limit_problem.cfg = cfg;
  limit_problem.cfg.epsilon = cfg.effective_epsilon();
  const LimitResult limit = solve_limit_problem(limit_problem, a, a + alpha * (b - a), settings.limit_cells);

  std::vector<double> mus;
  for (double mu : mu_values) {
    const double res = rule(mu);
    if (!(res > 0.0 && res <= mu / 2.0 * (1.0 + 1e-12))) {
      throw ConfigError("resolution rule must give at least two layers (resolution <= mu/2)");
    }
    const double estimate = ((b - a) / res + 1.0) * (mu / res + 1.0);
    if (estimate > static_cast<double>(settings.max_vertices)) {
      sweep.warnings.push_back("mu = " + std::to_string(mu) + " skipped: about " +
                               std::to_string(static_cast<long long>(estimate)) +
                               " vertices exceeds the limit");
      break;
    }
    mus.push_back(mu);
  }

  std::vector<MuRecord> records(mus.size());
  parallel_for(mus.size(), settings.workers, [&](std::size_t i) {
    const double mu = mus[i];
    MuRecord& rec = records[i];
    rec.mu = mu;
    rec.resolution = rule(mu);
    const Mesh mesh = generate_mesh(ThinRectangle{a, b, mu}, rec.resolution);
    rec.vertices = mesh.num_vertices();

    OptimizationRun best = optimize_hole_alternating(mesh, cfg, alpha, std::nullopt, settings.optimizer);
    for (int s = 0; s < settings.extra_starts; ++s) {
      const BoundaryHole init = random_hole(mesh, alpha, settings.seed + static_cast<std::uint64_t>(s));
      OptimizationRun run = optimize_hole_alternating(mesh, cfg, alpha, init, settings.optimizer);
      if (run.best_value < best.best_value) best = std::move(run);
    }

    rec.s_mu = best.best_value;
    rec.rescaled = rec.s_mu / std::pow(mu, sweep.exponent);
    rec.alpha_effective = best.alpha_effective;
    rec.converged = best.converged;
    const LimitProjection proj = project_to_limit(mesh, best.best_extremal);
    rec.max_relative_stddev = proj.max_relative_stddev;
    rec.limit_distance = limit_distance(proj, limit);
    rec.hole_in_end_segment = hole_in_end_segment(mesh, best.best_hole, a, b, alpha);
    rec.run = std::move(best);
  });

  for (std::size_t i = 0; i < records.size(); ++i) {
    records[i].slope_estimate =
        i == 0 ? kNaN
               : std::log(records[i].s_mu / records[i - 1].s_mu) / std::log(records[i].mu / records[i - 1].mu);
  }
  sweep.records = std::move(records);
  const auto& recs = sweep.records;
  if (recs.size() >= 3) {
    const std::size_t n = recs.size();
    const double x[3] = {recs[n - 3].mu, recs[n - 2].mu, recs[n - 1].mu};
    const double y[3] = {recs[n - 3].rescaled, recs[n - 2].rescaled, recs[n - 1].rescaled};
    sweep.fitted_limit = extrapolate_to_zero(x, y);
  } else {
    sweep.fitted_limit = kNaN;
  }
  sweep.slope = recs.size() >= 2 ? loglog_slope(recs) : kNaN;
  sweep.relative_gap =
      recs.empty() ? kNaN : std::abs(recs.back().rescaled - sweep.target_limit) / sweep.target_limit;
  return sweep;
}

}  // namespace stc
