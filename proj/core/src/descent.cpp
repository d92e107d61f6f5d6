#include "stc/descent.hpp"

#include <algorithm>
#include <cmath>
#include <deque>

namespace stc {

namespace {

constexpr int kNonmonotoneWindow = 10;
constexpr int kDecreaseWindow = 5;
constexpr int kMaxHalvings = 60;
constexpr double kArmijo = 1e-4;

double quotient_value(const QuotientSample& s, double p, double q) {
  return s.numerator / std::pow(s.denominator, p / q);
}

// g = (p / D^{p/q}) (A - (N/D) B) on free dofs.
void quotient_gradient_from(const QuotientSample& s, double p, double q,
                            const std::vector<bool>& fixed, Field& g) {
  const double scale = p / std::pow(s.denominator, p / q);
  const double ratio = s.numerator / s.denominator;
  g.resize(s.numerator_variation.size());
  for (std::size_t i = 0; i < g.size(); ++i) {
    g[i] = fixed[i] ? 0.0
                    : scale * (s.numerator_variation[i] - ratio * s.denominator_variation[i]);
  }
}

// Rescales u to D(u) = 1 and updates the sample by homogeneity.
void normalize(Field& u, QuotientSample& s, double p, double q) {
  const double c = std::pow(s.denominator, -1.0 / q);
  for (double& x : u) x *= c;
  s.numerator *= std::pow(c, p);
  s.denominator = 1.0;
  const double cn = std::pow(c, p - 1.0), cd = std::pow(c, q - 1.0);
  for (double& x : s.numerator_variation) x *= cn;
  for (double& x : s.denominator_variation) x *= cd;
}

double window_spread(const std::deque<double>& values, std::size_t window) {
  if (values.size() < window) return std::numeric_limits<double>::infinity();
  auto first = values.end() - static_cast<std::ptrdiff_t>(window);
  const auto [lo, hi] = std::minmax_element(first, values.end());
  return *hi - *lo;
}

double residual_bound(const DescentSettings& settings, double lambda) {
  return settings.relative_residual ? settings.residual_tolerance * std::max(1.0, std::abs(lambda))
                                    : settings.residual_tolerance;
}

}  // namespace

StationarityReport stationarity(const QuotientSample& sample, const std::vector<bool>& fixed,
                                std::span<const double> residual_scale) {
  double ab = 0.0, bb = 0.0;
  for (std::size_t i = 0; i < fixed.size(); ++i) {
    if (fixed[i]) continue;
    ab += sample.numerator_variation[i] * sample.denominator_variation[i];
    bb += sample.denominator_variation[i] * sample.denominator_variation[i];
  }
  StationarityReport report;
  report.lambda = bb > 0.0 ? ab / bb : 0.0;
  for (std::size_t i = 0; i < fixed.size(); ++i) {
    if (fixed[i]) continue;
    const double r =
        sample.numerator_variation[i] - report.lambda * sample.denominator_variation[i];
    const double scale = residual_scale.empty() ? 1.0 : residual_scale[i];
    report.residual = std::max(report.residual, std::abs(r) / scale);
  }
  return report;
}

DescentOutcome minimize_quotient(const QuotientEvaluator& evaluate, Field init,
                                 const std::vector<bool>& fixed, const DescentSettings& settings) {
  const double p = settings.p, q = settings.q;
  const std::size_t n = init.size();
  if (fixed.size() != n) throw std::invalid_argument("fixed-dof mask size mismatch");

  DescentOutcome out;
  Field u = std::move(init);
  for (std::size_t i = 0; i < n; ++i) u[i] = fixed[i] ? 0.0 : std::abs(u[i]);

  QuotientSample cur;
  evaluate(u, cur);
  if (!(cur.denominator > 0.0)) throw NotAdmissible("initial field vanishes on the boundary");
  normalize(u, cur, p, q);
  double value = quotient_value(cur, p, q);

  Field g, g_new, trial;
  quotient_gradient_from(cur, p, q, fixed, g);
  double g_max = 0.0, u_max = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    g_max = std::max(g_max, std::abs(g[i]));
    u_max = std::max(u_max, std::abs(u[i]));
  }
  double alpha = g_max > 0.0 ? 1e-2 * u_max / g_max : 1.0;

  std::deque<double> recent{value};
  QuotientSample next;
  int it = 0;
  bool stalled = false;
  // Latest iterate meeting the residual test; returned if the descent stalls.
  Field stationary_u;
  for (; it < settings.max_iterations; ++it) {
    const auto report = stationarity(cur, fixed, settings.residual_scale);
    if (report.residual <= residual_bound(settings, report.lambda)) {
      // A warm start that is already stationary needs no decrease history.
      if (it == 0 ||
          window_spread(recent, kDecreaseWindow) <= settings.decrease_tolerance * std::abs(value)) {
        out.converged = true;
        break;
      }
      stationary_u = u;
    }

    double gg = 0.0;
    for (double x : g) gg += x * x;
    const double reference = *std::max_element(recent.begin(), recent.end());

    bool accepted = false;
    for (int h = 0; h < kMaxHalvings; ++h) {
      trial.resize(n);
      for (std::size_t i = 0; i < n; ++i) trial[i] = fixed[i] ? 0.0 : std::abs(u[i] - alpha * g[i]);
      evaluate(trial, next);
      if (next.denominator > 0.0 && std::isfinite(next.numerator)) {
        const double trial_value = quotient_value(next, p, q);
        if (trial_value <= reference - kArmijo * alpha * gg) {
          accepted = true;
          break;
        }
      }
      alpha *= 0.5;
    }
    if (!accepted) {
      stalled = true;
      break;
    }

    normalize(trial, next, p, q);
    quotient_gradient_from(next, p, q, fixed, g_new);
    double ss = 0.0, sy = 0.0, yy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double s = trial[i] - u[i];
      const double y = g_new[i] - g[i];
      ss += s * s;
      sy += s * y;
      yy += y * y;
    }
    if (sy > 0.0) {
      alpha = (it % 2 == 0) ? ss / sy : sy / yy;
    } else {
      alpha *= 2.0;
    }
    u.swap(trial);
    g.swap(g_new);
    std::swap(cur, next);
    value = quotient_value(cur, p, q);
    recent.push_back(value);
    if (recent.size() > kNonmonotoneWindow) recent.pop_front();
    if (it < 100 || it % 100 == 0) out.history.push_back(value);
  }

  if (stalled && !stationary_u.empty()) u.swap(stationary_u);

  // Exact re-evaluation at the returned iterate.
  evaluate(u, cur);
  const double c = std::pow(cur.denominator, -1.0 / q);
  for (double& x : u) x *= c;
  evaluate(u, cur);
  const auto report = stationarity(cur, fixed, settings.residual_scale);
  out.value = quotient_value(cur, p, q);
  out.lambda = report.lambda;
  out.residual = report.residual;
  out.iterations = it;
  if (stalled) {
    // Rounding floor reached: accept when the residual test holds.
    out.converged = report.residual <= residual_bound(settings, report.lambda);
  }
  out.history.push_back(out.value);
  out.u = std::move(u);
  return out;
}

}  // namespace stc
