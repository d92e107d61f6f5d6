#include "stc/hole_optimizer.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>
#include <random>
#include <set>

#include "stc/descent.hpp"
#include "stc/parallel.hpp"
#include "stc/shape_derivative.hpp"

namespace stc {

namespace {

// Accept a new hole only on a decrease clearly above solver noise.
constexpr double kStrictDecrease = 1e-12;

void check_alpha(double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw ConfigError("alpha must lie in (0,1)");
}

bool measure_ok(const Mesh& mesh, const BoundaryHole& hole, double target) {
  return !hole.empty() && hole.size() < mesh.num_facets() &&
         std::abs(hole.measure() - target) <= mesh.max_facet_measure() * (1.0 + 1e-9);
}

void require_measure(const Mesh& mesh, const BoundaryHole& hole, double target) {
  if (!measure_ok(mesh, hole, target)) {
    throw ConfigError("initial hole measure " + std::to_string(hole.measure()) +
                      " is not within one facet of the target " + std::to_string(target));
  }
}

int wrap_facet(const Mesh& mesh, long f) {
  const long n = static_cast<long>(mesh.num_facets());
  return static_cast<int>(((f % n) + n) % n);
}

// Neighbours along a closed boundary; facets are stored in arclength order.
std::array<int, 2> facet_neighbours(const Mesh& mesh, int f) {
  return {wrap_facet(mesh, f - 1), wrap_facet(mesh, f + 1)};
}

// Penalized quotient (E + kappa int_hole |u|^p) / D^{p/q}: hole facets stay
// free, so the minimizer shows which of them resist the constraint most.
Field relaxed_extremal(const Mesh& mesh, const ProblemConfig& cfg, const BoundaryHole& hole,
                       double kappa, const Field& start) {
  const auto hole_facets = hole.facets();
  QuotientEvaluator evaluate = [&](std::span<const double> u, QuotientSample& s) {
    QuotientParts parts;
    parts.energy_variation = std::move(s.numerator_variation);
    parts.boundary_variation = std::move(s.denominator_variation);
    evaluate_parts(mesh, cfg, u, parts);
    add_facet_power_term(mesh, hole_facets, u, cfg.p, kappa, parts.energy, parts.energy_variation);
    s.numerator = parts.energy;
    s.denominator = parts.boundary;
    s.numerator_variation = std::move(parts.energy_variation);
    s.denominator_variation = std::move(parts.boundary_variation);
  };
  const Field scale = basis_h1_norms(mesh);
  DescentSettings settings;
  settings.p = cfg.p;
  settings.q = cfg.q;
  settings.residual_tolerance = 1e-7;
  settings.decrease_tolerance = 1e-10;
  settings.max_iterations = 20000;
  settings.residual_scale = scale;
  const std::vector<bool> none(mesh.num_vertices(), false);
  return minimize_quotient(evaluate, start, none, settings).u;
}

// Adds facets in the given order while that brings the measure closer to the
// target.
BoundaryHole greedy_select(const Mesh& mesh, const std::vector<int>& order, double target) {
  std::vector<int> chosen;
  double m = 0.0;
  for (int f : order) {
    const double next = m + mesh.facet(f).measure;
    if (std::abs(next - target) >= std::abs(m - target)) break;
    chosen.push_back(f);
    m = next;
  }
  return BoundaryHole(mesh, std::move(chosen));
}

BoundaryHole swap_facets(const Mesh& mesh, const BoundaryHole& hole, std::span<const int> remove,
                         std::span<const int> add) {
  std::vector<int> facets;
  for (int f : hole.facets()) {
    if (std::find(remove.begin(), remove.end(), f) == remove.end()) facets.push_back(f);
  }
  facets.insert(facets.end(), add.begin(), add.end());
  return BoundaryHole(mesh, std::move(facets));
}

using Key = std::vector<int>;
Key key_of(const BoundaryHole& h) { return Key(h.facets().begin(), h.facets().end()); }

struct State {
  BoundaryHole hole;
  TraceResult result;
};

class Tracker {
 public:
  Tracker(const Mesh& mesh, const ProblemConfig& cfg, double alpha, Strategy strategy)
      : mesh_(mesh), cfg_(cfg), target_(target_measure(mesh, alpha)) {
    run_.alpha = alpha;
    run_.strategy = strategy;
  }

  double target() const { return target_; }
  const State& current() const { return state_; }
  OptimizationRun& run() { return run_; }

  void start(const BoundaryHole& hole, std::span<const double> warm = {}) {
    require_measure(mesh_, hole, target_);
    state_ = {hole, solve(hole, warm)};
    record();
  }

  TraceResult solve(const BoundaryHole& hole, std::span<const double> warm = {}) {
    ++run_.solves;
    return solve_trace_constant(mesh_, cfg_, hole, warm);
  }

  // Solves the candidate unless it was seen before or misses the measure.
  std::optional<TraceResult> evaluate(const BoundaryHole& candidate) {
    if (!measure_ok(mesh_, candidate, target_)) return std::nullopt;
    if (!visited_.insert(key_of(candidate)).second) return std::nullopt;
    return solve(candidate, state_.result.extremal);
  }

  bool accept(const BoundaryHole& candidate, TraceResult&& r) {
    if (!(r.s_value < state_.result.s_value * (1.0 - kStrictDecrease))) return false;
    state_ = {candidate, std::move(r)};
    record();
    return true;
  }

  bool try_accept(const BoundaryHole& candidate) {
    auto r = evaluate(candidate);
    return r && accept(candidate, std::move(*r));
  }

  OptimizationRun finish() {
    run_.best_hole = state_.hole;
    run_.best_value = state_.result.s_value;
    run_.best_extremal = state_.result.extremal;
    run_.solve_converged = state_.result.converged;
    run_.alpha_effective = state_.hole.measure() / mesh_.boundary_measure();
    return std::move(run_);
  }

 private:
  void record() {
    visited_.insert(key_of(state_.hole));
    const int it = run_.history.empty() ? 0 : run_.history.back().iteration + 1;
    run_.history.push_back({it, state_.hole.measure(), state_.result.s_value});
  }

  const Mesh& mesh_;
  const ProblemConfig& cfg_;
  double target_;
  State state_;
  OptimizationRun run_;
  std::set<Key> visited_;
};

// Facets on either side of every arc end: removable ones are hole facets with
// a free neighbour, addable ones free facets with a hole neighbour.
void arc_frontier(const Mesh& mesh, const BoundaryHole& hole, std::vector<int>& removable,
                  std::vector<int>& addable) {
  removable.clear();
  addable.clear();
  for (int f = 0; f < static_cast<int>(mesh.num_facets()); ++f) {
    const auto nb = facet_neighbours(mesh, f);
    const bool inside = hole.contains(f);
    const bool border = hole.contains(nb[0]) != inside || hole.contains(nb[1]) != inside;
    if (!border) continue;
    (inside ? removable : addable).push_back(f);
  }
}

bool translation_scan(const Mesh& mesh, Tracker& tracker);

void alternating_loop(const Mesh& mesh, const ProblemConfig& cfg, const OptimizerSettings& settings,
                      Tracker& tracker) {
  const double kappa = settings.relaxation > 0.0 ? settings.relaxation : 1.0 / mesh.max_facet_measure();
  std::vector<int> removable, addable;
  for (int it = 0; it < settings.max_iterations; ++it) {
    const State& cur = tracker.current();
    const Field relaxed = relaxed_extremal(mesh, cfg, cur.hole, kappa, cur.result.extremal);
    std::vector<double> score(mesh.num_facets());
    for (std::size_t f = 0; f < score.size(); ++f) {
      score[f] = facet_power_integral(mesh, static_cast<int>(f), relaxed, cfg.q);
    }
    std::vector<int> order(mesh.num_facets());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return score[a] < score[b]; });

    const BoundaryHole greedy = greedy_select(mesh, order, tracker.target());
    if (tracker.try_accept(greedy)) continue;

    // Damped reselection: move only the m most favourable facets.
    std::vector<int> leaving, entering;
    for (int f : cur.hole.facets()) {
      if (!greedy.contains(f)) leaving.push_back(f);
    }
    for (int f : greedy.facets()) {
      if (!cur.hole.contains(f)) entering.push_back(f);
    }
    std::stable_sort(leaving.begin(), leaving.end(), [&](int a, int b) { return score[a] > score[b]; });
    std::stable_sort(entering.begin(), entering.end(), [&](int a, int b) { return score[a] < score[b]; });
    bool moved = false;
    for (std::size_t m = std::min(leaving.size(), entering.size()) / 2; m >= 2 && !moved; m /= 2) {
      moved = tracker.try_accept(swap_facets(mesh, cur.hole, std::span(leaving).first(m),
                                             std::span(entering).first(m)));
    }
    if (moved) continue;

    // Single swaps across arc ends, best-ranked pairs first.
    arc_frontier(mesh, cur.hole, removable, addable);
    std::stable_sort(removable.begin(), removable.end(), [&](int a, int b) { return score[a] > score[b]; });
    std::stable_sort(addable.begin(), addable.end(), [&](int a, int b) { return score[a] < score[b]; });
    std::vector<std::pair<std::size_t, std::size_t>> pairs;
    for (std::size_t i = 0; i < removable.size(); ++i) {
      for (std::size_t j = 0; j < addable.size(); ++j) pairs.emplace_back(i, j);
    }
    std::stable_sort(pairs.begin(), pairs.end(), [](const auto& a, const auto& b) {
      return a.first + a.second < b.first + b.second;
    });
    int trials = 0;
    for (const auto& [i, j] : pairs) {
      if (trials >= settings.max_swap_trials) break;
      const int r = removable[i], a = addable[j];
      const BoundaryHole candidate = swap_facets(mesh, cur.hole, std::span(&r, 1), std::span(&a, 1));
      if (!measure_ok(mesh, candidate, tracker.target())) continue;
      ++trials;
      if (tracker.try_accept(candidate)) {
        moved = true;
        break;
      }
    }
    if (!moved && settings.translation_scan) moved = translation_scan(mesh, tracker);
    if (!moved) {
      tracker.run().converged = true;
      return;
    }
  }
}

// Contiguous run of facets [first, first + count) modulo the facet count.
struct ArcSpan {
  long first = 0;
  long count = 0;
};

std::vector<ArcSpan> arc_spans(const Mesh& mesh, const BoundaryHole& hole) {
  std::vector<ArcSpan> out;
  for (const Arc& a : hole_arcs(mesh, hole)) out.push_back({a.first_facet, a.num_facets});
  return out;
}

// Builds the hole from arc spans; empty when arcs overlap.
std::optional<BoundaryHole> hole_from_spans(const Mesh& mesh, const std::vector<ArcSpan>& spans) {
  std::vector<int> facets;
  for (const auto& s : spans) {
    if (s.count < 0) return std::nullopt;
    for (long k = 0; k < s.count; ++k) facets.push_back(wrap_facet(mesh, s.first + k));
  }
  const std::size_t n = facets.size();
  BoundaryHole hole(mesh, std::move(facets));
  if (hole.size() != n) return std::nullopt;
  return hole;
}

// Every rigid shift of every arc; the best strict decrease is kept.
bool translation_scan(const Mesh& mesh, Tracker& tracker) {
  const BoundaryHole base = tracker.current().hole;
  const std::vector<ArcSpan> spans = arc_spans(mesh, base);
  std::optional<BoundaryHole> best_hole;
  std::optional<TraceResult> best;
  for (std::size_t i = 0; i < spans.size(); ++i) {
    for (long k = 1; k < static_cast<long>(mesh.num_facets()); ++k) {
      auto s = spans;
      s[i].first += k;
      const auto hole = hole_from_spans(mesh, s);
      if (!hole) continue;
      auto r = tracker.evaluate(*hole);
      if (r && (!best || r->s_value < best->s_value)) {
        best = std::move(r);
        best_hole = hole;
      }
    }
  }
  return best && tracker.accept(*best_hole, std::move(*best));
}

double arc_point(const Mesh& mesh, long facet_boundary) {
  const int f = wrap_facet(mesh, facet_boundary);
  return mesh.facet(f).s_begin;
}

// Endpoint derivative of S for a bump field centred at facet boundary `b`
// (the start of facet b). Falls back to a central one-facet difference of S
// when no tube field fits (polygon corners, short arcs or gaps).
double endpoint_derivative(const Mesh& mesh, const ProblemConfig& cfg, Tracker& tracker,
                           const std::vector<ArcSpan>& spans, std::size_t arc, bool at_end,
                           double half_width) {
  const State& cur = tracker.current();
  const long b = at_end ? spans[arc].first + spans[arc].count : spans[arc].first;
  const double center = arc_point(mesh, b);
  const double period = mesh.boundary_measure();
  // The bump must not reach the other endpoints.
  bool isolated = true;
  for (std::size_t i = 0; i < spans.size(); ++i) {
    for (long e : {spans[i].first, spans[i].first + spans[i].count}) {
      if (i == arc && e == b) continue;
      double d = std::abs(arc_point(mesh, e) - center);
      d = std::min(d, period - d);
      if (d < half_width) isolated = false;
    }
  }
  if (isolated) {
    try {
      const auto V = TangentialField::tube(mesh, periodic_bump(center, half_width, period),
                                           periodic_bump_derivative(center, half_width, period));
      return evaluate_shape_derivative(mesh, cfg, cur.hole, V, cur.result).ds_dt;
    } catch (const GeometryError&) {
      // Tube does not fit here; use differences below.
    }
  }
  auto moved = [&](long shift) -> std::optional<double> {
    std::vector<ArcSpan> s = spans;
    if (at_end) {
      s[arc].count += shift;
    } else {
      s[arc].first += shift;
      s[arc].count -= shift;
    }
    if (s[arc].count < 1) return std::nullopt;
    const auto hole = hole_from_spans(mesh, s);
    if (!hole || hole->size() >= mesh.num_facets()) return std::nullopt;
    return tracker.solve(*hole, cur.result.extremal).s_value;
  };
  const auto plus = moved(1), minus = moved(-1);
  const double h_plus = mesh.facet(wrap_facet(mesh, b)).measure;
  const double h_minus = mesh.facet(wrap_facet(mesh, b - 1)).measure;
  const double s0 = cur.result.s_value;
  if (plus && minus) return (*plus - *minus) / (h_plus + h_minus);
  if (plus) return (*plus - s0) / h_plus;
  if (minus) return (s0 - *minus) / h_minus;
  return 0.0;
}

struct Move {
  double rate = 0.0;       // predicted dS per unit arclength
  double magnitude = 0.0;  // sum of |d| of the endpoints involved
  std::function<std::vector<ArcSpan>(long)> apply;
};

// One-facet shifts of each arc, kept only when S drops by more than
// `tolerance` relative. Escapes symmetric stationary points such as an arc
// centred on a polygon edge.
bool probe_shifts(const Mesh& mesh, Tracker& tracker, double tolerance) {
  const std::vector<ArcSpan> spans = arc_spans(mesh, tracker.current().hole);
  const double s0 = tracker.current().result.s_value;
  for (std::size_t i = 0; i < spans.size(); ++i) {
    for (long k : {1L, -1L}) {
      auto s = spans;
      s[i].first += k;
      const auto hole = hole_from_spans(mesh, s);
      if (!hole) continue;
      auto r = tracker.evaluate(*hole);
      if (r && r->s_value < s0 * (1.0 - tolerance) && tracker.accept(*hole, std::move(*r))) return true;
    }
  }
  return false;
}

void shape_gradient_loop(const Mesh& mesh, const ProblemConfig& cfg, const OptimizerSettings& settings,
                         Tracker& tracker) {
  const double half_width = 2.5 * mesh.max_facet_measure();
  for (int it = 0; it < settings.max_iterations; ++it) {
    const State& cur = tracker.current();
    const std::vector<ArcSpan> spans = arc_spans(mesh, cur.hole);
    std::vector<double> d0(spans.size()), d1(spans.size());
    for (std::size_t i = 0; i < spans.size(); ++i) {
      d0[i] = endpoint_derivative(mesh, cfg, tracker, spans, i, false, half_width);
      d1[i] = endpoint_derivative(mesh, cfg, tracker, spans, i, true, half_width);
    }

    std::vector<Move> moves;
    for (std::size_t i = 0; i < spans.size(); ++i) {
      const double g = d0[i] + d1[i];
      const long dir = g > 0.0 ? -1 : 1;
      moves.push_back({-std::abs(g), std::abs(d0[i]) + std::abs(d1[i]), [spans, i, dir](long k) {
                         auto s = spans;
                         s[i].first += dir * k;
                         return s;
                       }});
    }
    // Measure reallocation: grow arc i at its cheaper end, shrink arc j at its
    // cheaper end.
    for (std::size_t i = 0; i < spans.size(); ++i) {
      for (std::size_t j = 0; j < spans.size(); ++j) {
        if (i == j) continue;
        const double grow = std::min(d1[i], -d0[i]);
        const double shrink = std::min(d0[j], -d1[j]);
        const bool grow_end = d1[i] <= -d0[i];
        const bool shrink_start = d0[j] <= -d1[j];
        if (grow + shrink >= 0.0) continue;
        moves.push_back({grow + shrink, std::abs(grow) + std::abs(shrink),
                         [spans, i, j, grow_end, shrink_start](long k) {
                           auto s = spans;
                           if (!grow_end) s[i].first -= k;
                           s[i].count += k;
                           if (shrink_start) s[j].first += k;
                           s[j].count -= k;
                           return s;
                         }});
      }
    }
    std::stable_sort(moves.begin(), moves.end(), [](const Move& a, const Move& b) { return a.rate < b.rate; });

    bool moved = false;
    for (const Move& move : moves) {
      if (-move.rate <= settings.gradient_tolerance * move.magnitude) continue;
      for (long k = settings.max_step_facets; k >= 1 && !moved; k /= 2) {
        const auto hole = hole_from_spans(mesh, move.apply(k));
        if (hole) moved = tracker.try_accept(*hole);
      }
      if (moved) break;
    }
    if (!moved) moved = probe_shifts(mesh, tracker, settings.probe_tolerance);
    if (!moved) {
      tracker.run().converged = true;
      return;
    }
  }
}

void require_closed_2d(const Mesh& mesh) {
  if (mesh.dim() != 2 || !mesh.closed_boundary()) {
    throw GeometryError("hole optimization needs a 2D mesh with a closed boundary");
  }
}

}  // namespace

std::string strategy_name(Strategy s) {
  switch (s) {
    case Strategy::Alternating: return "alternating";
    case Strategy::ShapeGradient: return "shape_gradient";
    case Strategy::Combined: return "combined";
  }
  return "unknown";
}

double target_measure(const Mesh& mesh, double alpha) { return alpha * mesh.boundary_measure(); }

OptimizationRun optimize_hole_alternating(const Mesh& mesh, const ProblemConfig& cfg, double alpha,
                                          const std::optional<BoundaryHole>& init_hole,
                                          const OptimizerSettings& settings) {
  check_alpha(alpha);
  validate(cfg, mesh.dim());
  require_closed_2d(mesh);
  Tracker tracker(mesh, cfg, alpha, Strategy::Alternating);
  tracker.start(init_hole ? *init_hole : make_hole_from_arc(mesh, 0.0, tracker.target()));
  alternating_loop(mesh, cfg, settings, tracker);
  return tracker.finish();
}

OptimizationRun optimize_hole_shape_gradient(const Mesh& mesh, const ProblemConfig& cfg, double alpha,
                                             const BoundaryHole& init_hole,
                                             const OptimizerSettings& settings) {
  check_alpha(alpha);
  validate(cfg, mesh.dim());
  require_closed_2d(mesh);
  Tracker tracker(mesh, cfg, alpha, Strategy::ShapeGradient);
  tracker.start(init_hole);
  shape_gradient_loop(mesh, cfg, settings, tracker);
  return tracker.finish();
}

OptimizationRun optimize_hole_combined(const Mesh& mesh, const ProblemConfig& cfg, double alpha,
                                       const std::optional<BoundaryHole>& init_hole,
                                       const OptimizerSettings& settings) {
  check_alpha(alpha);
  validate(cfg, mesh.dim());
  require_closed_2d(mesh);
  Tracker tracker(mesh, cfg, alpha, Strategy::Combined);
  tracker.start(init_hole ? *init_hole : make_hole_from_arc(mesh, 0.0, tracker.target()));
  alternating_loop(mesh, cfg, settings, tracker);
  const bool first = tracker.run().converged;
  tracker.run().converged = false;
  shape_gradient_loop(mesh, cfg, settings, tracker);
  tracker.run().converged = first && tracker.run().converged;
  return tracker.finish();
}

BoundaryHole random_hole(const Mesh& mesh, double alpha, std::uint64_t seed) {
  check_alpha(alpha);
  require_closed_2d(mesh);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const double target = target_measure(mesh, alpha);
  const double period = mesh.boundary_measure();
  const int arcs = 1 + static_cast<int>(rng() % 3);
  std::vector<double> weights(arcs);
  for (double& w : weights) w = 0.2 + unit(rng);
  const double total = std::accumulate(weights.begin(), weights.end(), 0.0);

  BoundaryHole hole;
  for (double w : weights) {
    const BoundaryHole arc = make_hole_from_arc(mesh, unit(rng) * period, target * w / total);
    hole = hole.empty() ? arc : hole_union(mesh, hole, arc);
  }
  // Grow or trim at arc ends until within half a facet of the target.
  const double slack = 0.5 * mesh.max_facet_measure();
  std::vector<int> removable, addable;
  for (std::size_t guard = 0; guard < 4 * mesh.num_facets(); ++guard) {
    const double m = hole.measure();
    if (std::abs(m - target) <= slack) break;
    arc_frontier(mesh, hole, removable, addable);
    const auto& pool = m < target ? addable : removable;
    if (pool.empty()) break;
    const int f = pool[rng() % pool.size()];
    hole = m < target ? swap_facets(mesh, hole, {}, std::span(&f, 1))
                      : swap_facets(mesh, hole, std::span(&f, 1), {});
  }
  return hole;
}

MultiStartResult optimize_hole_multistart(const Mesh& mesh, const ProblemConfig& cfg, double alpha,
                                          Strategy strategy, int starts, std::uint64_t seed,
                                          unsigned workers, const OptimizerSettings& settings) {
  check_alpha(alpha);
  if (starts < 1) throw ConfigError("need at least one start");
  MultiStartResult out;
  out.runs.resize(starts);
  parallel_for(static_cast<std::size_t>(starts), workers, [&](std::size_t i) {
    const BoundaryHole init = random_hole(mesh, alpha, seed + i);
    switch (strategy) {
      case Strategy::Alternating:
        out.runs[i] = optimize_hole_alternating(mesh, cfg, alpha, init, settings);
        break;
      case Strategy::ShapeGradient:
        out.runs[i] = optimize_hole_shape_gradient(mesh, cfg, alpha, init, settings);
        break;
      case Strategy::Combined:
        out.runs[i] = optimize_hole_combined(mesh, cfg, alpha, init, settings);
        break;
    }
  });
  for (std::size_t i = 1; i < out.runs.size(); ++i) {
    if (out.runs[i].best_value < out.runs[out.best].best_value) out.best = i;
  }
  return out;
}

double zero_set_measure(const Mesh& mesh, const TraceResult& result, double threshold) {
  const auto& u = result.extremal;
  if (u.size() != mesh.num_vertices()) throw std::invalid_argument("extremal size mismatch");
  if (threshold < 0.0) {
    double umax = 0.0;
    for (double x : u) umax = std::max(umax, std::abs(x));
    threshold = 1e-8 * umax;
  }
  double m = 0.0;
  for (const auto& f : mesh.facets()) {
    bool zero = std::abs(u[f.vertices[0]]) <= threshold;
    if (f.vertices[1] >= 0) zero = zero && std::abs(u[f.vertices[1]]) <= threshold;
    if (zero) m += f.measure;
  }
  return m;
}

}  // namespace stc
