#include "stc/cli/commands.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>

#include "stc/cli/output.hpp"
#include "stc/hole_optimizer.hpp"
#include "stc/one_dim.hpp"
#include "stc/shape_derivative.hpp"
#include "stc/thin_domain.hpp"
#include "stc/trace_solver.hpp"

namespace stc::cli {

namespace {

using nlohmann::json;

void allow_options(const RunSpec& spec, const std::set<std::string>& known) {
  for (const auto& [key, value] : spec.options.items()) {
    if (!known.contains(key)) throw SpecError("/options/" + key, "unknown option for " + spec.command);
  }
}

json cfg_to_json(const ProblemConfig& cfg) {
  return {{"p", cfg.p},
          {"q", cfg.q},
          {"epsilon", cfg.effective_epsilon()},
          {"dof_tolerance", cfg.dof_tolerance},
          {"decrease_tolerance", cfg.decrease_tolerance},
          {"max_inner_iterations", cfg.max_inner_iterations}};
}

json base_summary(const RunSpec& spec) {
  return {{"command", spec.command}, {"run_id", spec.run_id}, {"seed", spec.seed}, {"spec", spec.source}};
}

std::filesystem::path prepare_directory(const RunSpec& spec) {
  const auto dir = spec.output_root / spec.run_id;
  std::filesystem::create_directories(dir);
  return dir;
}

Mesh build_mesh(const RunSpec& spec) {
  try {
    return generate_mesh(spec.domain, spec.resolution);
  } catch (const GeometryError& e) {
    throw SpecError("/resolution", e.what());
  }
}

BoundaryHole build_hole(const RunSpec& spec, const Mesh& mesh) {
  if (spec.alpha) return make_hole_from_arc(mesh, 0.0, *spec.alpha * mesh.boundary_measure());
  BoundaryHole hole;
  for (const auto& [start, length] : spec.hole) {
    const BoundaryHole arc = make_hole_from_arc(mesh, start, length);
    hole = hole.empty() ? arc : hole_union(mesh, hole, arc);
  }
  return hole;
}

double require_alpha(const RunSpec& spec) {
  if (!spec.alpha) throw SpecError("/alpha", spec.command + " needs alpha");
  return *spec.alpha;
}

OptimizerSettings optimizer_settings(const RunSpec& spec) {
  OptimizerSettings s;
  s.max_iterations = option_int(spec, "max_outer_iterations", s.max_iterations);
  s.relaxation = option_number(spec, "relaxation", s.relaxation);
  s.max_swap_trials = option_int(spec, "swap_trials", s.max_swap_trials);
  s.translation_scan = option_bool(spec, "translation_scan", s.translation_scan);
  s.gradient_tolerance = option_number(spec, "gradient_tolerance", s.gradient_tolerance);
  s.probe_tolerance = option_number(spec, "probe_tolerance", s.probe_tolerance);
  s.max_step_facets = option_int(spec, "max_step_facets", s.max_step_facets);
  return s;
}

const std::set<std::string> kOptimizerOptions{"max_outer_iterations", "relaxation",      "swap_trials",
                                              "translation_scan",     "gradient_tolerance", "probe_tolerance",
                                              "max_step_facets"};

Strategy parse_strategy(const std::string& name) {
  if (name == "alternating") return Strategy::Alternating;
  if (name == "shape_gradient") return Strategy::ShapeGradient;
  if (name == "combined") return Strategy::Combined;
  throw SpecError("/options/strategy", "expected alternating, shape_gradient or combined");
}

json run_to_json(const Mesh& mesh, const OptimizationRun& run) {
  json history = json::array();
  for (const auto& h : run.history) {
    history.push_back({{"iteration", h.iteration}, {"measure", h.measure}, {"value", h.value}});
  }
  return {{"strategy", strategy_name(run.strategy)},
          {"alpha", run.alpha},
          {"alpha_effective", run.alpha_effective},
          {"best_value", run.best_value},
          {"best_hole", hole_to_json(mesh, run.best_hole)},
          {"converged", run.converged},
          {"solve_converged", run.solve_converged},
          {"solves", run.solves},
          {"history", history}};
}

void write_mesh_outputs(const std::filesystem::path& dir, const Mesh& mesh, std::span<const double> u) {
  write_json(dir / "mesh.json", mesh_to_json(mesh));
  write_extremal_csv(dir / "extremal.csv", mesh, u);
}

CommandOutcome finish(const std::filesystem::path& dir, json summary, bool converged) {
  summary["converged"] = converged;
  write_json(dir / "summary.json", summary);
  return {converged ? kExitConverged : kExitNotConverged, dir, std::move(summary)};
}

CommandOutcome run_solve(const RunSpec& spec, std::ostream& log) {
  allow_options(spec, {"restarts"});
  const int restarts = option_int(spec, "restarts", 0);
  if (restarts < 0) throw SpecError("/options/restarts", "must be nonnegative");
  const Mesh mesh = build_mesh(spec);
  const BoundaryHole hole = build_hole(spec, mesh);
  log << "solve: " << mesh.num_vertices() << " vertices, hole of " << hole.size() << " facets\n";
  const TraceResult r = solve_trace_constant(mesh, spec.cfg, hole);

  const auto dir = prepare_directory(spec);
  json summary = base_summary(spec);
  summary["p"] = spec.cfg.p;
  summary["q"] = spec.cfg.q;
  summary["cfg"] = cfg_to_json(spec.cfg);
  summary["alpha_or_hole"] = spec.alpha ? json(*spec.alpha) : hole_to_json(mesh, hole);
  summary["hole"] = hole_to_json(mesh, hole);
  summary["s_value"] = r.s_value;
  summary["lambda"] = r.lambda;
  summary["el_residual"] = r.el_residual;
  summary["iterations"] = r.iterations;
  summary["mesh"] = {{"resolution", mesh.resolution()},
                     {"n_vertices", mesh.num_vertices()},
                     {"domain", domain_to_json(spec.domain)}};
  if (restarts > 0) {
    const RestartSpread spread = restart_spread(mesh, spec.cfg, hole, restarts, spec.seed);
    summary["restarts"] = {{"values", spread.values}, {"best", spread.best}, {"spread", spread.spread}};
  }
  std::vector<std::vector<double>> rows;
  for (std::size_t i = 0; i < r.history.size(); ++i) rows.push_back({static_cast<double>(i), r.history[i]});
  write_csv(dir / "data.csv", {"record", "value"}, rows);
  write_mesh_outputs(dir, mesh, r.extremal);
  log << "S = " << r.s_value << " (residual " << r.el_residual << ")\n";
  return finish(dir, std::move(summary), r.converged);
}

CommandOutcome run_optimize(const RunSpec& spec, std::ostream& log) {
  auto known = kOptimizerOptions;
  known.insert({"strategy", "starts"});
  allow_options(spec, known);
  const double alpha = require_alpha(spec);
  const Strategy strategy = parse_strategy(option_string(spec, "strategy", "alternating"));
  const int starts = option_int(spec, "starts", 5);
  if (starts < 1) throw SpecError("/options/starts", "must be at least 1");
  const Mesh mesh = build_mesh(spec);
  log << "optimize: " << strategy_name(strategy) << ", " << starts << " starts, " << mesh.num_facets()
      << " boundary facets\n";
  const MultiStartResult multi =
      optimize_hole_multistart(mesh, spec.cfg, alpha, strategy, starts, spec.seed, spec.workers, optimizer_settings(spec));
  const OptimizationRun& best = multi.best_run();

  const auto dir = prepare_directory(spec);
  json summary = base_summary(spec);
  summary["cfg"] = cfg_to_json(spec.cfg);
  summary["alpha"] = alpha;
  summary["alpha_effective"] = best.alpha_effective;
  summary["best_value"] = best.best_value;
  summary["best_start"] = multi.best;
  summary["best_arcs"] = hole_arcs(mesh, best.best_hole).size();
  summary["final_hole"] = hole_to_json(mesh, best.best_hole);
  json runs = json::array();
  for (const auto& run : multi.runs) runs.push_back(run_to_json(mesh, run));
  summary["runs"] = runs;
  TraceResult best_trace;
  best_trace.extremal = best.best_extremal;
  summary["zero_set_measure"] = zero_set_measure(mesh, best_trace);

  std::vector<std::vector<double>> rows;
  bool converged = true;
  for (std::size_t i = 0; i < multi.runs.size(); ++i) {
    converged = converged && multi.runs[i].converged && multi.runs[i].solve_converged;
    for (const auto& h : multi.runs[i].history) {
      rows.push_back({static_cast<double>(i), static_cast<double>(h.iteration), h.measure, h.value});
    }
  }
  write_csv(dir / "data.csv", {"start", "iteration", "measure", "value"}, rows);
  write_mesh_outputs(dir, mesh, best.best_extremal);
  log << "best S = " << best.best_value << " with " << hole_arcs(mesh, best.best_hole).size() << " arc(s)\n";
  return finish(dir, std::move(summary), converged);
}

CommandOutcome run_shape_grad_check(const RunSpec& spec, std::ostream& log) {
  allow_options(spec, {"field", "center", "half_width", "steps", "transport", "divergence"});
  const Mesh mesh = build_mesh(spec);
  if (mesh.dim() != 2) throw SpecError("/domain", "shape-grad-check needs a 2D domain");
  const BoundaryHole hole = build_hole(spec, mesh);
  if (hole.empty()) throw SpecError("/hole", "shape-grad-check needs a hole (alpha or hole)");
  const double period = mesh.boundary_measure();

  const std::string field = option_string(spec, "field", "bump");
  std::optional<TangentialField> V;
  json field_json;
  if (field == "rotation") {
    if (!std::holds_alternative<Disk>(spec.domain)) throw SpecError("/options/field", "rotation needs a disk");
    V = TangentialField::rotation(mesh, 1.0);
    field_json = {{"kind", "rotation"}, {"speed", 1.0}};
  } else if (field == "bump") {
    const auto arcs = hole_arcs(mesh, hole);
    const double default_center = wrap_arclength(mesh, arcs.front().start + arcs.front().length);
    const double center = option_number(spec, "center", default_center);
    const double half_width = option_number(spec, "half_width", 0.3);
    if (!(half_width > 0.0)) throw SpecError("/options/half_width", "must be positive");
    try {
      V = TangentialField::tube(mesh, periodic_bump(center, half_width, period),
                                periodic_bump_derivative(center, half_width, period));
    } catch (const GeometryError& e) {
      throw SpecError("/options/center", e.what());
    }
    field_json = {{"kind", "bump"}, {"center", center}, {"half_width", half_width}};
  } else {
    throw SpecError("/options/field", "expected bump or rotation");
  }

  const std::string transport = option_string(spec, "transport", "mesh_flow");
  TransportMode mode;
  if (transport == "mesh_flow") {
    mode = TransportMode::MeshFlow;
  } else if (transport == "facet_snap") {
    mode = TransportMode::FacetSnap;
  } else {
    throw SpecError("/options/transport", "expected mesh_flow or facet_snap");
  }
  const std::string divergence = option_string(spec, "divergence", "facet_stretch");
  BoundaryDivergence div;
  if (divergence == "facet_stretch") {
    div = BoundaryDivergence::FacetStretch;
  } else if (divergence == "closed_form") {
    div = BoundaryDivergence::ClosedForm;
    if (!V->has_closed_form_derivative()) throw SpecError("/options/divergence", "field has no closed form");
  } else {
    throw SpecError("/options/divergence", "expected facet_stretch or closed_form");
  }
  std::vector<double> steps = option_numbers(spec, "steps", {1e-2 * period, 1e-3 * period, 1e-4 * period});
  for (double h : steps) {
    if (!(h > 0.0)) throw SpecError("/options/steps", "steps must be positive");
  }

  log << "shape-grad-check: " << steps.size() << " steps, transport " << transport << "\n";
  const TraceResult base = solve_trace_constant(mesh, spec.cfg, hole);
  const ShapeDerivativeResult sd = evaluate_shape_derivative(mesh, spec.cfg, hole, *V, base, div);
  const auto samples = fd_check(mesh, spec.cfg, hole, *V, steps, mode, spec.workers);

  const auto dir = prepare_directory(spec);
  json summary = base_summary(spec);
  summary["cfg"] = cfg_to_json(spec.cfg);
  summary["hole"] = hole_to_json(mesh, hole);
  summary["field"] = field_json;
  summary["transport"] = transport;
  summary["divergence"] = divergence;
  summary["s_value"] = base.s_value;
  summary["ds_dt"] = sd.ds_dt;
  summary["boundary_term"] = sd.boundary_term;
  summary["volume_term"] = sd.volume_term;
  bool converged = base.converged;
  double best = std::numeric_limits<double>::infinity();
  std::vector<std::vector<double>> rows;
  json fd = json::array();
  for (const auto& s : samples) {
    rows.push_back({s.h, s.fd_value, sd.ds_dt, s.relative_error});
    fd.push_back({{"h", s.h}, {"s_plus", s.s_plus}, {"s_minus", s.s_minus}, {"fd_value", s.fd_value},
                  {"relative_error", s.relative_error}, {"converged", s.converged}});
    converged = converged && s.converged;
    best = std::min(best, s.relative_error);
  }
  summary["fd_estimates"] = fd;
  summary["best_relative_error"] = best;
  write_csv(dir / "data.csv", {"h", "fd_value", "analytic_value", "relative_error"}, rows);
  write_mesh_outputs(dir, mesh, base.extremal);
  log << "ds/dt = " << sd.ds_dt << ", best relative FD error " << best << "\n";
  return finish(dir, std::move(summary), converged);
}

CommandOutcome run_sweep_alpha(const RunSpec& spec, std::ostream& log) {
  auto known = kOptimizerOptions;
  known.insert({"alphas", "starts", "strategy"});
  allow_options(spec, known);
  const std::vector<double> alphas =
      option_numbers(spec, "alphas", {0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9});
  for (double a : alphas) {
    if (!(a > 0.0 && a < 1.0)) throw SpecError("/options/alphas", "values must lie in (0,1)");
  }
  const int starts = option_int(spec, "starts", 1);
  if (starts < 1) throw SpecError("/options/starts", "must be at least 1");
  const Strategy strategy = parse_strategy(option_string(spec, "strategy", "alternating"));
  const Mesh mesh = build_mesh(spec);
  const OptimizerSettings settings = optimizer_settings(spec);

  std::vector<std::vector<double>> rows;
  json points = json::array();
  bool converged = true;
  bool increasing = true;
  double previous = -std::numeric_limits<double>::infinity();
  for (double a : alphas) {
    log << "alpha = " << a << "\n";
    const MultiStartResult multi =
        optimize_hole_multistart(mesh, spec.cfg, a, strategy, starts, spec.seed, spec.workers, settings);
    const OptimizationRun& best = multi.best_run();
    const bool ok = best.converged && best.solve_converged;
    converged = converged && ok;
    increasing = increasing && best.best_value > previous;
    previous = best.best_value;
    rows.push_back({a, best.best_value, best.alpha_effective, ok ? 1.0 : 0.0});
    points.push_back({{"alpha", a},
                      {"s_value", best.best_value},
                      {"alpha_effective", best.alpha_effective},
                      {"arcs", hole_arcs(mesh, best.best_hole).size()},
                      {"converged", ok}});
  }
  const auto dir = prepare_directory(spec);
  json summary = base_summary(spec);
  summary["cfg"] = cfg_to_json(spec.cfg);
  summary["points"] = points;
  summary["strictly_increasing"] = increasing;
  write_csv(dir / "data.csv", {"alpha", "s_value", "alpha_effective", "converged"}, rows);
  write_json(dir / "mesh.json", mesh_to_json(mesh));
  return finish(dir, std::move(summary), converged);
}

CommandOutcome run_sweep_mu(const RunSpec& spec, std::ostream& log) {
  auto known = kOptimizerOptions;
  known.insert({"a", "b", "mu_values", "resolution_factor", "extra_starts", "limit_cells", "max_vertices"});
  allow_options(spec, known);
  const double alpha = spec.alpha.value_or(0.5);
  const double a = option_number(spec, "a", 0.0);
  const double b = option_number(spec, "b", 1.0);
  const std::vector<double> mus = option_numbers(spec, "mu_values", {0.5, 0.25, 0.125, 0.0625});
  const double factor = option_number(spec, "resolution_factor", 4.0);
  if (!(factor >= 2.0)) throw SpecError("/options/resolution_factor", "must be at least 2 (two layers)");
  MuSweepSettings settings;
  settings.resolution = [factor](double mu) { return mu / factor; };
  settings.extra_starts = option_int(spec, "extra_starts", 0);
  settings.limit_cells = option_int(spec, "limit_cells", settings.limit_cells);
  settings.max_vertices = static_cast<std::size_t>(
      std::max(1, option_int(spec, "max_vertices", static_cast<int>(settings.max_vertices))));
  settings.seed = spec.seed;
  settings.workers = spec.workers;
  settings.optimizer = optimizer_settings(spec);
  log << "sweep-mu: " << mus.size() << " values of mu\n";
  MuSweep sweep;
  try {
    sweep = run_mu_sweep(a, b, alpha, spec.cfg, mus, settings);
  } catch (const ConfigError& e) {
    throw SpecError("/options", e.what());
  }
  for (const auto& w : sweep.warnings) log << "warning: " << w << "\n";

  std::vector<std::vector<double>> rows;
  json records = json::array();
  bool converged = true;
  for (const auto& r : sweep.records) {
    rows.push_back({r.mu, r.s_mu, r.rescaled, r.slope_estimate});
    converged = converged && r.converged && r.run.solve_converged;
    records.push_back({{"mu", r.mu},
                       {"resolution", r.resolution},
                       {"n_vertices", r.vertices},
                       {"S_mu", r.s_mu},
                       {"rescaled", r.rescaled},
                       {"slope_estimate", r.slope_estimate},
                       {"alpha_effective", r.alpha_effective},
                       {"max_relative_stddev", r.max_relative_stddev},
                       {"limit_distance", r.limit_distance},
                       {"hole_in_end_segment", r.hole_in_end_segment},
                       {"converged", r.converged}});
  }
  const auto dir = prepare_directory(spec);
  json summary = base_summary(spec);
  summary["cfg"] = cfg_to_json(spec.cfg);
  summary["alpha"] = alpha;
  summary["interval"] = {a, b};
  summary["exponent"] = sweep.exponent;
  summary["records"] = records;
  summary["target_limit"] = sweep.target_limit;
  summary["fitted_limit"] = sweep.fitted_limit;
  summary["slope"] = sweep.slope;
  summary["relative_gap"] = sweep.relative_gap;
  summary["extrapolated_regime"] = sweep.extrapolated_regime;
  summary["note"] =
      "the limit theorem assumes p < n; with a one-dimensional base this run extrapolates it and uses the "
      "interval constant as the reference";
  summary["warnings"] = sweep.warnings;
  write_csv(dir / "data.csv", {"mu", "S_mu", "rescaled", "slope_estimate"}, rows);
  if (!sweep.records.empty()) {
    const auto& last = sweep.records.back();
    const Mesh mesh = generate_mesh(ThinRectangle{a, b, last.mu}, last.resolution);
    write_mesh_outputs(dir, mesh, last.run.best_extremal);
  }
  log << "target " << sweep.target_limit << ", gap " << sweep.relative_gap << ", slope " << sweep.slope << "\n";
  return finish(dir, std::move(summary), converged && !sweep.records.empty());
}

CommandOutcome run_verify_1d(const RunSpec& spec, std::ostream& log) {
  allow_options(spec, {"a", "b", "cells", "sweep_cells", "tolerance"});
  const double alpha = spec.alpha.value_or(0.5);
  const double a = option_number(spec, "a", 0.0);
  const double b = option_number(spec, "b", 1.0);
  const int cells = option_int(spec, "cells", 1000);
  const int sweep_cells = option_int(spec, "sweep_cells", 100);
  const double tolerance = option_number(spec, "tolerance", 0.005);
  if (!(a < b)) throw SpecError("/options/b", "needs a < b");
  const double p = spec.cfg.p;
  const double closed = closed_form_limit_constant(p, alpha, b - a);

  // The closed form is the constant of a free segment of length alpha (b-a),
  // i.e. a hole of fraction 1 - alpha; the eigenvalue form needs q = p.
  OneDimProblem problem;
  problem.a = a;
  problem.b = b;
  problem.alpha = 1.0 - alpha;
  problem.cfg = spec.cfg;
  problem.cfg.q = p;
  log << "verify-1d: p = " << p << ", alpha = " << alpha << ", " << cells << " cells\n";
  LimitResult fem;
  try {
    fem = solve_limit_problem(problem, a, a + problem.alpha * (b - a), cells);
  } catch (const ConfigError& e) {
    throw SpecError("/options", e.what());
  }
  const double rel = std::abs(fem.value - closed) / closed;

  const auto dir = prepare_directory(spec);
  json summary = base_summary(spec);
  summary["p"] = p;
  summary["q"] = p;
  summary["alpha"] = alpha;
  summary["interval"] = {a, b};
  summary["cells"] = cells;
  summary["closed_form"] = closed;
  summary["fem_value"] = fem.value;
  summary["relative_error"] = rel;
  summary["tolerance"] = tolerance;
  summary["within_tolerance"] = rel <= tolerance;
  summary["hole"] = {fem.hole_start, fem.hole_end};
  summary["lambda"] = fem.lambda;
  summary["el_residual"] = fem.residual;
  summary["iterations"] = fem.iterations;
  bool converged = fem.converged;

  std::vector<std::vector<double>> rows;
  if (sweep_cells > 0) {
    LimitSweep sweep;
    try {
      sweep = optimize_limit_hole(problem, sweep_cells, spec.workers);
    } catch (const ConfigError& e) {
      throw SpecError("/options/sweep_cells", e.what());
    }
    for (const auto& [start, value] : sweep.candidates) rows.push_back({start, value});
    const double h = (b - a) / sweep_cells;
    const bool endpoint = std::abs(sweep.best_start - a) < 0.5 * h || std::abs(sweep.best_end - b) < 0.5 * h;
    summary["sweep"] = {{"cells", sweep_cells},
                        {"best_start", sweep.best_start},
                        {"best_end", sweep.best_end},
                        {"best_value", sweep.best_value},
                        {"endpoint_abutting", endpoint},
                        {"converged", sweep.all_converged}};
    converged = converged && sweep.all_converged;
  }
  write_csv(dir / "data.csv", {"hole_start", "value"}, rows);
  std::vector<std::vector<double>> profile;
  for (std::size_t i = 0; i < fem.nodes.size(); ++i) profile.push_back({fem.nodes[i], 0.0, fem.field[i]});
  write_csv(dir / "extremal.csv", {"x", "y", "u"}, profile);
  log << "closed form " << closed << ", FEM " << fem.value << ", relative error " << rel << "\n";
  return finish(dir, std::move(summary), converged);
}

}  // namespace

CommandOutcome run_command(const RunSpec& spec, std::ostream& log) {
  if (spec.command == "solve") return run_solve(spec, log);
  if (spec.command == "optimize") return run_optimize(spec, log);
  if (spec.command == "shape-grad-check") return run_shape_grad_check(spec, log);
  if (spec.command == "sweep-alpha") return run_sweep_alpha(spec, log);
  if (spec.command == "sweep-mu") return run_sweep_mu(spec, log);
  if (spec.command == "verify-1d") return run_verify_1d(spec, log);
  throw SpecError("/command", "unknown command '" + spec.command + "'");
}

}  // namespace stc::cli
