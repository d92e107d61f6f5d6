#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "stc/fem.hpp"
#include "stc/geometry.hpp"
#include "stc/trace_solver.hpp"

namespace stc {

enum class Strategy { Alternating, ShapeGradient, Combined };

std::string strategy_name(Strategy s);

struct HistoryEntry {
  int iteration = 0;
  double measure = 0.0;
  double value = 0.0;
};

struct OptimizationRun {
  double alpha = 0.0;
  /// measure(best_hole) / H(boundary).
  double alpha_effective = 0.0;
  BoundaryHole best_hole;
  double best_value = 0.0;
  Field best_extremal;
  /// Accepted holes only, so values are nonincreasing.
  std::vector<HistoryEntry> history;
  Strategy strategy = Strategy::Alternating;
  /// The search stopped at a local optimum rather than the iteration cap.
  bool converged = false;
  /// The trace solve of best_hole met its tolerances.
  bool solve_converged = false;
  int solves = 0;
};

struct OptimizerSettings {
  int max_iterations = 200;
  /// Penalty weight on the hole in the relaxed ranking problem; <= 0 selects
  /// 1 / (max facet length).
  double relaxation = 0.0;
  /// Facet pairs tried by the swap fallback once the greedy step stalls.
  int max_swap_trials = 12;
  /// After swaps fail, try every rigid shift of every arc.
  bool translation_scan = true;
  /// Shape gradient: endpoint derivatives count as balanced when
  /// |d_start + d_end| <= gradient_tolerance * (|d_start| + |d_end|).
  double gradient_tolerance = 0.02;
  /// Balanced configurations are probed with one-facet shifts, kept when S
  /// drops by more than this relative amount.
  double probe_tolerance = 1e-4;
  /// Largest arc move per shape-gradient step, in facets.
  int max_step_facets = 8;
};

/// alpha * H(boundary). Holes are accepted within one facet length of it.
double target_measure(const Mesh& mesh, double alpha);

/// Alternating scheme: solve on the current hole, rank facets by a relaxed
/// extremal (the hole constraint replaced by a boundary penalty so that hole
/// facets carry information), reselect the facets of smallest boundary
/// energy up to the target measure and keep the new hole only if S strictly
/// decreases. When the greedy reselection stalls, single facet swaps across
/// arc ends and then rigid arc shifts are tried before declaring a local
/// optimum. Visited holes are memoized.
OptimizationRun optimize_hole_alternating(const Mesh& mesh, const ProblemConfig& cfg, double alpha,
                                          const std::optional<BoundaryHole>& init_hole = std::nullopt,
                                          const OptimizerSettings& settings = {});

/// Descent on arc endpoints. Each arc is translated along -(d_start + d_end),
/// where d_e is the shape derivative for a bump field centred on endpoint e;
/// measure moves between arcs along the largest derivative imbalance. Steps
/// are whole facets with halving. Once the derivatives balance, one-facet
/// shifts are probed to leave symmetric stationary points. Endpoints too
/// close to a polygon corner for a tube field use one-facet differences of S
/// instead. Adjacent arcs merge. 2D closed boundaries only.
OptimizationRun optimize_hole_shape_gradient(const Mesh& mesh, const ProblemConfig& cfg, double alpha,
                                             const BoundaryHole& init_hole,
                                             const OptimizerSettings& settings = {});

/// Alternating scheme followed by shape-gradient refinement of its output.
OptimizationRun optimize_hole_combined(const Mesh& mesh, const ProblemConfig& cfg, double alpha,
                                       const std::optional<BoundaryHole>& init_hole = std::nullopt,
                                       const OptimizerSettings& settings = {});

/// Random union of 1 to 3 arcs with measure within one facet of the target.
BoundaryHole random_hole(const Mesh& mesh, double alpha, std::uint64_t seed);

struct MultiStartResult {
  std::vector<OptimizationRun> runs;
  std::size_t best = 0;
  const OptimizationRun& best_run() const { return runs.at(best); }
};

/// Runs `strategy` from `starts` random holes (seeds seed, seed+1, ...) in
/// parallel and keeps the lowest value; ties go to the lowest seed.
MultiStartResult optimize_hole_multistart(const Mesh& mesh, const ProblemConfig& cfg, double alpha,
                                          Strategy strategy, int starts = 5, std::uint64_t seed = 1,
                                          unsigned workers = 0, const OptimizerSettings& settings = {});

/// Boundary measure of facets whose endpoint values are both <= threshold.
/// threshold < 0 selects 1e-8 * max nodal value.
double zero_set_measure(const Mesh& mesh, const TraceResult& result, double threshold = -1.0);

}  // namespace stc
