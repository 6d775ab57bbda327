#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "pmeobst/field.hpp"
#include "pmeobst/grid.hpp"
#include "pmeobst/solver.hpp"

namespace pmeobst {

enum class Regularity {
  kContinuous,
  kLowerSemicontinuous,
};

/// Bounded non-negative obstacle, evaluable anywhere on the cylinder, with a
/// regularity tag. Lower-semicontinuous obstacles admit a nondecreasing
/// continuous approximation via inf-convolution (see inf_convolution).
class Obstacle {
 public:
  using Evaluator = std::function<double(std::span<const double>, double)>;

  static Obstacle constant(double c);
  static Obstacle from_function(Evaluator f, double bound, Regularity reg);
  /// Multilinear interpolation of nodal values; exact at grid nodes.
  static Obstacle from_table(ScalarField table, Regularity reg);
  /// c on the closed set {t >= t_from} x (closed spatial box), else 0.
  static Obstacle indicator(double c, double t_from,
                            std::vector<Interval> spatial_box);

  double operator()(std::span<const double> x, double t) const {
    return eval_(x, t);
  }
  double bound() const { return bound_; }
  Regularity regularity() const { return regularity_; }

  /// Nodal samples; between-node behavior is outside the discrete model.
  ScalarField sample(const SpaceTimeGrid& grid) const;

 private:
  Obstacle(Evaluator eval, double bound, Regularity reg)
      : eval_(std::move(eval)), bound_(bound), regularity_(reg) {}

  Evaluator eval_;
  double bound_ = 0.0;
  Regularity regularity_ = Regularity::kContinuous;
};

/// Parabolic inf-convolution against the grid node set:
///   psi_k(z) = min over nodes w of ( psi(w) + k * dist(z, w) ),
///   dist((x,t),(y,s)) = |x-y| + |t-s|.
/// The result is continuous (k-Lipschitz), <= psi at nodes, nondecreasing in
/// k, and equals psi at every node once k exceeds the nodal slope scale.
Obstacle inf_convolution(const Obstacle& psi, double k,
                         const SpaceTimeGrid& grid);

/// Per-box and per-sweep audit trail of the alternating construction.
/// Sup-increments are exact suprema of (g - f)_+ and therefore >= 0.
struct TraceBoxRecord {
  int sweep = 0;
  int level = 0;
  int ordinal = 0;
  SpaceTimeBox box;
  double increment = 0.0;
  long newton_iters = 0;
};

struct TraceSweepRecord {
  int sweep = 0;
  int depth = 0;  // enumeration depth of the swept list
  double max_increment = 0.0;
};

enum class StopReason {
  kConverged,
  kSweepBudget,
};

struct IterationTrace {
  std::vector<TraceBoxRecord> boxes;
  std::vector<TraceSweepRecord> sweeps;
  StopReason stop = StopReason::kConverged;
  int box_count_per_sweep = 0;
};

/// Sweep budget exhausted before the stop tolerance was reached.
class ConvergenceError : public std::runtime_error {
 public:
  ConvergenceError(const std::string& what, IterationTrace trace)
      : std::runtime_error(what), trace_(std::move(trace)) {}
  const IterationTrace& trace() const { return trace_; }

 private:
  IterationTrace trace_;
};

/// Obstacle-iteration knobs on top of the stepper config. Zero stop_tol
/// resolves to 1e-8 * (1 + sup psi). The enumeration depth is chosen
/// automatically (granularity exhaustion) unless `level` is set >= 0.
struct ObstacleConfig {
  SolverConfig solver;
  double stop_tol = 0.0;
  int max_sweeps = 500;
  int level = -1;
  BoxOrder order = BoxOrder::kLexicographic;
  int lsc_max_stages = 12;
  double contact_margin_factor = 10.0;  // margin = factor * stop_tol

  double resolved_stop_tol(double bound) const {
    return stop_tol > 0.0 ? stop_tol : 1e-8 * (1.0 + bound);
  }
};

struct ObstacleSolveResult {
  ScalarField u;
  IterationTrace trace;
  double stop_tol = 0.0;
  int sweeps = 0;
};

/// Replaces the box interior by the BVP solution with boundary values taken
/// from u itself; u is untouched outside. When u dominates that solution
/// (check_comparison passes) the modification never increases u.
ScalarField poisson_modify(const ScalarField& u, const SpaceTimeBox& box,
                           const SolverConfig& config);

struct ConstructStepResult {
  ScalarField f_next;
  double increment = 0.0;  // sup over the box of (g - f)_+
  long newton_iters = 0;
};

/// One alternating step: solve the box BVP with data f on the parabolic
/// boundary and take the pointwise maximum with f inside the box. Keeps
/// f_next >= f and f_next >= psi exactly. Requires f >= psi nodewise.
ConstructStepResult construct_step(const ScalarField& f,
                                   const SpaceTimeBox& box,
                                   const ScalarField& psi_samples,
                                   const SolverConfig& config);

/// Minimal-supersolution iteration for a continuous obstacle: start from the
/// sampled obstacle and sweep construct_step over the dyadic box enumeration
/// (all levels up to granularity exhaustion, coarse first) until a full sweep
/// moves nothing above the stop tolerance.
///
/// The optional callback observes the iterate after each sweep.
ObstacleSolveResult solve_obstacle_continuous(
    const Obstacle& psi, const SpaceTimeGrid& grid, const ObstacleConfig& cfg,
    const std::function<void(const ScalarField&, int)>& on_sweep = {});

struct LscStage {
  double k = 0.0;
  IterationTrace trace;
  double delta_from_prev = 0.0;  // sup gap to the previous stage's solution
  double min_gap_from_prev = 0.0;  // most negative nodewise u_k+1 - u_k
};

struct LscSolveResult {
  ScalarField u;
  std::vector<LscStage> stages;
  double stop_tol = 0.0;
};

/// Lower-semicontinuous obstacles: solve a nondecreasing sequence of
/// continuous inf-convolution approximations with k = 2^j (1+M)/min(h,tau)
/// and stop when successive solutions agree within the stop tolerance.
LscSolveResult solve_obstacle_lsc(const Obstacle& psi,
                                  const SpaceTimeGrid& grid,
                                  const ObstacleConfig& cfg);

struct CompetitorVerdict {
  std::string name;
  bool accepted = false;   // passed the supercaloricity/dominance prechecks
  std::string rejection;
  double min_margin = 0.0;  // min over nodes of (v - u)
  NodeIndex worst;
  bool pass = false;  // v >= u - tol nodewise
};

struct MinimalityReport {
  std::vector<CompetitorVerdict> competitors;
  bool all_pass = false;
  double tol = 0.0;
};

/// Checks that every admissible competitor (>= psi, comparison-passing on the
/// enumerated boxes) dominates u up to tol.
MinimalityReport verify_minimality(
    const ScalarField& u, const ScalarField& psi_samples,
    const std::vector<std::pair<std::string, ScalarField>>& competitors,
    const ObstacleConfig& cfg, int precheck_level = 2);

struct InactiveBumpRow {
  double residual = 0.0;
  double tol = 0.0;
  bool inside = false;  // support fully inside {u > psi + margin}
  bool pass = false;
  double center0 = 0.0;
  double t_center = 0.0;
};

struct InactiveSetReport {
  bool vacuous = false;
  bool pass = false;
  int bumps_inside = 0;
  int bumps_straddling = 0;
  double worst_inside_ratio = 0.0;  // max |residual|/tol over inside bumps
  std::vector<InactiveBumpRow> rows;
};

/// Certifies the solution property on the inactive set {u > psi + margin}:
/// bumps supported inside it must have |weak residual| <= tol; bumps
/// straddling the contact set must stay on the supersolution side.
InactiveSetReport inactive_set_residual(const ScalarField& u,
                                        const ScalarField& psi_samples,
                                        const ObstacleConfig& cfg,
                                        int battery_size = 3);

}  // namespace pmeobst
