#pragma once

#include <Eigen/Dense>

#include <functional>
#include <optional>
#include <utility>
#include <vector>

#include "polyopt/moment.hpp"

namespace polyopt {

enum class CoordMode { kGaussSeidel, kJacobi };
enum class ZUpdateMode { kScaled, kUnscaled };

struct SolverConfig {
  double mu = 1.0;
  double tol_coord = 1e-3;
  double tol_admm = 1e-3;
  int max_inner = 100;
  int max_outer = 5000;
  CoordMode coord_mode = CoordMode::kGaussSeidel;
  ZUpdateMode z_update = ZUpdateMode::kScaled;
  bool parallel = false;
  double divergence_limit = 1e8;

  void validate() const;  // throws std::invalid_argument
};

// Primal/dual iterate over the active block list. y_0 stays exactly 1; X and
// Z are aligned positionally with the aggregate's blocks; k counts outer
// iterations cumulatively across warm starts.
struct BlockDiagState {
  Eigen::VectorXd y;
  std::vector<Eigen::MatrixXd> X;
  std::vector<Eigen::MatrixXd> Z;
  int k = 0;
};

BlockDiagState fresh_state(const AggregateOperator& op);

struct IterationRecord {
  int iteration = 0;  // 1-based within the current solve
  double objective = 0.0;
  double dual_objective = 0.0;
  double primal_residual = 0.0;
  int inner_passes = 0;
};

using IterationObserver = std::function<void(const IterationRecord&, const BlockDiagState&)>;

struct SolveStats {
  int iterations = 0;
  int inner_passes_total = 0;
  bool converged = false;
  bool diverged = false;
  std::vector<double> objective_history;
  std::vector<double> dual_history;
  std::vector<double> residual_history;
  double duality_gap = 0.0;
  double wall_time_s = 0.0;
};

struct SolveOutcome {
  BlockDiagState state;
  SolveStats stats;
};

// Coefficients (a1, a2) of the exact quadratic a1 t^2 + a2 t + const obtained
// by restricting the augmented Lagrangian to coordinate `coord`. a1 = 0
// signals a frozen coordinate (absent from every block).
std::pair<double, double> coord_coefficients(const AggregateOperator& op,
                                             const BlockDiagState& state, int coord,
                                             double mu);

// Closed-form minimizer -a2 / (2 a1); requires a1 > 0.
double coord_update(double a1, double a2);

// Block-coordinate passes over the free coordinates until the sup-norm change
// of a full pass drops below tol_coord (or max_inner passes). Returns the
// number of passes taken.
int sweep_y(const AggregateOperator& op, BlockDiagState& state, const SolverConfig& cfg);

// Spectral projection onto the PSD cone (non-negative eigenpairs kept).
Eigen::MatrixXd psd_project(const Eigen::Ref<const Eigen::MatrixXd>& V);

// One outer iteration: y sweep, per-block PSD projection of V = B(y) + mu Z,
// multiplier update. Returns the inner pass count.
int admm_step(const AggregateOperator& op, BlockDiagState& state, const SolverConfig& cfg);

// Runs admm_step until max(||dy||_inf, max_b ||dX_b||_F) < tol_admm, or the
// iteration/divergence limits hit. A warm state is used verbatim after a
// shape check.
SolveOutcome solve_relaxation(const AggregateOperator& op,
                              std::optional<BlockDiagState> warm, const SolverConfig& cfg,
                              const IterationObserver& observer = {});

double primal_residual(const AggregateOperator& op, const BlockDiagState& state);
double augmented_lagrangian(const AggregateOperator& op, const BlockDiagState& state,
                            double mu);

// Warm-start embedding for a level bump: y is prefix-embedded (new
// coordinates 0), each block's X/Z becomes the leading principal submatrix of
// its larger counterpart with fresh diagonal entries of X set to 1 and fresh
// Z entries 0. Old and new active lists must match id-for-id in order.
BlockDiagState lift_state(const BlockDiagState& state,
                          const std::vector<BlockSpec>& old_active,
                          const std::vector<BlockSpec>& new_active, int new_num_coords);

}  // namespace polyopt
