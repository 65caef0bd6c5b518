#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "polyopt/admm.hpp"
#include "polyopt/extraction.hpp"
#include "polyopt/moment.hpp"
#include "polyopt/polynomial.hpp"

namespace polyopt {

enum class Strategy { kFineGrained, kFullLevel };

struct DriverConfig {
  double eps_feas = 1e-5;  // constraint violation threshold for block addition
  double eps_obj = 1e-5;   // |c'y - f0(x)| early-exit threshold
  double rank_tau = 1e-6;  // numerical-rank tolerance for the flatness test
  int w_max = 6;           // level cap, clamped up to the initial level
  Strategy strategy = Strategy::kFineGrained;
  SolverConfig solver;
  std::optional<std::uint64_t> probe_seed;  // runs the block-map cross-check

  void validate() const;
};

struct LevelRecord {
  int w = 0;
  int q_iterations = 0;  // block-addition rounds at this level
  int blocks_active = 0;
  int blocks_total = 0;
  std::vector<int> s_history;        // blocks added per round
  std::vector<int> admm_iterations;  // outer iterations per round
  double bound = 0.0;                // c'y after the last round
};

// status: "flat-extension" | "gap-converged" | "level-cap" | "diverged"
// (driver), plus "converged" | "max-iterations" for single-level runs.
struct SolveReport {
  std::string status;
  double lower_bound = 0.0;
  double dual_objective = 0.0;
  double gap = 0.0;  // |lower_bound - dual_objective|
  std::optional<Candidate> candidate;
  bool gap_test_passed = false;  // |c'y - f0(x)| <= eps_obj at exit
  std::vector<LevelRecord> levels;
  int iterations_total = 0;
  double primal_residual = 0.0;
  double time_seconds = 0.0;

  bool succeeded() const {
    return status == "flat-extension" || status == "gap-converged" ||
           status == "converged";
  }
};

// One row per outer ADMM iteration across all sub-solves.
struct TraceRow {
  int iter = 0;  // global, 1-based
  int w = 0;
  int q = 0;
  double objective = 0.0;
  double dual_objective = 0.0;
  double primal_residual = 0.0;
  double max_violation = 0.0;  // NaN while extraction is degenerate
  double elapsed_s = 0.0;
};
using TraceSink = std::function<void(const TraceRow&)>;

// Rank-stabilization certificate on a converged moment block of order w:
// true iff (D <= w and rank M_w = rank M_{w-1}) or
//          (d <= w and rank M_w = rank M_{w-d}),
// ranks taken with tolerance tau on leading principal submatrices.
bool flat_extension(const Eigen::Ref<const Eigen::MatrixXd>& moment_block, int n, int D,
                    int d, int w, double tau);

// True when the extracted candidate reproduces the relaxation bound:
// |c'y - f0(x)| <= eps. Degenerate extraction counts as false.
bool approximate_obj(const PopInstance& inst, const Eigen::Ref<const Eigen::VectorXd>& cost,
                     const Eigen::Ref<const Eigen::VectorXd>& y,
                     const Eigen::Ref<const Eigen::MatrixXd>& moment_block, double eps);

struct AddBlocksResult {
  int added = 0;
  bool degenerate = false;  // extraction failed; every pending block was added
  std::optional<Candidate> candidate;
};

// Extracts a candidate from the moment block, collects the constraints it
// violates beyond eps_feas, and activates every pending block whose
// constraint shares a variable with a violated one. New blocks enter the
// state with X = I, Z = 0.
AddBlocksResult add_blocks(const PopInstance& inst, BlockRegistry& registry,
                           BlockDiagState& state, double eps_feas);

SolveReport solve(const PopInstance& inst, const DriverConfig& cfg,
                  const TraceSink& trace = {});

// Single relaxation with every level-w block active, cold-started.
SolveReport run_full_level(const PopInstance& inst, int w, const DriverConfig& cfg,
                           const TraceSink& trace = {});

std::string report_to_json(const SolveReport& report, int indent = 2);
std::string trace_csv_header();
std::string trace_csv_row(const TraceRow& row);

}  // namespace polyopt
