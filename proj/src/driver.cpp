#include "polyopt/driver.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <stdexcept>

#include "json.hpp"
#include "polyopt/linalg.hpp"

namespace polyopt {

void DriverConfig::validate() const {
  if (!(eps_feas > 0.0) || !(eps_obj > 0.0) || !(rank_tau > 0.0))
    throw std::invalid_argument("driver: tolerances must be positive");
  solver.validate();
}

namespace {

int count_monomials(int n, int degree) {
  // |{a : |a| <= degree}| = C(n + degree, degree)
  long long c = 1;
  for (int i = 1; i <= degree; ++i) c = c * (n + i) / i;
  return static_cast<int>(c);
}

std::optional<Candidate> extract_from_moment(const PopInstance& inst,
                                             const Eigen::MatrixXd& moment_block,
                                             double eps_feas) {
  auto cand = extract_candidate(second_order_submatrix(moment_block, inst.n));
  if (cand) score_candidate(inst, *cand, eps_feas);
  return cand;
}

using Clock = std::chrono::steady_clock;

double seconds_since(const Clock::time_point& t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

// Per-iteration trace plumbing shared by solve and run_full_level.
IterationObserver make_observer(TraceSink trace, const PopInstance& inst, int w, int q,
                                int iter_base, Clock::time_point t0) {
  if (!trace) return {};
  const PopInstance* instance = &inst;
  return [trace = std::move(trace), instance, w, q, iter_base, t0](
             const IterationRecord& rec, const BlockDiagState& state) {
    TraceRow row;
    row.iter = iter_base + rec.iteration;
    row.w = w;
    row.q = q;
    row.objective = rec.objective;
    row.dual_objective = rec.dual_objective;
    row.primal_residual = rec.primal_residual;
    const auto cand = extract_from_moment(*instance, state.X.front(), 0.0);
    row.max_violation = cand ? cand->max_violation : std::nan("");
    row.elapsed_s = seconds_since(t0);
    trace(row);
  };
}

void finalize_report(SolveReport& report, const PopInstance& inst,
                     const AggregateOperator& op, const BlockDiagState& state,
                     const DriverConfig& cfg, const std::string& status, int iterations,
                     const Clock::time_point& t0) {
  report.status = status;
  report.lower_bound = op.objective(state.y);
  report.dual_objective = op.dual_objective(state.Z);
  report.gap = std::abs(report.lower_bound - report.dual_objective);
  report.candidate = extract_from_moment(inst, state.X.front(), cfg.eps_feas);
  report.gap_test_passed =
      report.candidate &&
      std::abs(report.lower_bound - report.candidate->z_pop) <= cfg.eps_obj;
  report.iterations_total = iterations;
  report.primal_residual = primal_residual(op, state);
  report.time_seconds = seconds_since(t0);
}

}  // namespace

bool flat_extension(const Eigen::Ref<const Eigen::MatrixXd>& moment_block, int n, int D,
                    int d, int w, double tau) {
  if (w < 1 || d < 1) throw std::invalid_argument("flat_extension: orders must be >= 1");
  if (moment_block.rows() != count_monomials(n, w))
    throw std::invalid_argument("flat_extension: block size does not match order w");

  const int rank_w = numerical_rank(moment_block, tau);
  auto sub_rank = [&](int order) {
    const int size = count_monomials(n, order);
    return numerical_rank(moment_block.topLeftCorner(size, size), tau);
  };
  if (D <= w && rank_w == sub_rank(w - 1)) return true;
  if (d <= w && rank_w == sub_rank(w - d)) return true;
  return false;
}

bool approximate_obj(const PopInstance& inst, const Eigen::Ref<const Eigen::VectorXd>& cost,
                     const Eigen::Ref<const Eigen::VectorXd>& y,
                     const Eigen::Ref<const Eigen::MatrixXd>& moment_block, double eps) {
  const auto cand = extract_candidate(second_order_submatrix(moment_block, inst.n));
  if (!cand) return false;
  const double z_sdp = cost.dot(y);
  const double z_pop = evaluate(inst.objective, cand->x);
  return std::abs(z_sdp - z_pop) <= eps;
}

AddBlocksResult add_blocks(const PopInstance& inst, BlockRegistry& registry,
                           BlockDiagState& state, double eps_feas) {
  if (registry.active.empty() || registry.active.front().kind != BlockKind::kMoment)
    throw std::invalid_argument("add_blocks: the moment block must be active first");

  auto push_fresh = [&](int id) {
    const BlockSpec* spec = registry.find_active(id);
    state.X.push_back(Eigen::MatrixXd::Identity(spec->block.dim, spec->block.dim));
    state.Z.push_back(Eigen::MatrixXd::Zero(spec->block.dim, spec->block.dim));
  };

  AddBlocksResult result;
  result.candidate = extract_from_moment(inst, state.X.front(), eps_feas);

  if (!result.candidate) {
    // nothing to localize the failure: every constraint is suspect
    result.degenerate = true;
    std::vector<int> ids;
    for (const auto& spec : registry.pending) ids.push_back(spec.id);
    for (int id : ids) {
      registry.activate(id);
      push_fresh(id);
      ++result.added;
    }
    return result;
  }

  std::vector<bool> suspect_var(static_cast<size_t>(inst.n), false);
  ViolationReport report = violated_constraints(inst, result.candidate->x, eps_feas);
  for (int k : report.violated) {
    for (int v : registry.constraint_vars[static_cast<size_t>(k)])
      suspect_var[static_cast<size_t>(v)] = true;
  }

  std::vector<int> ids;
  for (const auto& spec : registry.pending) {
    const auto& vars = registry.constraint_vars[static_cast<size_t>(spec.constraint)];
    if (std::any_of(vars.begin(), vars.end(),
                    [&](int v) { return suspect_var[static_cast<size_t>(v)]; })) {
      ids.push_back(spec.id);
    }
  }
  for (int id : ids) {
    registry.activate(id);
    push_fresh(id);
    ++result.added;
  }
  return result;
}

SolveReport solve(const PopInstance& inst, const DriverConfig& cfg, const TraceSink& trace) {
  cfg.validate();
  const auto t0 = Clock::now();
  const auto [D, d] = hierarchy_degrees(inst);
  const int w_cap = std::max(cfg.w_max, d);

  MomentIndex idx = MomentIndex::up_to_degree(inst.n, 2 * d);
  BlockRegistry reg = enumerate_blocks(inst, d, idx, cfg.probe_seed);
  reg.activate(0);
  if (cfg.strategy == Strategy::kFullLevel) {
    reg.activate_all_pending();
  }
  AggregateOperator op = assemble(inst, reg, idx);
  BlockDiagState state = fresh_state(op);

  SolveReport report;
  int iterations_total = 0;
  int w = d;
  bool last_solve_converged = true;
  std::string status;

  while (true) {
    LevelRecord lev;
    lev.w = w;
    lev.blocks_total = static_cast<int>(reg.active.size() + reg.pending.size());

    bool early_return = false;
    bool last_diverged = false;
    int last_added = 0;
    int q = 0;

    while (true) {
      const auto obs = make_observer(trace, inst, w, q, iterations_total, t0);
      // a non-converged iterate is poison as a warm start; restart instead
      std::optional<BlockDiagState> warm;
      if (last_solve_converged) {
        warm = std::move(state);
      }
      SolveOutcome outcome = solve_relaxation(op, std::move(warm), cfg.solver, obs);
      state = std::move(outcome.state);
      iterations_total += outcome.stats.iterations;
      last_diverged = outcome.stats.diverged;
      last_solve_converged = outcome.stats.converged;
      lev.admm_iterations.push_back(outcome.stats.iterations);
      lev.bound = op.objective(state.y);

      const AddBlocksResult added = add_blocks(inst, reg, state, cfg.eps_feas);
      last_added = added.added;
      if (added.added > 0) op = assemble(inst, reg, idx);
      ++q;
      lev.s_history.push_back(added.added);

      if (added.added == 0) {
        if (!reg.pending.empty() &&
            approximate_obj(inst, op.cost(), state.y, state.X.front(), cfg.eps_obj)) {
          status = "gap-converged";
          early_return = true;
        }
        break;
      }
    }

    lev.q_iterations = q;
    lev.blocks_active = static_cast<int>(reg.active.size());
    report.levels.push_back(lev);

    if (early_return) break;
    if (last_diverged && last_added == 0) {
      status = "diverged";
      break;
    }
    if (last_solve_converged &&
        flat_extension(state.X.front(), inst.n, D, d, w, cfg.rank_tau)) {
      status = "flat-extension";
      break;
    }
    if (w + 1 > w_cap) {
      status = "level-cap";
      break;
    }

    // level bump: re-realize every block at w+1 and embed the warm state
    const int w_next = w + 1;
    MomentIndex idx_next = MomentIndex::up_to_degree(inst.n, 2 * w_next);
    BlockRegistry reg_next = enumerate_blocks(inst, w_next, idx_next, cfg.probe_seed);

    BlockRegistry aligned;
    aligned.constraint_vars = std::move(reg_next.constraint_vars);
    for (const auto& spec : reg.active) {
      bool moved = false;
      for (auto it = reg_next.pending.begin(); it != reg_next.pending.end(); ++it) {
        if (it->id == spec.id) {
          aligned.active.push_back(std::move(*it));
          reg_next.pending.erase(it);
          moved = true;
          break;
        }
      }
      if (!moved) throw std::logic_error("level bump lost an active block");
    }
    aligned.pending = std::move(reg_next.pending);

    state = lift_state(state, reg.active, aligned.active, idx_next.size());
    reg = std::move(aligned);
    idx = std::move(idx_next);
    w = w_next;
    if (cfg.strategy == Strategy::kFullLevel && !reg.pending.empty()) {
      for (const auto& spec : reg.pending) {
        state.X.push_back(Eigen::MatrixXd::Identity(spec.block.dim, spec.block.dim));
        state.Z.push_back(Eigen::MatrixXd::Zero(spec.block.dim, spec.block.dim));
      }
      reg.activate_all_pending();
    }
    op = assemble(inst, reg, idx);
  }

  finalize_report(report, inst, op, state, cfg, status, iterations_total, t0);
  return report;
}

SolveReport run_full_level(const PopInstance& inst, int w, const DriverConfig& cfg,
                           const TraceSink& trace) {
  cfg.validate();
  const auto t0 = Clock::now();
  const auto [D, d] = hierarchy_degrees(inst);
  (void)D;
  if (w < d) throw std::invalid_argument("run_full_level: level below the minimal order");

  const MomentIndex idx = MomentIndex::up_to_degree(inst.n, 2 * w);
  BlockRegistry reg = enumerate_blocks(inst, w, idx, cfg.probe_seed);
  reg.activate(0);
  reg.activate_all_pending();
  const AggregateOperator op = assemble(inst, reg, idx);

  const auto obs = make_observer(trace, inst, w, 0, 0, t0);
  SolveOutcome outcome = solve_relaxation(op, std::nullopt, cfg.solver, obs);

  SolveReport report;
  LevelRecord lev;
  lev.w = w;
  lev.q_iterations = 0;
  lev.blocks_active = static_cast<int>(reg.active.size());
  lev.blocks_total = lev.blocks_active;
  lev.admm_iterations.push_back(outcome.stats.iterations);
  lev.bound = op.objective(outcome.state.y);
  report.levels.push_back(lev);

  const std::string status = outcome.stats.converged
                                 ? "converged"
                                 : (outcome.stats.diverged ? "diverged" : "max-iterations");
  finalize_report(report, inst, op, outcome.state, cfg, status, outcome.stats.iterations, t0);
  return report;
}

namespace {

nlohmann::ordered_json to_json_or_null(double v) {
  if (!std::isfinite(v)) return nullptr;
  return v;
}

}  // namespace

std::string report_to_json(const SolveReport& report, int indent) {
  nlohmann::ordered_json doc;
  doc["status"] = report.status;
  doc["lower_bound"] = to_json_or_null(report.lower_bound);
  doc["dual_objective"] = to_json_or_null(report.dual_objective);
  doc["gap"] = to_json_or_null(report.gap);
  if (report.candidate) {
    const auto& cand = *report.candidate;
    doc["x"] = std::vector<double>(cand.x.begin(), cand.x.end());
    doc["z_pop"] = to_json_or_null(cand.z_pop);
    doc["rank1_gap"] = to_json_or_null(cand.rank1_gap);
    doc["max_violation"] = to_json_or_null(cand.max_violation);
    doc["violations"] = cand.violations;
  } else {
    doc["x"] = nlohmann::ordered_json::array();
    doc["z_pop"] = nullptr;
    doc["rank1_gap"] = nullptr;
    doc["max_violation"] = nullptr;
    doc["violations"] = nlohmann::ordered_json::array();
  }
  doc["gap_test_passed"] = report.gap_test_passed;
  doc["levels"] = nlohmann::ordered_json::array();
  for (const auto& lev : report.levels) {
    nlohmann::ordered_json entry;
    entry["w"] = lev.w;
    entry["q_iterations"] = lev.q_iterations;
    entry["blocks_active"] = lev.blocks_active;
    entry["blocks_total"] = lev.blocks_total;
    entry["s_history"] = lev.s_history;
    entry["admm_iterations"] = lev.admm_iterations;
    entry["bound"] = to_json_or_null(lev.bound);
    doc["levels"].push_back(std::move(entry));
  }
  doc["iterations_total"] = report.iterations_total;
  doc["primal_residual"] = to_json_or_null(report.primal_residual);
  doc["time_seconds"] = report.time_seconds;
  return doc.dump(indent);
}

std::string trace_csv_header() {
  return "iter,level,q,objective,dual_objective,primal_residual,max_violation,elapsed_s";
}

std::string trace_csv_row(const TraceRow& row) {
  char buf[256];
  std::snprintf(buf, sizeof(buf), "%d,%d,%d,%.12g,%.12g,%.12g,%.12g,%.3f", row.iter, row.w,
                row.q, row.objective, row.dual_objective, row.primal_residual,
                row.max_violation, row.elapsed_s);
  return buf;
}

}  // namespace polyopt
