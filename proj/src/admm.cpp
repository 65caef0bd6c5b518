#include "polyopt/admm.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <stdexcept>
#include <thread>

#include "polyopt/linalg.hpp"

namespace polyopt {

void SolverConfig::validate() const {
  if (!(mu > 0.0)) throw std::invalid_argument("solver: mu must be positive");
  if (!(tol_coord > 0.0) || !(tol_admm > 0.0))
    throw std::invalid_argument("solver: tolerances must be positive");
  if (max_inner < 1 || max_outer < 1)
    throw std::invalid_argument("solver: iteration limits must be positive");
  if (!(divergence_limit > 0.0))
    throw std::invalid_argument("solver: divergence limit must be positive");
}

BlockDiagState fresh_state(const AggregateOperator& op) {
  BlockDiagState state;
  state.y = Eigen::VectorXd::Zero(op.num_coords());
  state.y[0] = 1.0;
  for (const auto& block : op.blocks()) {
    state.X.push_back(Eigen::MatrixXd::Identity(block.dim, block.dim));
    state.Z.push_back(Eigen::MatrixXd::Zero(block.dim, block.dim));
  }
  return state;
}

namespace {

double entries_dot(const std::vector<SymEntry>& entries, const Eigen::MatrixXd& A) {
  double dot = 0.0;
  for (const auto& e : entries) {
    dot += (e.row == e.col ? 1.0 : 2.0) * e.value * A(e.row, e.col);
  }
  return dot;
}

void entries_add(const std::vector<SymEntry>& entries, double scale, Eigen::MatrixXd& A) {
  for (const auto& e : entries) {
    A(e.row, e.col) += scale * e.value;
    if (e.row != e.col) A(e.col, e.row) += scale * e.value;
  }
}

std::vector<Eigen::MatrixXd> build_residuals(const AggregateOperator& op,
                                             const BlockDiagState& state) {
  std::vector<Eigen::MatrixXd> R;
  R.reserve(op.blocks().size());
  for (size_t b = 0; b < op.blocks().size(); ++b) {
    R.push_back(op.blocks()[b].value(state.y) - state.X[b]);
  }
  return R;
}

// cost + <Z, M_i> per coordinate; Z is constant during a y minimization.
Eigen::VectorXd cost_plus_zdot(const AggregateOperator& op, const BlockDiagState& state) {
  Eigen::VectorXd zc = op.cost();
  for (size_t b = 0; b < op.blocks().size(); ++b) {
    for (const auto& [coord, entries] : op.blocks()[b].coeffs) {
      zc[coord] += entries_dot(entries, state.Z[b]);
    }
  }
  return zc;
}

// One coordinate pass; returns the sup-norm change. R is kept equal to
// B(y) - X throughout.
double pass_over_coords(const AggregateOperator& op, BlockDiagState& state,
                        std::vector<Eigen::MatrixXd>& R, const Eigen::VectorXd& zc,
                        double mu, CoordMode mode) {
  const int N = op.num_coords();
  double max_delta = 0.0;

  if (mode == CoordMode::kGaussSeidel) {
    for (int i = 1; i < N; ++i) {
      const double n2 = op.coeff_norm2(i);
      if (n2 == 0.0) continue;
      double rdot = 0.0;
      for (const auto& occ : op.occurrences(i)) {
        rdot += entries_dot(op.blocks()[occ.block].coeffs[occ.entry].second, R[occ.block]);
      }
      const double delta = -(mu * zc[i] + rdot) / n2;
      if (delta != 0.0) {
        state.y[i] += delta;
        for (const auto& occ : op.occurrences(i)) {
          entries_add(op.blocks()[occ.block].coeffs[occ.entry].second, delta, R[occ.block]);
        }
      }
      max_delta = std::max(max_delta, std::abs(delta));
    }
    return max_delta;
  }

  // Jacobi: all updates from the pass-start residuals, then applied at once.
  Eigen::VectorXd delta = Eigen::VectorXd::Zero(N);
  for (int i = 1; i < N; ++i) {
    const double n2 = op.coeff_norm2(i);
    if (n2 == 0.0) continue;
    double rdot = 0.0;
    for (const auto& occ : op.occurrences(i)) {
      rdot += entries_dot(op.blocks()[occ.block].coeffs[occ.entry].second, R[occ.block]);
    }
    delta[i] = -(mu * zc[i] + rdot) / n2;
  }
  for (int i = 1; i < N; ++i) {
    if (delta[i] == 0.0) continue;
    state.y[i] += delta[i];
    for (const auto& occ : op.occurrences(i)) {
      entries_add(op.blocks()[occ.block].coeffs[occ.entry].second, delta[i], R[occ.block]);
    }
    max_delta = std::max(max_delta, std::abs(delta[i]));
  }
  return max_delta;
}

int run_sweeps(const AggregateOperator& op, BlockDiagState& state,
               std::vector<Eigen::MatrixXd>& R, const SolverConfig& cfg) {
  const Eigen::VectorXd zc = cost_plus_zdot(op, state);
  int passes = 0;
  while (passes < cfg.max_inner) {
    const double max_delta = pass_over_coords(op, state, R, zc, cfg.mu, cfg.coord_mode);
    ++passes;
    if (max_delta < cfg.tol_coord) break;
  }
  return passes;
}

void check_shapes(const AggregateOperator& op, const BlockDiagState& state) {
  if (state.y.size() != op.num_coords())
    throw std::invalid_argument("warm state: y length mismatch");
  if (state.y[0] != 1.0) throw std::invalid_argument("warm state: y[0] must be 1");
  if (state.X.size() != op.blocks().size() || state.Z.size() != op.blocks().size())
    throw std::invalid_argument("warm state: block count mismatch");
  for (size_t b = 0; b < op.blocks().size(); ++b) {
    const int dim = op.blocks()[b].dim;
    if (state.X[b].rows() != dim || state.X[b].cols() != dim ||
        state.Z[b].rows() != dim || state.Z[b].cols() != dim)
      throw std::invalid_argument("warm state: block dimension mismatch");
  }
}

void for_each_block(size_t count, bool parallel, const std::function<void(size_t)>& body) {
  if (!parallel || count < 2) {
    for (size_t b = 0; b < count; ++b) body(b);
    return;
  }
  const size_t workers = std::min<size_t>(count, std::thread::hardware_concurrency());
  std::vector<std::thread> threads;
  threads.reserve(workers);
  for (size_t t = 0; t < workers; ++t) {
    threads.emplace_back([&, t]() {
      for (size_t b = t; b < count; b += workers) body(b);
    });
  }
  for (auto& th : threads) th.join();
}

}  // namespace

std::pair<double, double> coord_coefficients(const AggregateOperator& op,
                                             const BlockDiagState& state, int coord,
                                             double mu) {
  if (coord < 1 || coord >= op.num_coords())
    throw std::invalid_argument("coord_coefficients: coordinate 0 is pinned");
  if (!(mu > 0.0)) throw std::invalid_argument("coord_coefficients: mu must be positive");

  const double n2 = op.coeff_norm2(coord);
  if (n2 == 0.0) return {0.0, 0.0};

  const double a1 = n2 / (2.0 * mu);
  double a2 = op.cost()[coord];
  for (const auto& occ : op.occurrences(coord)) {
    const auto& entries = op.blocks()[occ.block].coeffs[occ.entry].second;
    double block_n2 = 0.0;
    for (const auto& e : entries) {
      block_n2 += (e.row == e.col ? 1.0 : 2.0) * e.value * e.value;
    }
    const Eigen::MatrixXd residual =
        op.blocks()[occ.block].value(state.y) - state.X[occ.block];
    a2 += entries_dot(entries, state.Z[occ.block]);
    // <R, M_i> counts the current y_i; removing it leaves the cross terms
    a2 += (entries_dot(entries, residual) - state.y[coord] * block_n2) / mu;
  }
  return {a1, a2};
}

double coord_update(double a1, double a2) {
  if (!(a1 > 0.0)) throw std::invalid_argument("coord_update: a1 must be positive");
  return -a2 / (2.0 * a1);
}

int sweep_y(const AggregateOperator& op, BlockDiagState& state, const SolverConfig& cfg) {
  cfg.validate();
  check_shapes(op, state);
  auto R = build_residuals(op, state);
  return run_sweeps(op, state, R, cfg);
}

Eigen::MatrixXd psd_project(const Eigen::Ref<const Eigen::MatrixXd>& V) {
  const EigDecomp eig = sym_eig(V);
  Eigen::MatrixXd X = eig.vectors * eig.values.cwiseMax(0.0).asDiagonal() *
                      eig.vectors.transpose();
  return 0.5 * (X + X.transpose());
}

int admm_step(const AggregateOperator& op, BlockDiagState& state, const SolverConfig& cfg) {
  cfg.validate();
  check_shapes(op, state);
  auto R = build_residuals(op, state);
  const int passes = run_sweeps(op, state, R, cfg);

  for_each_block(op.blocks().size(), cfg.parallel, [&](size_t b) {
    // R_b already holds B_b(y) - X_b for the swept y
    const Eigen::MatrixXd V = R[b] + state.X[b] + cfg.mu * state.Z[b];
    state.X[b] = psd_project(V);
    const Eigen::MatrixXd slack = V - state.X[b];
    state.Z[b] = cfg.z_update == ZUpdateMode::kScaled ? (slack / cfg.mu).eval() : slack;
  });
  state.k += 1;
  return passes;
}

SolveOutcome solve_relaxation(const AggregateOperator& op,
                              std::optional<BlockDiagState> warm, const SolverConfig& cfg,
                              const IterationObserver& observer) {
  cfg.validate();
  const auto t0 = std::chrono::steady_clock::now();

  SolveOutcome out;
  out.state = warm ? std::move(*warm) : fresh_state(op);
  check_shapes(op, out.state);
  BlockDiagState& state = out.state;
  SolveStats& stats = out.stats;

  Eigen::VectorXd y_prev(state.y.size());
  std::vector<Eigen::MatrixXd> x_prev;
  std::vector<Eigen::MatrixXd> z_prev;

  for (int iter = 0; iter < cfg.max_outer; ++iter) {
    y_prev = state.y;
    x_prev = state.X;
    z_prev = state.Z;

    const int passes = admm_step(op, state, cfg);
    stats.inner_passes_total += passes;
    stats.iterations += 1;

    // All three iterates must settle. Checking y and X alone can stop on a
    // transient plateau where the projection reproduces X while Z is still
    // in transit toward the dual optimum.
    double dx = 0.0;
    double dz = 0.0;
    for (size_t b = 0; b < state.X.size(); ++b) {
      dx = std::max(dx, (state.X[b] - x_prev[b]).norm());
      dz = std::max(dz, (state.Z[b] - z_prev[b]).norm());
    }
    const double dy = (state.y - y_prev).lpNorm<Eigen::Infinity>();

    const double obj = op.objective(state.y);
    const double dual = op.dual_objective(state.Z);
    const double residual = primal_residual(op, state);
    stats.objective_history.push_back(obj);
    stats.dual_history.push_back(dual);
    stats.residual_history.push_back(residual);

    if (observer) {
      IterationRecord rec;
      rec.iteration = stats.iterations;
      rec.objective = obj;
      rec.dual_objective = dual;
      rec.primal_residual = residual;
      rec.inner_passes = passes;
      observer(rec, state);
    }

    const double y_norm = state.y.lpNorm<Eigen::Infinity>();
    if (!std::isfinite(obj) || !std::isfinite(residual) ||
        residual > cfg.divergence_limit || std::abs(obj) > cfg.divergence_limit ||
        y_norm > cfg.divergence_limit) {
      stats.diverged = true;
      break;
    }
    if (std::max({dy, dx, dz}) < cfg.tol_admm) {
      stats.converged = true;
      break;
    }
  }

  stats.duality_gap =
      std::abs(op.objective(state.y) - op.dual_objective(state.Z));
  stats.wall_time_s =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return out;
}

double primal_residual(const AggregateOperator& op, const BlockDiagState& state) {
  double total = 0.0;
  for (size_t b = 0; b < op.blocks().size(); ++b) {
    total += (op.blocks()[b].value(state.y) - state.X[b]).squaredNorm();
  }
  return std::sqrt(total);
}

double augmented_lagrangian(const AggregateOperator& op, const BlockDiagState& state,
                            double mu) {
  double L = op.objective(state.y);
  for (size_t b = 0; b < op.blocks().size(); ++b) {
    const Eigen::MatrixXd R = op.blocks()[b].value(state.y) - state.X[b];
    L += frob_inner(state.Z[b], R) + R.squaredNorm() / (2.0 * mu);
  }
  return L;
}

BlockDiagState lift_state(const BlockDiagState& state,
                          const std::vector<BlockSpec>& old_active,
                          const std::vector<BlockSpec>& new_active, int new_num_coords) {
  if (old_active.size() != new_active.size())
    throw std::invalid_argument("lift: active block lists differ in length");
  if (new_num_coords < state.y.size())
    throw std::invalid_argument("lift: coordinate count may not shrink");

  BlockDiagState lifted;
  lifted.k = state.k;
  lifted.y = Eigen::VectorXd::Zero(new_num_coords);
  lifted.y.head(state.y.size()) = state.y;

  for (size_t b = 0; b < old_active.size(); ++b) {
    if (old_active[b].id != new_active[b].id)
      throw std::invalid_argument("lift: active block order changed");
    const int g_old = old_active[b].block.dim;
    const int g_new = new_active[b].block.dim;
    if (g_new < g_old) throw std::invalid_argument("lift: block may not shrink");
    Eigen::MatrixXd X = Eigen::MatrixXd::Identity(g_new, g_new);
    X.topLeftCorner(g_old, g_old) = state.X[b];
    Eigen::MatrixXd Z = Eigen::MatrixXd::Zero(g_new, g_new);
    Z.topLeftCorner(g_old, g_old) = state.Z[b];
    lifted.X.push_back(std::move(X));
    lifted.Z.push_back(std::move(Z));
  }
  return lifted;
}

}  // namespace polyopt
