#pragma once

// Shared fixtures and independent reference implementations for the test
// suites. Everything here recomputes quantities from first principles (dense
// matrices, brute-force sums) so library results are checked against a
// second, structurally different code path.

#include <Eigen/Dense>

#include <random>
#include <utility>
#include <vector>

#include "polyopt/admm.hpp"
#include "polyopt/moment.hpp"
#include "polyopt/polynomial.hpp"

namespace testsupport {

using polyopt::AggregateOperator;
using polyopt::BlockDiagState;
using polyopt::Monomial;
using polyopt::Polynomial;
using polyopt::PopInstance;
using polyopt::SdpBlock;

// Dense coefficient matrix M_i of one block, rebuilt by mirroring the stored
// upper-triangle entries.
inline Eigen::MatrixXd dense_coeff(const SdpBlock& block, int coord) {
  Eigen::MatrixXd M = Eigen::MatrixXd::Zero(block.dim, block.dim);
  for (const auto& [c, entries] : block.coeffs) {
    if (c != coord) continue;
    for (const auto& e : entries) {
      M(e.row, e.col) += e.value;
      if (e.row != e.col) M(e.col, e.row) += e.value;
    }
  }
  return M;
}

// Block value sum_{i>=1} y_i M_i - M0 assembled from dense coefficient
// matrices (independent of SdpBlock::value).
inline Eigen::MatrixXd dense_block_value(const SdpBlock& block,
                                         const Eigen::VectorXd& y) {
  Eigen::MatrixXd B = -block.m0;
  for (const auto& [coord, entries] : block.coeffs) {
    for (const auto& e : entries) {
      const double v = y(coord) * e.value;
      B(e.row, e.col) += v;
      if (e.row != e.col) B(e.col, e.row) += v;
    }
  }
  return B;
}

// Whole-matrix augmented Lagrangian: assembles the block-diagonal direct sums
// and evaluates c'y + <Z, M(y)-X> + 1/(2 mu) ||M(y)-X||_F^2 in one piece.
inline double dense_lagrangian(const AggregateOperator& op, const BlockDiagState& state,
                               double mu) {
  int total = 0;
  for (const auto& b : op.blocks()) total += b.dim;
  Eigen::MatrixXd My = Eigen::MatrixXd::Zero(total, total);
  Eigen::MatrixXd X = Eigen::MatrixXd::Zero(total, total);
  Eigen::MatrixXd Z = Eigen::MatrixXd::Zero(total, total);
  int off = 0;
  for (size_t b = 0; b < op.blocks().size(); ++b) {
    const int dim = op.blocks()[b].dim;
    My.block(off, off, dim, dim) = dense_block_value(op.blocks()[b], state.y);
    X.block(off, off, dim, dim) = state.X[b];
    Z.block(off, off, dim, dim) = state.Z[b];
    off += dim;
  }
  const Eigen::MatrixXd R = My - X;
  return op.cost().dot(state.y) + (Z.array() * R.array()).sum() +
         R.squaredNorm() / (2.0 * mu);
}

// Exact quadratic through three samples of f; returns (a, b) of a t^2 + b t + c.
template <typename F>
std::pair<double, double> quadratic_fit(F&& f, double t0, double h) {
  const double f0 = f(t0 - h), f1 = f(t0), f2 = f(t0 + h);
  const double a = (f0 - 2.0 * f1 + f2) / (2.0 * h * h);
  const double b = (f2 - f0) / (2.0 * h) - 2.0 * a * t0;
  return {a, b};
}

inline Eigen::MatrixXd random_sym(std::mt19937_64& rng, int dim, double scale = 1.0) {
  std::uniform_real_distribution<double> u(-scale, scale);
  Eigen::MatrixXd A(dim, dim);
  for (int i = 0; i < dim; ++i)
    for (int j = i; j < dim; ++j) A(i, j) = A(j, i) = u(rng);
  return A;
}

inline Eigen::MatrixXd random_psd(std::mt19937_64& rng, int dim, double scale = 1.0) {
  const Eigen::MatrixXd A = random_sym(rng, dim, scale);
  return A * A.transpose();
}

// Random multi-block affine operator: every coordinate >= 1 may appear in any
// block; magnitudes kept small so finite-difference references stay accurate.
inline AggregateOperator random_operator(std::mt19937_64& rng, int num_coords,
                                         int num_blocks, int max_dim) {
  std::uniform_int_distribution<int> dim_dist(1, max_dim);
  std::uniform_real_distribution<double> val(-2.0, 2.0);
  std::uniform_real_distribution<double> prob(0.0, 1.0);

  std::vector<SdpBlock> blocks;
  for (int b = 0; b < num_blocks; ++b) {
    SdpBlock blk;
    blk.dim = dim_dist(rng);
    blk.m0 = random_sym(rng, blk.dim);
    for (int c = 1; c < num_coords; ++c) {
      if (prob(rng) < 0.35) continue;
      std::vector<polyopt::SymEntry> entries;
      for (int i = 0; i < blk.dim; ++i)
        for (int j = i; j < blk.dim; ++j)
          if (prob(rng) < 0.6) entries.push_back({i, j, val(rng)});
      if (!entries.empty()) blk.coeffs.emplace_back(c, std::move(entries));
    }
    blocks.push_back(std::move(blk));
  }
  Eigen::VectorXd cost(num_coords);
  for (int i = 0; i < num_coords; ++i) cost(i) = val(rng);
  return AggregateOperator(std::move(cost), std::move(blocks));
}

inline BlockDiagState random_state(std::mt19937_64& rng, const AggregateOperator& op) {
  std::uniform_real_distribution<double> val(-2.0, 2.0);
  BlockDiagState state;
  state.y.resize(op.num_coords());
  state.y(0) = 1.0;
  for (int i = 1; i < op.num_coords(); ++i) state.y(i) = val(rng);
  for (const auto& b : op.blocks()) {
    state.X.push_back(random_psd(rng, b.dim));
    state.Z.push_back(random_sym(rng, b.dim));
  }
  return state;
}

// min y subject to [[y, 1], [1, y]] psd: one free coordinate with coefficient
// matrix I2 and constant part [[0,-1],[-1,0]]; optimum y = 1.
inline AggregateOperator handcrafted_sdp() {
  SdpBlock blk;
  blk.dim = 2;
  blk.coeffs.emplace_back(1, std::vector<polyopt::SymEntry>{{0, 0, 1.0}, {1, 1, 1.0}});
  blk.m0 = Eigen::MatrixXd{{0.0, -1.0}, {-1.0, 0.0}};
  Eigen::VectorXd cost(2);
  cost << 0.0, 1.0;
  return AggregateOperator(std::move(cost), {std::move(blk)});
}

inline Polynomial poly_from_terms(
    int n, const std::vector<std::pair<std::vector<int>, double>>& terms) {
  Polynomial p(n);
  for (const auto& [expo, coef] : terms) p.add_term(Monomial(expo), coef);
  return p;
}

// min -x1 - x2  s.t.  1 - x1^2 - x2^2 >= 0; optimum -sqrt(2) at (1,1)/sqrt(2).
inline PopInstance trust_region_instance() {
  PopInstance inst;
  inst.n = 2;
  inst.objective = poly_from_terms(2, {{{1, 0}, -1.0}, {{0, 1}, -1.0}});
  inst.constraints.push_back(
      {poly_from_terms(2, {{{0, 0}, 1.0}, {{2, 0}, -1.0}, {{0, 2}, -1.0}}), "ball"});
  return inst;
}

// min x^2  s.t.  x - 1 >= 0, box [-3, 3]; optimum 1 at x = 1.
inline PopInstance parabola_instance() {
  PopInstance inst;
  inst.n = 1;
  inst.objective = poly_from_terms(1, {{{2}, 1.0}});
  inst.constraints.push_back({poly_from_terms(1, {{{1}, 1.0}, {{0}, -1.0}}), "shift"});
  inst.box = {{{-3.0, 3.0}}};
  return inst;
}

// min -x  s.t.  1 - x^2 >= 0; optimum -1 at x = 1.
inline PopInstance interval_instance() {
  PopInstance inst;
  inst.n = 1;
  inst.objective = poly_from_terms(1, {{{1}, -1.0}});
  inst.constraints.push_back({poly_from_terms(1, {{{0}, 1.0}, {{2}, -1.0}}), "interval"});
  return inst;
}

// min x1^4 x2^2 + x1^2 x2^4 - 3 x1^2 x2^2 + 1  s.t.  4 - x1^2 - x2^2 >= 0;
// optimum 0 at (+-1, +-1).
inline PopInstance motzkin_instance() {
  PopInstance inst;
  inst.n = 2;
  inst.objective = poly_from_terms(
      2, {{{4, 2}, 1.0}, {{2, 4}, 1.0}, {{2, 2}, -3.0}, {{0, 0}, 1.0}});
  inst.constraints.push_back(
      {poly_from_terms(2, {{{0, 0}, 4.0}, {{2, 0}, -1.0}, {{0, 2}, -1.0}}), "ball"});
  return inst;
}

}  // namespace testsupport
