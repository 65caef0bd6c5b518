#pragma once

#include <Eigen/Dense>

#include <optional>
#include <vector>

#include "polyopt/polynomial.hpp"

namespace polyopt {

struct Candidate {
  Eigen::VectorXd x;
  double rank1_gap = 0.0;  // ||M2 - l1 v1 v1'||_F / ||M2||_F
  double z_pop = 0.0;      // f0(x)
  std::vector<double> violations;  // |min(f_k(x), 0)| per constraint
  double max_violation = 0.0;
};

// Leading (1+n) x (1+n) principal submatrix of a moment block: the rows and
// columns of the constant and the n degree-1 monomials.
Eigen::MatrixXd second_order_submatrix(const Eigen::Ref<const Eigen::MatrixXd>& moment_block,
                                       int n);

// Rank-1 reading of M2: top eigenpair, u = sqrt(l1) v1 signed so u_0 >= 0,
// x_i = u_i / u_0. Returns nullopt when u_0 < 1e-8 (degenerate).
std::optional<Candidate> extract_candidate(const Eigen::Ref<const Eigen::MatrixXd>& m2);

struct ViolationReport {
  std::vector<int> violated;       // k with |min(f_k(x), 0)| > eps, ascending
  std::vector<double> magnitude;   // per constraint
  double max_violation = 0.0;
};

ViolationReport violated_constraints(const PopInstance& inst,
                                     const Eigen::Ref<const Eigen::VectorXd>& x, double eps);

// Fills z_pop / violations / max_violation for an extracted point.
void score_candidate(const PopInstance& inst, Candidate& cand, double eps);

}  // namespace polyopt
