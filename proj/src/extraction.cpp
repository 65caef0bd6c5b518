#include "polyopt/extraction.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "polyopt/linalg.hpp"

namespace polyopt {

Eigen::MatrixXd second_order_submatrix(const Eigen::Ref<const Eigen::MatrixXd>& moment_block,
                                       int n) {
  if (moment_block.rows() < n + 1)
    throw std::invalid_argument("moment block too small for a second-order submatrix");
  return moment_block.topLeftCorner(n + 1, n + 1);
}

std::optional<Candidate> extract_candidate(const Eigen::Ref<const Eigen::MatrixXd>& m2) {
  const EigDecomp eig = k_eigs(m2, 1);
  const double lambda = eig.values[0];
  const Eigen::VectorXd u = rank1_factor(std::max(lambda, 0.0), eig.vectors.col(0));
  if (std::abs(u[0]) < 1e-8) return std::nullopt;

  Candidate cand;
  cand.x = u.tail(u.size() - 1) / u[0];
  const double norm = m2.norm();
  cand.rank1_gap =
      norm > 0.0
          ? (m2 - lambda * eig.vectors.col(0) * eig.vectors.col(0).transpose()).norm() / norm
          : 0.0;
  return cand;
}

ViolationReport violated_constraints(const PopInstance& inst,
                                     const Eigen::Ref<const Eigen::VectorXd>& x, double eps) {
  if (eps < 0.0) throw std::invalid_argument("violated_constraints: eps must be >= 0");
  ViolationReport report;
  report.magnitude.reserve(inst.constraints.size());
  for (int k = 0; k < inst.num_constraints(); ++k) {
    const double fk = evaluate(inst.constraints[static_cast<size_t>(k)].poly, x);
    const double violation = std::max(-fk, 0.0);  // |min(f_k(x), 0)|
    report.magnitude.push_back(violation);
    report.max_violation = std::max(report.max_violation, violation);
    if (violation > eps) report.violated.push_back(k);
  }
  return report;
}

void score_candidate(const PopInstance& inst, Candidate& cand, double eps) {
  cand.z_pop = evaluate(inst.objective, cand.x);
  ViolationReport report = violated_constraints(inst, cand.x, eps);
  cand.violations = std::move(report.magnitude);
  cand.max_violation = report.max_violation;
}

}  // namespace polyopt
