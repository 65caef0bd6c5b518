#pragma once

#include <Eigen/Dense>

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "polyopt/moment.hpp"
#include "polyopt/polynomial.hpp"

namespace polyopt {

struct OracleResult {
  Eigen::VectorXd x_best;
  double f_best = 0.0;
  int grid_resolution = 0;
  int refinements = 0;  // accepted coordinate-descent moves
};

// Search box: the instance's own box when present, otherwise the radius of a
// ball constraint of the form c - sum a_i x_i^2 >= 0 (c, a_i > 0). nullopt
// when neither applies.
std::optional<std::vector<std::array<double, 2>>> bounding_box(const PopInstance& inst);

// Reference optimizer for small instances (n <= 4): dense grid scan, then the
// ten best feasible grid points are polished by coordinate descent with
// shrinking steps. Fully deterministic; ties broken by grid index. Throws
// std::runtime_error when no grid point is feasible.
OracleResult grid_multistart(const PopInstance& inst,
                             const std::vector<std::array<double, 2>>& box, int resolution);

std::string oracle_to_json(const OracleResult& result, int indent = 2);

// Moment vector of the Dirac measure at x_hat over the given index.
Eigen::VectorXd dirac_moments(const Eigen::Ref<const Eigen::VectorXd>& x_hat,
                              const MomentIndex& idx);

}  // namespace polyopt
