#include "polyopt/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <vector>

namespace polyopt {

EigDecomp sym_eig(const SymMatrix& A) {
  if (A.rows() != A.cols()) throw std::invalid_argument("sym_eig: matrix must be square");
  if (!A.allFinite()) throw std::invalid_argument("sym_eig: non-finite entries");

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(A);
  if (solver.info() != Eigen::Success)
    throw std::runtime_error("sym_eig: eigendecomposition failed");

  const int n = static_cast<int>(A.rows());
  std::vector<int> order(static_cast<size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  // descending; stable so equal eigenvalues keep the solver's output order
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    return solver.eigenvalues()[a] > solver.eigenvalues()[b];
  });

  EigDecomp out;
  out.values.resize(n);
  out.vectors.resize(n, n);
  for (int i = 0; i < n; ++i) {
    out.values[i] = solver.eigenvalues()[order[static_cast<size_t>(i)]];
    out.vectors.col(i) = solver.eigenvectors().col(order[static_cast<size_t>(i)]);
  }
  return out;
}

EigDecomp k_eigs(const SymMatrix& A, int k) {
  if (k < 1 || k > A.rows()) throw std::invalid_argument("k_eigs: k out of range");
  EigDecomp full = sym_eig(A);
  EigDecomp out;
  out.values = full.values.head(k);
  out.vectors = full.vectors.leftCols(k);
  return out;
}

int numerical_rank(const SymMatrix& A, double tau) {
  if (tau < 0.0) throw std::invalid_argument("numerical_rank: tau must be non-negative");
  const EigDecomp eig = sym_eig(A);
  if (eig.values.size() == 0) return 0;
  const double threshold = tau * std::max(1.0, std::abs(eig.values[0]));
  int rank = 0;
  for (int i = 0; i < eig.values.size(); ++i) {
    if (std::abs(eig.values[i]) > threshold) ++rank;
  }
  return rank;
}

Eigen::VectorXd rank1_factor(double lambda, const Eigen::Ref<const Eigen::VectorXd>& v) {
  if (lambda < 0.0) throw std::invalid_argument("rank1_factor: negative eigenvalue");
  Eigen::VectorXd u = std::sqrt(lambda) * v;
  if (u.size() > 0 && u[0] < 0.0) u = -u;
  return u;
}

double frob_inner(const SymMatrix& A, const SymMatrix& B) {
  if (A.rows() != B.rows() || A.cols() != B.cols())
    throw std::invalid_argument("frob_inner: dimension mismatch");
  return (A.array() * B.array()).sum();
}

}  // namespace polyopt
