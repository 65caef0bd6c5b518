#pragma once

#include <Eigen/Dense>

namespace polyopt {

// Symmetric matrices are plain dense matrices; every kernel here only reads
// one triangle, so symmetry is a convention rather than a storage format.
using SymMatrix = Eigen::MatrixXd;

struct EigDecomp {
  Eigen::VectorXd values;   // descending
  Eigen::MatrixXd vectors;  // orthonormal columns aligned with values
};

// Full spectral decomposition. Eigenvalues are sorted descending with a
// stable tie order (ties keep the ascending-solver output order, so for the
// identity the first column is e_0).
EigDecomp sym_eig(const SymMatrix& A);

// Leading k eigenpairs of the descending decomposition.
EigDecomp k_eigs(const SymMatrix& A, int k);

// Number of eigenvalues with |lambda| > tau * max(1, |lambda_max|).
int numerical_rank(const SymMatrix& A, double tau);

// sqrt(lambda) * v with the sign flipped so the first (constant-monomial)
// coordinate is non-negative. lambda must be >= 0.
Eigen::VectorXd rank1_factor(double lambda, const Eigen::Ref<const Eigen::VectorXd>& v);

double frob_inner(const SymMatrix& A, const SymMatrix& B);

}  // namespace polyopt
