#pragma once

#include <Eigen/Dense>

namespace l1pca {

/// Nearest matrix with orthonormal columns: U Vᵀ from the thin SVD of a
/// (m×n, m ≥ n). Maximizes trace(RᵀA) over all R with orthonormal columns.
/// Throws RankDeficientError when the argument has dependent columns.
Eigen::MatrixXd procrustes(const Eigen::MatrixXd& a);

/// Same map, but a rank-deficient argument has its missing singular
/// directions completed with a deterministic orthonormal basis of the
/// orthogonal complement (column-pivoted orthogonalization). `completed`,
/// when given, reports whether completion was needed.
Eigen::MatrixXd procrustes_or_complete(const Eigen::MatrixXd& a,
                                       bool* completed = nullptr);

/// Sum of singular values.
double nuclear_norm(const Eigen::MatrixXd& a);

struct EigUpdateResult {
  Eigen::VectorXd eigenvalues;   // nonincreasing
  Eigen::MatrixXd eigenvectors;  // orthonormal columns; empty if not requested
};

/// Eigensystem of diag(p) + rho·z·zᵀ via the secular equation, with
/// deflation of zero z-components and repeated diagonal entries
/// (threshold 1e-12·‖p‖_∞). For rho > 0 the eigenvalues interlace p.
/// rho = 0 or z = 0 short-circuits to the diagonal eigensystem.
EigUpdateResult rank1_eig_update(const Eigen::VectorXd& p,
                                 const Eigen::VectorXd& z, double rho,
                                 bool want_vectors);

}  // namespace l1pca
