#pragma once

#include <Eigen/Dense>

namespace l1pca {

/// Singular values below rank_tol * sigma_max are treated as zero.
inline constexpr double kDefaultRankTol = 1e-10;

struct CompactSvd {
  Eigen::MatrixXd u;      // D×d, orthonormal columns
  Eigen::VectorXd sigma;  // length d, nonincreasing, > 0
  Eigen::MatrixXd v;      // N×d, orthonormal columns
  Eigen::Index rank = 0;
};

/// Compact SVD with rank truncation. Throws InputError for non-finite or
/// all-zero input (rank 0 is unsupported downstream).
CompactSvd compact_svd(const Eigen::MatrixXd& m,
                       double rank_tol = kDefaultRankTol);

/// Dense D×N data matrix with its compact SVD computed once at construction.
/// All solvers consume the reduced matrix Y = Σ Vᵀ (d×N), which shares the
/// Gram matrix XᵀX with the original data; X is never re-factored.
class DataMatrix {
 public:
  explicit DataMatrix(Eigen::MatrixXd entries,
                      double rank_tol = kDefaultRankTol);

  const Eigen::MatrixXd& entries() const noexcept { return entries_; }
  Eigen::Index dims() const noexcept { return entries_.rows(); }     // D
  Eigen::Index samples() const noexcept { return entries_.cols(); }  // N
  Eigen::Index rank() const noexcept { return svd_.rank; }           // d

  const Eigen::MatrixXd& left_vectors() const noexcept { return svd_.u; }
  const Eigen::VectorXd& singular_values() const noexcept { return svd_.sigma; }
  const Eigen::MatrixXd& right_vectors() const noexcept { return svd_.v; }

  /// Y = Σ Vᵀ, d×N.
  const Eigen::MatrixXd& reduced() const noexcept { return reduced_; }

  /// ‖X‖_F (equals ‖Y‖_F up to rank truncation).
  double frobenius() const noexcept { return frobenius_; }

 private:
  Eigen::MatrixXd entries_;
  CompactSvd svd_;
  Eigen::MatrixXd reduced_;
  double frobenius_ = 0.0;
};

}  // namespace l1pca
