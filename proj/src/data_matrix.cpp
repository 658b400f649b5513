#include "l1pca/data_matrix.hpp"

#include <Eigen/SVD>

#include "l1pca/errors.hpp"

namespace l1pca {

CompactSvd compact_svd(const Eigen::MatrixXd& m, double rank_tol) {
  if (m.size() == 0) throw InputError("compact_svd: empty matrix");
  if (!m.allFinite()) throw InputError("compact_svd: non-finite entries");
  if (rank_tol < 0.0) throw InputError("compact_svd: rank_tol must be >= 0");

  Eigen::JacobiSVD<Eigen::MatrixXd> svd(m, Eigen::ComputeThinU |
                                               Eigen::ComputeThinV);
  const Eigen::VectorXd& sv = svd.singularValues();
  const double cutoff = rank_tol * sv[0];
  Eigen::Index rank = 0;
  while (rank < sv.size() && sv[rank] > cutoff) ++rank;
  if (rank == 0)
    throw InputError("compact_svd: matrix is zero (rank 0 unsupported)");

  CompactSvd out;
  out.u = svd.matrixU().leftCols(rank);
  out.sigma = sv.head(rank);
  out.v = svd.matrixV().leftCols(rank);
  out.rank = rank;
  return out;
}

DataMatrix::DataMatrix(Eigen::MatrixXd entries, double rank_tol)
    : entries_(std::move(entries)), svd_(compact_svd(entries_, rank_tol)) {
  reduced_ = svd_.sigma.asDiagonal() * svd_.v.transpose();
  frobenius_ = entries_.norm();
}

}  // namespace l1pca
