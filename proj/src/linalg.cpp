#include "l1pca/linalg.hpp"

#include <Eigen/QR>
#include <Eigen/SVD>

#include "l1pca/data_matrix.hpp"
#include "l1pca/errors.hpp"

namespace l1pca {

namespace {

Eigen::Index svd_rank(const Eigen::VectorXd& sv) {
  const double cutoff = kDefaultRankTol * sv[0];
  Eigen::Index r = 0;
  while (r < sv.size() && sv[r] > cutoff) ++r;
  return r;
}

/// First `want` columns of a deterministic orthonormal basis for the
/// orthogonal complement of the span of `basis` (orthonormal columns).
Eigen::MatrixXd complement_basis(const Eigen::MatrixXd& basis,
                                 Eigen::Index want) {
  const Eigen::Index n = basis.rows();
  Eigen::MatrixXd projector =
      Eigen::MatrixXd::Identity(n, n) - basis * basis.transpose();
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(projector);
  Eigen::MatrixXd q = qr.householderQ() * Eigen::MatrixXd::Identity(n, want);
  return q;
}

}  // namespace

Eigen::MatrixXd procrustes(const Eigen::MatrixXd& a) {
  if (!a.allFinite()) throw InputError("procrustes: non-finite entries");
  if (a.rows() < a.cols())
    throw PreconditionError("procrustes: argument must have rows >= cols");
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(a, Eigen::ComputeThinU |
                                               Eigen::ComputeThinV);
  const Eigen::Index r = svd_rank(svd.singularValues());
  if (r < a.cols())
    throw RankDeficientError("procrustes: rank-deficient argument", r);
  return svd.matrixU() * svd.matrixV().transpose();
}

Eigen::MatrixXd procrustes_or_complete(const Eigen::MatrixXd& a,
                                       bool* completed) {
  if (!a.allFinite()) throw InputError("procrustes: non-finite entries");
  if (a.rows() < a.cols())
    throw PreconditionError("procrustes: argument must have rows >= cols");
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(a, Eigen::ComputeThinU |
                                               Eigen::ComputeThinV);
  const Eigen::Index k = a.cols();
  const Eigen::Index r = svd_rank(svd.singularValues());
  if (completed) *completed = (r < k);
  if (r == k) return svd.matrixU() * svd.matrixV().transpose();

  const Eigen::MatrixXd u_r = svd.matrixU().leftCols(r);
  const Eigen::MatrixXd v_r = svd.matrixV().leftCols(r);
  const Eigen::MatrixXd u_c = complement_basis(u_r, k - r);
  const Eigen::MatrixXd v_c = complement_basis(v_r, k - r);
  return u_r * v_r.transpose() + u_c * v_c.transpose();
}

double nuclear_norm(const Eigen::MatrixXd& a) {
  if (!a.allFinite()) throw InputError("nuclear_norm: non-finite entries");
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(a);
  return svd.singularValues().sum();
}

}  // namespace l1pca
