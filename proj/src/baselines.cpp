#include "l1pca/baselines.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/QR>
#include <bit>
#include <chrono>
#include <cmath>

#include "l1pca/errors.hpp"
#include "l1pca/linalg.hpp"
#include "l1pca/rng.hpp"
#include "l1pca/solver_k1.hpp"
#include "l1pca/solver_kk.hpp"

namespace l1pca {

namespace {

/// Gray-code walk over all canonical sign vectors (first bit fixed +1),
/// calling visit(mask, b, yb) at every state. `yb` is maintained
/// incrementally in O(d) per step.
template <typename Visit>
void gray_walk(const Eigen::MatrixXd& y, Visit&& visit) {
  const Eigen::Index n = y.cols();
  SignVector b = SignVector::Ones(n);
  Eigen::VectorXd yb = y.rowwise().sum();
  std::uint32_t mask = 0;
  visit(mask, b, yb);
  const std::uint64_t count = 1ull << (n - 1);
  for (std::uint64_t c = 1; c < count; ++c) {
    const int bit = std::countr_zero(c);
    const Eigen::Index idx = bit + 1;
    yb -= 2.0 * b[idx] * y.col(idx);
    b[idx] = -b[idx];
    mask ^= (1u << idx);
    visit(mask, b, yb);
  }
}

double nuclear_from_gram(const Eigen::MatrixXd& gram) {
  if (gram.rows() == 2) {
    const double t = 0.5 * (gram(0, 0) + gram(1, 1));
    const double delta = std::hypot(0.5 * (gram(0, 0) - gram(1, 1)), gram(0, 1));
    const double l1 = std::max(t + delta, 0.0);
    const double l2 = std::max(t - delta, 0.0);
    return std::sqrt(l1) + std::sqrt(l2);
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(gram,
                                                     Eigen::EigenvaluesOnly);
  double sum = 0.0;
  for (Eigen::Index i = 0; i < gram.rows(); ++i)
    sum += std::sqrt(std::max(eig.eigenvalues()[i], 0.0));
  return sum;
}

OracleResult oracle_k1(const DataMatrix& x) {
  const Eigen::MatrixXd& y = x.reduced();
  double best = -1.0;
  std::uint32_t best_mask = 0;
  std::uint64_t searched = 0;
  gray_walk(y, [&](std::uint32_t mask, const SignVector&,
                   const Eigen::VectorXd& yb) {
    ++searched;
    const double val = yb.squaredNorm();
    if (val > best) {
      best = val;
      best_mask = mask;
    }
  });

  OracleResult out;
  out.best_b = decode_sign_vector(best_mask, x.samples());
  out.best_value = std::sqrt(best);
  const Eigen::VectorXd xb = x.entries() * out.best_b.col(0);
  out.optimal_q = xb / xb.norm();
  out.candidates_searched = searched;
  return out;
}

/// Sorted K-tuples over the canonical columns (combinations with
/// repetition); nuclear norms come from the K×K Gram of cached Y·b columns.
OracleResult oracle_kk(const DataMatrix& x, int k) {
  const Eigen::MatrixXd& y = x.reduced();
  const Eigen::Index n = x.samples();
  const std::uint64_t half = 1ull << (n - 1);

  Eigen::MatrixXd yb_cache(x.rank(), half);
  std::vector<std::uint32_t> masks(half);
  {
    std::uint64_t i = 0;
    gray_walk(y, [&](std::uint32_t mask, const SignVector&,
                     const Eigen::VectorXd& yb) {
      yb_cache.col(i) = yb;
      masks[i] = mask;
      ++i;
    });
  }

  double best = -1.0;
  std::vector<std::uint64_t> combo(static_cast<std::size_t>(k), 0);
  std::vector<std::uint64_t> best_combo = combo;
  std::uint64_t searched = 0;
  Eigen::MatrixXd gram(k, k);

  // Odometer over nondecreasing index tuples.
  for (;;) {
    for (int a = 0; a < k; ++a)
      for (int b2 = a; b2 < k; ++b2)
        gram(a, b2) = gram(b2, a) =
            yb_cache.col(combo[a]).dot(yb_cache.col(combo[b2]));
    ++searched;
    const double val = nuclear_from_gram(gram);
    if (val > best) {
      best = val;
      best_combo = combo;
    }

    int pos = k - 1;
    while (pos >= 0 && combo[static_cast<std::size_t>(pos)] == half - 1) --pos;
    if (pos < 0) break;
    const std::uint64_t next = combo[static_cast<std::size_t>(pos)] + 1;
    for (int j = pos; j < k; ++j) combo[static_cast<std::size_t>(j)] = next;
  }

  OracleResult out;
  out.best_b.resize(n, k);
  for (int j = 0; j < k; ++j)
    out.best_b.col(j) = decode_sign_vector(masks[best_combo[j]], n);
  out.best_value = best;
  out.optimal_q = procrustes_or_complete(x.entries() * out.best_b);
  out.candidates_searched = searched;
  return out;
}

}  // namespace

SignVector decode_sign_vector(std::uint32_t mask, Eigen::Index n) {
  SignVector b(n);
  for (Eigen::Index i = 0; i < n; ++i)
    b[i] = (mask >> i) & 1u ? -1.0 : 1.0;
  return b;
}

std::uint32_t encode_sign_vector(const SignVector& b) {
  std::uint32_t mask = 0;
  for (Eigen::Index i = 0; i < b.size(); ++i)
    if (b[i] < 0.0) mask |= (1u << i);
  return mask;
}

OracleResult exhaustive_oracle(const DataMatrix& x, int k,
                               const OracleGuard& guard) {
  if (k < 1 || k > x.rank())
    throw PreconditionError(
        "exhaustive_oracle: K must satisfy 1 <= K <= rank(X)");
  const Eigen::Index limit = k == 1 ? guard.max_n_k1 : guard.max_n_kk;
  if (x.samples() > limit)
    throw PreconditionError(
        "exhaustive_oracle: N exceeds the enumeration guard");
  return k == 1 ? oracle_k1(x) : oracle_kk(x, k);
}

SolverReport fixed_point_solve(const DataMatrix& x, int k,
                               const SolverConfig& cfg) {
  if (k < 1 || k > x.rank())
    throw PreconditionError(
        "fixed_point_solve: K must satisfy 1 <= K <= rank(X)");
  if (cfg.restarts < 1)
    throw PreconditionError("fixed_point_solve: restarts must be >= 1");
  const auto t0 = std::chrono::steady_clock::now();
  const Eigen::Index n = x.samples();
  const Eigen::Index dims = x.dims();

  SolverReport report;
  double best_l1 = -1.0;
  for (int l = 0; l < cfg.restarts; ++l) {
    Eigen::MatrixXd current = x.entries();
    Eigen::MatrixXd q(dims, k);
    SignMatrix b(n, k);
    std::vector<double> trajectory;
    int iterations = 0;
    bool converged = true;

    for (int comp = 0; comp < k; ++comp) {
      const CompactSvd svd = compact_svd(current);
      const Eigen::MatrixXd y = svd.sigma.asDiagonal() * svd.v.transpose();
      const Eigen::MatrixXd gram = y.transpose() * y;

      SignVector bc;
      if (l == 0 && cfg.init == InitMode::Given) {
        if (cfg.given_init.rows() != n || cfg.given_init.cols() < comp + 1)
          throw PreconditionError("fixed_point_solve: given_init must be N×K");
        bc = cfg.given_init.col(comp);
      } else {
        // The classic iteration starts from an arbitrary sign vector;
        // equiprobable draws keep the baseline comparable across restarts.
        Rng rng = Rng::stream(cfg.seed, {kTagRestartFp,
                                         static_cast<std::uint64_t>(l),
                                         static_cast<std::uint64_t>(comp)});
        bc.resize(n);
        for (Eigen::Index i = 0; i < n; ++i)
          bc[i] = (rng.next() & 1u) ? 1.0 : -1.0;
      }

      bool fixed = false;
      for (Eigen::Index it = 0; it < n; ++it) {
        const SignVector next = sign_vector_of(gram * bc);
        ++iterations;
        if (comp == 0) trajectory.push_back((y * next).norm());
        if (next == bc) {
          fixed = true;
          break;
        }
        bc = next;
      }
      if (!fixed) converged = false;

      const Eigen::VectorXd xb = current * bc;
      const double norm = xb.norm();
      if (norm == 0.0)
        throw NumericalError("fixed_point_solve: degenerate X·b = 0");
      q.col(comp) = xb / norm;
      b.col(comp) = bc;
      current -= q.col(comp) * (q.col(comp).transpose() * current);
    }

    const double l1 = l1_metric_k(x.entries(), q);
    if (l1 > best_l1) {
      best_l1 = l1;
      report.q = q;
      report.b = b;
      report.l1_metric = l1;
      report.quad_metric =
          k == 1 ? (x.reduced() * b.col(0)).norm() : nuclear_norm(x.reduced() * b);
      report.flips = iterations;
      report.trajectory = std::move(trajectory);
      report.restart_winner = l;
      report.converged = converged;
    }
  }

  report.wall_time_sec =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
          .count();
  return report;
}

SolverReport alt_opt_solve(const DataMatrix& x, int k,
                           const SolverConfig& cfg) {
  if (k < 1 || k > x.rank())
    throw PreconditionError("alt_opt_solve: K must satisfy 1 <= K <= rank(X)");
  if (cfg.restarts < 1)
    throw PreconditionError("alt_opt_solve: restarts must be >= 1");
  const auto t0 = std::chrono::steady_clock::now();
  const Eigen::Index n = x.samples();
  const int cap = static_cast<int>(n) * k;

  SolverReport report;
  double best_l1 = -1.0;
  for (int l = 0; l < cfg.restarts; ++l) {
    Eigen::MatrixXd q;
    if (l == 0 && cfg.init != InitMode::Random) {
      q = x.left_vectors().leftCols(k);
    } else {
      Rng rng = Rng::stream(cfg.seed, {kTagRestartAo,
                                       static_cast<std::uint64_t>(l)});
      const Eigen::MatrixXd g = gaussian_matrix(x.dims(), k, rng);
      Eigen::HouseholderQR<Eigen::MatrixXd> qr(g);
      q = qr.householderQ() * Eigen::MatrixXd::Identity(x.dims(), k);
    }

    SignMatrix b(n, k);
    SignMatrix b_prev = SignMatrix::Zero(n, k);
    std::vector<double> trajectory;
    bool converged = false;
    bool completed_any = false;
    int iterations = 0;

    for (int t = 0; t < cap; ++t) {
      b = sign_matrix_of(x.entries().transpose() * q);
      ++iterations;
      if (t > 0 && b == b_prev) {
        converged = true;
        break;
      }
      bool completed = false;
      q = procrustes_or_complete(x.entries() * b, &completed);
      completed_any = completed_any || completed;
      trajectory.push_back(l1_metric_k(x.entries(), q));
      b_prev = b;
    }

    const double l1 = l1_metric_k(x.entries(), q);
    if (l1 > best_l1) {
      best_l1 = l1;
      report.q = q;
      report.b = b;
      report.l1_metric = l1;
      report.quad_metric = k == 1 ? (x.reduced() * b.col(0)).norm()
                                  : nuclear_norm(x.reduced() * b);
      report.flips = iterations;
      report.trajectory = std::move(trajectory);
      report.restart_winner = l;
      report.converged = converged;
      report.basis_completed = completed_any;
    }
  }

  report.wall_time_sec =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
          .count();
  return report;
}

SetEnumeration enumerate_sets(const DataMatrix& x, Eigen::Index max_n) {
  const Eigen::Index n = x.samples();
  if (n > max_n || n > 31)
    throw PreconditionError("enumerate_sets: N exceeds the enumeration guard");

  const Eigen::MatrixXd& y = x.reduced();
  const Eigen::MatrixXd gram = y.transpose() * y;
  const Eigen::VectorXd diag = gram.diagonal();

  // Pass 1: the exact maximum of the quadratic metric.
  double best = -1.0;
  gray_walk(y, [&](std::uint32_t, const SignVector&,
                   const Eigen::VectorXd& yb) {
    best = std::max(best, yb.squaredNorm());
  });

  SetEnumeration sets;
  const double tie_tol = 1e-12 * best;
  gray_walk(y, [&](std::uint32_t mask, const SignVector& b,
                   const Eigen::VectorXd& yb) {
    const Eigen::VectorXd g = gram * b;
    bool in_phi = true, in_omega = true;
    for (Eigen::Index i = 0; i < n; ++i) {
      const double s = g[i] < 0.0 ? -1.0 : 1.0;
      if (s != b[i]) in_phi = false;
      if (b[i] * g[i] - diag[i] < 0.0) in_omega = false;
    }
    if (in_phi) sets.fixed_points.push_back(mask);
    if (in_omega) sets.flip_stable.push_back(mask);
    if (yb.squaredNorm() >= best - tie_tol) sets.maximizers.push_back(mask);
  });
  return sets;
}

}  // namespace l1pca
