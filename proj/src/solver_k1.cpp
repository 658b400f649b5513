#include "l1pca/solver_k1.hpp"

#include <cassert>
#include <chrono>
#include <cmath>
#include <limits>

#include "l1pca/errors.hpp"
#include "l1pca/rng.hpp"

namespace l1pca {

Eigen::VectorXd sign_vector_of(const Eigen::VectorXd& v) {
  Eigen::VectorXd out(v.size());
  for (Eigen::Index i = 0; i < v.size(); ++i) out[i] = v[i] < 0.0 ? -1.0 : 1.0;
  return out;
}

Eigen::MatrixXd sign_matrix_of(const Eigen::MatrixXd& m) {
  Eigen::MatrixXd out(m.rows(), m.cols());
  for (Eigen::Index j = 0; j < m.cols(); ++j)
    for (Eigen::Index i = 0; i < m.rows(); ++i)
      out(i, j) = m(i, j) < 0.0 ? -1.0 : 1.0;
  return out;
}

bool is_sign_matrix(const Eigen::MatrixXd& m) {
  for (Eigen::Index j = 0; j < m.cols(); ++j)
    for (Eigen::Index i = 0; i < m.rows(); ++i)
      if (m(i, j) != 1.0 && m(i, j) != -1.0) return false;
  return true;
}

SignVector sv_sign_init(const Eigen::MatrixXd& y) {
  return sign_vector_of(y.row(0).transpose());
}

namespace {

Eigen::VectorXd contributions_from_gram(const Eigen::MatrixXd& gram,
                                        const SignVector& b) {
  return 2.0 * (b.cwiseProduct(gram * b) - gram.diagonal());
}

struct BitFlipRun {
  SignVector b;
  double quad_sq = 0.0;
  int flips = 0;
  bool converged = false;
  std::vector<double> trajectory;  // ‖Yb‖ at init and after each flip
};

BitFlipRun run_bit_flip(const Eigen::MatrixXd& gram, SignVector b, int budget,
                        double tol) {
  const Eigen::Index n = b.size();
  BitFlipRun run;
  Eigen::VectorXd alpha = contributions_from_gram(gram, b);
  double quad_sq = b.dot(gram * b);
  run.trajectory.push_back(std::sqrt(std::max(quad_sq, 0.0)));

  std::vector<char> listed(static_cast<std::size_t>(n), 1);
  Eigen::Index listed_count = n;

  for (;;) {
    Eigen::Index pick = -1;
    double best = std::numeric_limits<double>::infinity();
    for (Eigen::Index i = 0; i < n; ++i) {
      if (listed[static_cast<std::size_t>(i)] && alpha[i] < best) {
        best = alpha[i];
        pick = i;
      }
    }

    if (best < -tol) {
      if (run.flips >= budget) {
        run.converged = false;
        break;
      }
      const double b_old = b[pick];
      const double alpha_old = alpha[pick];
      quad_sq -= 2.0 * alpha_old;
      // Contribution update uses the pre-flip sign of bit `pick`.
      alpha -= 4.0 * b_old * b.cwiseProduct(gram.col(pick));
      alpha[pick] = -alpha_old;
      b[pick] = -b_old;
      listed[static_cast<std::size_t>(pick)] = 0;
      --listed_count;
      ++run.flips;
      run.trajectory.push_back(std::sqrt(std::max(quad_sq, 0.0)));
#ifndef NDEBUG
      {
        const Eigen::VectorXd fresh = contributions_from_gram(gram, b);
        assert((alpha - fresh).cwiseAbs().maxCoeff() <=
               1e-8 * std::max(1.0, gram.cwiseAbs().maxCoeff()));
        assert(std::abs(quad_sq - b.dot(gram * b)) <=
               1e-8 * std::max(1.0, quad_sq));
      }
#endif
    } else if (listed_count < n) {
      std::fill(listed.begin(), listed.end(), char{1});
      listed_count = n;
    } else {
      run.converged = true;
      break;
    }
  }

  run.b = std::move(b);
  run.quad_sq = quad_sq;
  return run;
}

SignVector initial_vector(const DataMatrix& x, const SolverConfig& cfg,
                          int restart) {
  const Eigen::MatrixXd& y = x.reduced();
  if (restart == 0) {
    switch (cfg.init) {
      case InitMode::SvSign:
        return sv_sign_init(y);
      case InitMode::Given:
        if (cfg.given_init.rows() != x.samples() || cfg.given_init.cols() != 1)
          throw PreconditionError("bit_flip_solve: given_init must be N×1");
        if (!is_sign_matrix(cfg.given_init))
          throw PreconditionError("bit_flip_solve: given_init must be ±1");
        return cfg.given_init.col(0);
      case InitMode::Random: {
        // Equiprobable over the sign hypercube.
        Rng rng = Rng::stream(cfg.seed, {kTagRestartK1, 0});
        SignVector b(x.samples());
        for (Eigen::Index i = 0; i < b.size(); ++i)
          b[i] = (rng.next() & 1u) ? 1.0 : -1.0;
        return b;
      }
    }
  }
  // Later starts are data-directed: the sign pattern of a random member
  // of the row space of Y.
  Rng rng = Rng::stream(cfg.seed, {kTagRestartK1,
                                   static_cast<std::uint64_t>(restart)});
  const Eigen::VectorXd a = gaussian_vector(x.rank(), rng);
  return sign_vector_of(y.transpose() * a);
}

}  // namespace

Eigen::VectorXd contributions(const Eigen::MatrixXd& y, const SignVector& b) {
  if (y.cols() != b.size())
    throw PreconditionError("contributions: size mismatch between Y and b");
  return contributions_from_gram(y.transpose() * y, b);
}

double quad_metric(const Eigen::MatrixXd& y, const SignVector& b) {
  if (y.cols() != b.size())
    throw PreconditionError("quad_metric: size mismatch between Y and b");
  return (y * b).norm();
}

SolverReport bit_flip_solve(const DataMatrix& x, const SolverConfig& cfg) {
  if (cfg.restarts < 1)
    throw PreconditionError("bit_flip_solve: restarts must be >= 1");
  const auto t0 = std::chrono::steady_clock::now();

  const Eigen::MatrixXd& y = x.reduced();
  const Eigen::Index n = x.samples();
  const Eigen::MatrixXd gram = y.transpose() * y;
  const double tol = cfg.tol >= 0.0 ? cfg.tol : 1e-12 * y.squaredNorm();
  const int budget =
      cfg.flip_budget > 0 ? cfg.flip_budget : static_cast<int>(n);

  SolverReport report;
  double best_l1 = -1.0;
  for (int l = 0; l < cfg.restarts; ++l) {
    BitFlipRun run = run_bit_flip(gram, initial_vector(x, cfg, l), budget, tol);
    Eigen::VectorXd xb = x.entries() * run.b;
    const double norm = xb.norm();
    if (norm == 0.0)
      throw NumericalError(
          "bit_flip_solve: X·b is zero, principal direction undefined");
    const Eigen::VectorXd q = xb / norm;
    const double l1 = (x.entries().transpose() * q).lpNorm<1>();
    if (l1 > best_l1) {
      best_l1 = l1;
      report.q = q;
      report.b = run.b;
      report.l1_metric = l1;
      report.quad_metric = std::sqrt(std::max(run.quad_sq, 0.0));
      report.flips = run.flips;
      report.trajectory = std::move(run.trajectory);
      report.restart_winner = l;
      report.converged = run.converged;
    }
  }

  report.wall_time_sec =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
          .count();
  return report;
}

}  // namespace l1pca
