#pragma once

#include "l1pca/data_matrix.hpp"
#include "l1pca/solver_types.hpp"

namespace l1pca {

/// Per-iteration cache for evaluating single-bit flips of B: the SVD of
/// Y·B plus (U·S)ᵀ·Y, whose column m is the per-row product needed by
/// every candidate in row m.
struct FlipEvalContext {
  Eigen::MatrixXd u;    // d×K
  Eigen::VectorXd s;    // singular values of Y·B, nonincreasing
  Eigen::MatrixXd v;    // K×K
  Eigen::VectorXd s_sq;
  Eigen::MatrixXd fty;  // K×N

  FlipEvalContext(const Eigen::MatrixXd& y, const SignMatrix& b);
};

struct FlipEvalStats {
  int fallbacks = 0;  // candidates recomputed by direct SVD
};

/// ‖Y·B - 2·B(m,l)·y_m·e_lᵀ‖_*, i.e. the nuclear norm after flipping bit
/// (m,l), evaluated through two rank-1 symmetric eigen-updates of the
/// cached eigensystem instead of a fresh SVD. Candidates whose updated
/// spectrum is negative or degenerate near zero are recomputed by a direct
/// SVD and counted in `stats`.
double flip_candidate_nuclear(const FlipEvalContext& ctx,
                              const Eigen::MatrixXd& y, const SignMatrix& b,
                              Eigen::Index m, Eigen::Index l,
                              FlipEvalStats* stats = nullptr);

/// Sum of absolute projections ‖XᵀQ‖₁.
double l1_metric_k(const Eigen::MatrixXd& x_entries, const Eigen::MatrixXd& q);
double l1_metric_k(const DataMatrix& x, const Eigen::MatrixXd& q);

/// K-component solver: single-bit flipping over {±1}^{N×K} maximizing
/// ‖YB‖_*, finished by the Procrustes step Q = U(X·B). Requires K ≤ rank.
SolverReport bit_flip_solve_k(const DataMatrix& x, int k,
                              const SolverConfig& cfg = {});

}  // namespace l1pca
