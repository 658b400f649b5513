#pragma once

#include "l1pca/data_matrix.hpp"
#include "l1pca/solver_types.hpp"

namespace l1pca {

/// Sign of the first row of Y = Σ Vᵀ, i.e. of the scaled leading right
/// singular vector. For rank-1 data this is already the exact maximizer.
SignVector sv_sign_init(const Eigen::MatrixXd& y);

/// Contribution of each bit to ‖Yb‖²: alpha[n] = 2(b_n·y_nᵀYb - ‖y_n‖²).
/// Flipping bit n changes ‖Yb‖² by exactly -2·alpha[n].
Eigen::VectorXd contributions(const Eigen::MatrixXd& y, const SignVector& b);

/// ‖Yb‖₂ (equals ‖Xb‖₂ for Y derived from X).
double quad_metric(const Eigen::MatrixXd& y, const SignVector& b);

/// Single-component solver: greedy bit flipping over {±1}^N restrained by
/// the not-yet-flipped index set, with multi-start. The winner maximizes
/// ‖Xᵀq‖₁.
SolverReport bit_flip_solve(const DataMatrix& x, const SolverConfig& cfg = {});

}  // namespace l1pca
