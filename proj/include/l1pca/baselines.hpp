#pragma once

#include <cstdint>
#include <vector>

#include "l1pca/data_matrix.hpp"
#include "l1pca/solver_types.hpp"

namespace l1pca {

struct OracleResult {
  SignMatrix best_b;          // N×K
  double best_value = 0.0;    // ‖Yb‖₂ (K = 1) or ‖YB‖_* (K > 1)
  Eigen::MatrixXd optimal_q;  // D×K
  std::uint64_t candidates_searched = 0;
};

struct OracleGuard {
  Eigen::Index max_n_k1 = 16;
  Eigen::Index max_n_kk = 10;
};

/// Exact maximizer by exhaustive search. Negation symmetry fixes the first
/// bit of every column to +1; for K > 1, column-permutation symmetry
/// restricts the search to sorted column tuples. Refuses N beyond the guard.
OracleResult exhaustive_oracle(const DataMatrix& x, int k,
                               const OracleGuard& guard = {});

/// Fixed-point iterations b ← sgn(XᵀXb), one component at a time, with
/// successive nullspace projections for K > 1. Starts from an equiprobable
/// random sign vector (or the given one); iteration cap N per component.
SolverReport fixed_point_solve(const DataMatrix& x, int k,
                               const SolverConfig& cfg = {});

/// Alternating optimization B ← sgn(XᵀQ), Q ← U(XB) from an orthonormal
/// start (leading left singular vectors by default). Iteration cap N·K.
SolverReport alt_opt_solve(const DataMatrix& x, int k,
                           const SolverConfig& cfg = {});

/// Membership sets over canonical sign vectors (first bit +1), encoded as
/// bitmasks with bit n set iff b_n = -1. Reported cardinalities use the
/// doubled convention counting both b and -b.
struct SetEnumeration {
  std::vector<std::uint32_t> fixed_points;  // Φ: b = sgn(YᵀYb)
  std::vector<std::uint32_t> flip_stable;   // Ω: b_n·y_nᵀYb ≥ ‖y_n‖² ∀n
  std::vector<std::uint32_t> maximizers;    // B: argmax ‖Yb‖₂

  std::size_t phi_size() const { return 2 * fixed_points.size(); }
  std::size_t omega_size() const { return 2 * flip_stable.size(); }
  std::size_t bset_size() const { return 2 * maximizers.size(); }
};

SetEnumeration enumerate_sets(const DataMatrix& x, Eigen::Index max_n = 20);

SignVector decode_sign_vector(std::uint32_t mask, Eigen::Index n);
std::uint32_t encode_sign_vector(const SignVector& b);

}  // namespace l1pca
