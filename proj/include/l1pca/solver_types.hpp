#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

namespace l1pca {

/// Sign vectors/matrices hold entries that are exactly +1 or -1.
using SignVector = Eigen::VectorXd;
using SignMatrix = Eigen::MatrixXd;

/// Entrywise sign with the fixed convention sgn(0) := +1.
Eigen::VectorXd sign_vector_of(const Eigen::VectorXd& v);
Eigen::MatrixXd sign_matrix_of(const Eigen::MatrixXd& m);
bool is_sign_matrix(const Eigen::MatrixXd& m);

enum class InitMode {
  SvSign,  // sign of the scaled leading right singular vector
  Random,  // every start drawn from the seeded stream
  Given,   // caller-provided first start
};

struct SolverConfig {
  InitMode init = InitMode::SvSign;
  int restarts = 1;       // L; starts beyond the first are always random
  int flip_budget = 0;    // 0 selects N (K = 1) or N*K (K > 1)
  double tol = -1.0;      // < 0 selects the metric-scaled default
  std::uint64_t seed = 0;
  SignMatrix given_init;  // N×1 or N×K, used when init == Given
};

struct SolverReport {
  Eigen::MatrixXd q;  // D×K, orthonormal columns
  SignMatrix b;       // N×K
  double l1_metric = 0.0;    // ‖XᵀQ‖₁
  double quad_metric = 0.0;  // ‖Yb‖₂ for K = 1, ‖YB‖_* for K > 1
  int flips = 0;
  std::vector<double> trajectory;  // objective at init and after each flip
  int restart_winner = 0;
  bool converged = true;
  bool basis_completed = false;  // orthonormal completion was applied
  int numeric_fallbacks = 0;     // direct-SVD fallbacks in the fast path
  double wall_time_sec = 0.0;
};

}  // namespace l1pca
