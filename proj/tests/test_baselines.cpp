#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>

#include "l1pca/baselines.hpp"
#include "l1pca/data_matrix.hpp"
#include "l1pca/errors.hpp"
#include "l1pca/linalg.hpp"
#include "l1pca/solver_k1.hpp"
#include "l1pca/solver_kk.hpp"
#include "test_helpers.hpp"

using namespace l1pca;
using test_helpers::random_gaussian;

namespace {

/// Unpruned oracle over the full {-1,+1}^{N×K} cube, for validating the
/// symmetry-pruned search on small instances.
double full_cube_best(const Eigen::MatrixXd& y, int k) {
  const Eigen::Index n = y.cols();
  const std::uint64_t total = 1ull << (n * k);
  double best = -1.0;
  for (std::uint64_t code = 0; code < total; ++code) {
    SignMatrix b(n, k);
    for (Eigen::Index j = 0; j < k; ++j)
      for (Eigen::Index i = 0; i < n; ++i)
        b(i, j) = (code >> (j * n + i)) & 1u ? -1.0 : 1.0;
    best = std::max(best, nuclear_norm(y * b));
  }
  return best;
}

}  // namespace

TEST_CASE("exhaustive_oracle: rank-one instance") {
  Eigen::MatrixXd m(1, 3);
  m << 1, -2, 3;
  const OracleResult r = exhaustive_oracle(DataMatrix(m), 1);
  CHECK(r.best_value == doctest::Approx(6.0));
  CHECK(r.best_b(0, 0) == 1.0);
  CHECK(r.best_b(1, 0) == -1.0);
  CHECK(r.best_b(2, 0) == 1.0);
  CHECK(r.candidates_searched == 4);
}

TEST_CASE("exhaustive_oracle: identity ties") {
  const OracleResult r = exhaustive_oracle(DataMatrix(Eigen::MatrixXd::Identity(2, 2)), 1);
  CHECK(r.best_value == doctest::Approx(std::sqrt(2.0)));
}

TEST_CASE("exhaustive_oracle dominates random unit directions") {
  const DataMatrix x(random_gaussian(4, 10, 2100));
  const OracleResult r = exhaustive_oracle(x, 1);
  const double opt = l1_metric_k(x, r.optimal_q);
  l1pca::Rng rng(2101);
  for (int t = 0; t < 1000; ++t) {
    Eigen::VectorXd q = gaussian_vector(4, rng);
    q.normalize();
    CHECK(opt >= (x.entries().transpose() * q).lpNorm<1>() - 1e-10);
  }
}

TEST_CASE("exhaustive_oracle refuses oversized instances") {
  const DataMatrix x(random_gaussian(3, 17, 2200));
  CHECK_THROWS_AS(exhaustive_oracle(x, 1), PreconditionError);
  const DataMatrix x2(random_gaussian(3, 11, 2201));
  CHECK_THROWS_AS(exhaustive_oracle(x2, 2), PreconditionError);
}

TEST_CASE("pruned K=2 oracle agrees with the unpruned cube") {
  for (int n = 4; n <= 6; ++n) {
    const DataMatrix x(random_gaussian(3, n, 2300 + n));
    const OracleResult pruned = exhaustive_oracle(x, 2);
    const double full = full_cube_best(x.reduced(), 2);
    CHECK(pruned.best_value == doctest::Approx(full).epsilon(1e-10));
  }
}

TEST_CASE("fixed_point_solve: rank-one instance and the fixed-point property") {
  Eigen::MatrixXd m(1, 3);
  m << 1, -2, 3;
  const SolverReport rep = fixed_point_solve(DataMatrix(m), 1);
  CHECK(rep.converged);
  CHECK(rep.l1_metric == doctest::Approx(6.0));

  for (int t = 0; t < 15; ++t) {
    const DataMatrix x(random_gaussian(4, 10, 2400 + t));
    const SolverReport r = fixed_point_solve(x, 1);
    REQUIRE(r.converged);
    const Eigen::MatrixXd gram = x.entries().transpose() * x.entries();
    const Eigen::VectorXd g = gram * r.b.col(0);
    for (Eigen::Index i = 0; i < g.size(); ++i)
      CHECK(r.b(i, 0) == (g[i] < 0.0 ? -1.0 : 1.0));
  }
}

TEST_CASE("fixed_point_solve: K > 1 gives an orthonormal deflated basis") {
  const DataMatrix x(random_gaussian(4, 9, 2500));
  const SolverReport rep = fixed_point_solve(x, 3);
  CHECK((rep.q.transpose() * rep.q - Eigen::MatrixXd::Identity(3, 3))
            .cwiseAbs()
            .maxCoeff() <= 1e-9);
  CHECK(rep.b.cols() == 3);
  CHECK(is_sign_matrix(rep.b));
}

TEST_CASE("alt_opt_solve: identity instance and monotone trajectory") {
  const SolverReport eye_rep =
      alt_opt_solve(DataMatrix(Eigen::MatrixXd::Identity(2, 2)), 2);
  CHECK(eye_rep.l1_metric == doctest::Approx(2.0));

  for (int t = 0; t < 10; ++t) {
    const DataMatrix x(random_gaussian(3, 8, 2600 + t));
    const SolverReport rep = alt_opt_solve(x, 2);
    CHECK(rep.converged);
    for (std::size_t i = 1; i < rep.trajectory.size(); ++i)
      CHECK(rep.trajectory[i] >= rep.trajectory[i - 1] -
                                     1e-9 * std::max(1.0, rep.trajectory[i]));
  }
}

TEST_CASE("alt_opt_solve coincides with fixed_point_solve for K = 1") {
  // The default alternating start (leading left singular vector) induces
  // the sv-sign vector on the first half-step, so feed the fixed-point
  // iteration the same start.
  for (int t = 0; t < 10; ++t) {
    const DataMatrix x(random_gaussian(4, 10, 2700 + t));
    SolverConfig fp_cfg;
    fp_cfg.init = InitMode::Given;
    fp_cfg.given_init = sv_sign_init(x.reduced());
    const SolverReport fp = fixed_point_solve(x, 1, fp_cfg);
    const SolverReport ao = alt_opt_solve(x, 1);
    CHECK(std::abs(fp.l1_metric - ao.l1_metric) <=
          1e-8 * std::max(1.0, fp.l1_metric));
  }
}

TEST_CASE("oracle dominance over every solver") {
  for (int t = 0; t < 10; ++t) {
    const DataMatrix x(random_gaussian(4, 10, 2800 + t));
    const OracleResult oracle = exhaustive_oracle(x, 1);
    const double opt = l1_metric_k(x, oracle.optimal_q);
    CHECK(opt >= bit_flip_solve(x).l1_metric - 1e-8 * opt);
    CHECK(opt >= fixed_point_solve(x, 1).l1_metric - 1e-8 * opt);
    CHECK(opt >= alt_opt_solve(x, 1).l1_metric - 1e-8 * opt);
  }
}

TEST_CASE("enumerate_sets: the subset chain holds with the doubled sizes") {
  for (int t = 0; t < 20; ++t) {
    const DataMatrix x(random_gaussian(2, 6, 2900 + t));
    const SetEnumeration sets = enumerate_sets(x);
    CHECK(sets.bset_size() >= 2);
    CHECK(sets.bset_size() <= sets.omega_size());
    CHECK(sets.omega_size() <= sets.phi_size());
    CHECK(sets.phi_size() <= (1u << 6));

    auto contains = [](const std::vector<std::uint32_t>& v, std::uint32_t m) {
      return std::find(v.begin(), v.end(), m) != v.end();
    };
    for (std::uint32_t m : sets.maximizers) CHECK(contains(sets.flip_stable, m));
    for (std::uint32_t m : sets.flip_stable) CHECK(contains(sets.fixed_points, m));
  }
}

TEST_CASE("enumerate_sets guards against blow-up") {
  const DataMatrix x(random_gaussian(2, 22, 3000));
  CHECK_THROWS_AS(enumerate_sets(x), PreconditionError);
}

TEST_CASE("bit-flip convergence points lie inside the enumerated stable set") {
  for (int t = 0; t < 15; ++t) {
    const DataMatrix x(random_gaussian(3, 9, 3100 + t));
    const SetEnumeration sets = enumerate_sets(x);
    const SolverReport rep = bit_flip_solve(x);
    Eigen::VectorXd b = rep.b.col(0);
    if (b[0] < 0.0) b = -b;  // canonical representative
    const std::uint32_t mask = encode_sign_vector(b);
    CHECK(std::find(sets.flip_stable.begin(), sets.flip_stable.end(), mask) !=
          sets.flip_stable.end());
  }
}

TEST_CASE("sign vector mask round trip") {
  const Eigen::VectorXd b = test_helpers::random_sign(12, 3200);
  Eigen::VectorXd canonical = b[0] < 0 ? Eigen::VectorXd(-b) : b;
  const std::uint32_t mask = encode_sign_vector(canonical);
  CHECK((decode_sign_vector(mask, 12) - canonical).cwiseAbs().maxCoeff() ==
        0.0);
}
