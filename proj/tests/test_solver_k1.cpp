#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>

#include "l1pca/data_matrix.hpp"
#include "l1pca/errors.hpp"
#include "l1pca/solver_k1.hpp"
#include "test_helpers.hpp"

using namespace l1pca;
using test_helpers::random_gaussian;
using test_helpers::random_sign;

TEST_CASE("sv_sign_init takes the sign of the first row of Y") {
  Eigen::MatrixXd y(1, 3);
  y << 2, -3, 1;
  const SignVector b = sv_sign_init(y);
  CHECK(b[0] == 1.0);
  CHECK(b[1] == -1.0);
  CHECK(b[2] == 1.0);

  Eigen::MatrixXd y0(1, 2);
  y0 << 0, 5;
  const SignVector b0 = sv_sign_init(y0);
  CHECK(b0[0] == 1.0);  // sgn(0) := +1
  CHECK(b0[1] == 1.0);
}

TEST_CASE("sv_sign_init equals the sign of the scaled leading singular vector") {
  const DataMatrix x(random_gaussian(3, 20, 5));
  const SignVector b = sv_sign_init(x.reduced());
  const Eigen::VectorXd scaled =
      x.singular_values()[0] * x.right_vectors().col(0);
  for (Eigen::Index i = 0; i < b.size(); ++i)
    CHECK(b[i] == (scaled[i] < 0.0 ? -1.0 : 1.0));
}

TEST_CASE("contributions: hand-evaluated cases") {
  const Eigen::MatrixXd eye = Eigen::MatrixXd::Identity(2, 2);
  const Eigen::VectorXd a1 = contributions(eye, Eigen::Vector2d(1, 1));
  CHECK(a1.cwiseAbs().maxCoeff() <= 1e-15);

  Eigen::MatrixXd y(1, 2);
  y << 1, 1;
  const Eigen::VectorXd a2 = contributions(y, Eigen::Vector2d(1, -1));
  CHECK(a2[0] == doctest::Approx(-2.0));
  CHECK(a2[1] == doctest::Approx(-2.0));
}

TEST_CASE("flipping the argmin bit changes the quadratic by -2 alpha") {
  for (int t = 0; t < 25; ++t) {
    const Eigen::MatrixXd y = random_gaussian(4, 8, 40 + t);
    const SignVector b = random_sign(8, 140 + t);
    const Eigen::VectorXd alpha = contributions(y, b);
    Eigen::Index n;
    alpha.minCoeff(&n);
    SignVector flipped = b;
    flipped[n] = -flipped[n];
    const double before = (y * b).squaredNorm();
    const double after = (y * flipped).squaredNorm();
    CHECK(std::abs((after - before) - (-2.0 * alpha[n])) <=
          1e-9 * std::max(1.0, before));
  }
}

TEST_CASE("quad_metric basics and the reduction identity") {
  CHECK(quad_metric(Eigen::MatrixXd::Identity(2, 2), Eigen::Vector2d(1, 1)) ==
        doctest::Approx(std::sqrt(2.0)));
  Eigen::MatrixXd y(1, 2);
  y << 1, 1;
  CHECK(quad_metric(y, Eigen::Vector2d(1, -1)) == doctest::Approx(0.0));

  const DataMatrix x(random_gaussian(4, 9, 77));
  const SignVector b = random_sign(9, 78);
  CHECK(std::abs(quad_metric(x.reduced(), b) - (x.entries() * b).norm()) <=
        1e-9);
}

TEST_CASE("bit_flip_solve: rank-one closed form") {
  Eigen::MatrixXd m(1, 3);
  m << 1, -2, 3;
  const DataMatrix x(m);
  const SolverReport rep = bit_flip_solve(x);
  CHECK(rep.l1_metric == doctest::Approx(6.0).epsilon(1e-12));
  CHECK(rep.quad_metric == doctest::Approx(6.0).epsilon(1e-12));
  CHECK(rep.flips == 0);
  CHECK(rep.converged);
  // b = +/- [1, -1, 1]
  CHECK(rep.b(0, 0) * rep.b(1, 0) == -1.0);
  CHECK(rep.b(0, 0) * rep.b(2, 0) == 1.0);
  CHECK(std::abs(rep.q(0, 0)) == doctest::Approx(1.0));
}

TEST_CASE("bit_flip_solve: symmetric degenerate instance") {
  const DataMatrix x(Eigen::MatrixXd::Identity(2, 2));
  const SolverReport rep = bit_flip_solve(x);
  CHECK(rep.quad_metric == doctest::Approx(std::sqrt(2.0)).epsilon(1e-12));
  CHECK(rep.converged);
}

TEST_CASE("bit_flip_solve: convergence-point properties on random data") {
  for (int t = 0; t < 30; ++t) {
    const DataMatrix x(random_gaussian(4, 12, 500 + t));
    const SolverReport rep = bit_flip_solve(x);
    REQUIRE(rep.converged);

    const Eigen::MatrixXd& y = x.reduced();
    const Eigen::MatrixXd gram = y.transpose() * y;
    const Eigen::VectorXd b = rep.b.col(0);
    const Eigen::VectorXd g = gram * b;
    const double tol = 1e-8 * y.squaredNorm();

    // Monotone strictly increasing trajectory.
    for (std::size_t i = 1; i < rep.trajectory.size(); ++i)
      CHECK(rep.trajectory[i] > rep.trajectory[i - 1]);
    CHECK(rep.flips <= x.samples());

    // Flip-stable membership: b_n y_n^T Y b >= ||y_n||^2.
    for (Eigen::Index n = 0; n < b.size(); ++n)
      CHECK(b[n] * g[n] >= gram(n, n) - tol);

    // Fixed point of sgn(Y^T Y b).
    for (Eigen::Index n = 0; n < b.size(); ++n)
      CHECK(b[n] * g[n] > 0.0);

    // Metric equality at convergence.
    CHECK(std::abs(rep.l1_metric - rep.quad_metric) <=
          1e-8 * std::max(1.0, rep.l1_metric));

    // Frobenius lower bound, spectral upper bound.
    CHECK(rep.l1_metric >= x.frobenius() - 1e-9);
    CHECK(rep.l1_metric <=
          std::sqrt(double(x.samples())) * x.singular_values()[0] + 1e-9);
  }
}

TEST_CASE("bit_flip_solve: negating the data leaves the metric unchanged") {
  for (int t = 0; t < 10; ++t) {
    const Eigen::MatrixXd m = random_gaussian(3, 10, 700 + t);
    const SolverReport a = bit_flip_solve(DataMatrix(m));
    const SolverReport b = bit_flip_solve(DataMatrix(-m));
    CHECK(std::abs(a.l1_metric - b.l1_metric) <= 1e-10 * m.norm());
  }
}

TEST_CASE("bit_flip_solve: exhausted flip budget is flagged") {
  // Find an adversarial start that needs at least two flips (a global
  // negation would not do: contributions are negation-invariant).
  const Eigen::MatrixXd m = random_gaussian(4, 12, 808);
  const DataMatrix x(m);
  SolverConfig cfg;
  cfg.init = InitMode::Given;
  bool found = false;
  for (int a = 0; a < 5 && !found; ++a) {
    for (int b = a + 1; b < 6 && !found; ++b) {
      SignVector start = sv_sign_init(x.reduced());
      start[a] = -start[a];
      start[b] = -start[b];
      cfg.given_init = start;
      if (bit_flip_solve(x, cfg).flips >= 2) found = true;
    }
  }
  REQUIRE(found);

  cfg.flip_budget = 1;
  const SolverReport capped = bit_flip_solve(x, cfg);
  CHECK_FALSE(capped.converged);
  CHECK(capped.flips == 1);
}

TEST_CASE("bit_flip_solve: deterministic and monotone in restarts") {
  const DataMatrix x(random_gaussian(4, 14, 900));
  SolverConfig cfg;
  cfg.restarts = 8;
  cfg.seed = 42;
  const SolverReport a = bit_flip_solve(x, cfg);
  const SolverReport b = bit_flip_solve(x, cfg);
  CHECK(a.l1_metric == b.l1_metric);
  CHECK(a.restart_winner == b.restart_winner);
  CHECK((a.b - b.b).cwiseAbs().maxCoeff() == 0.0);

  cfg.restarts = 1;
  const SolverReport single = bit_flip_solve(x, cfg);
  CHECK(a.l1_metric >= single.l1_metric - 1e-12);
}

TEST_CASE("bit_flip_solve validates configuration") {
  const DataMatrix x(random_gaussian(3, 6, 950));
  SolverConfig cfg;
  cfg.restarts = 0;
  CHECK_THROWS_AS(bit_flip_solve(x, cfg), PreconditionError);
  cfg.restarts = 1;
  cfg.init = InitMode::Given;
  cfg.given_init = Eigen::MatrixXd::Ones(5, 1);  // wrong length
  CHECK_THROWS_AS(bit_flip_solve(x, cfg), PreconditionError);
}
