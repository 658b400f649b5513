#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>

#include "l1pca/errors.hpp"
#include "l1pca/experiments.hpp"
#include "l1pca/solver_k1.hpp"
#include "test_helpers.hpp"

using namespace l1pca;
using test_helpers::random_gaussian;

TEST_CASE("degradation: zero at the optimum, bounded for any direction") {
  const DataMatrix x(random_gaussian(4, 10, 4000));
  const OracleResult oracle = exhaustive_oracle(x, 1);
  CHECK(degradation(oracle.optimal_q, x, oracle) == doctest::Approx(0.0));

  l1pca::Rng rng(4001);
  for (int t = 0; t < 50; ++t) {
    Eigen::VectorXd q = gaussian_vector(4, rng);
    q.normalize();
    const double delta = degradation(q, x, oracle);
    CHECK(delta >= 0.0);
    CHECK(delta <= 1.0);
  }
}

TEST_CASE("trial_matrix is reproducible and honors the rank request") {
  const Eigen::MatrixXd a = trial_matrix(4, 9, 0, 5, 3);
  const Eigen::MatrixXd b = trial_matrix(4, 9, 0, 5, 3);
  CHECK((a - b).cwiseAbs().maxCoeff() == 0.0);
  const Eigen::MatrixXd c = trial_matrix(4, 9, 0, 5, 4);
  CHECK((a - c).cwiseAbs().maxCoeff() > 0.0);

  const DataMatrix low(trial_matrix(5, 12, 2, 6, 0));
  CHECK(low.rank() == 2);
}

TEST_CASE("run_comparison produces valid summaries") {
  TrialBatch batch;
  batch.dims = 4;
  batch.samples = 10;
  batch.trials = 40;
  batch.seed = 99;
  const ComparisonResult result = run_comparison(
      batch, {SolverKind::L1Bf, SolverKind::FixedPoint, SolverKind::AltOpt}, 2);
  REQUIRE(result.solvers.size() == 3);
  for (const auto& sc : result.solvers) {
    CHECK(sc.deltas.size() == 40);
    for (double d : sc.deltas) {
      CHECK(d >= 0.0);
      CHECK(d <= 1.0);
    }
    CHECK(sc.exact_rate >= 0.0);
    CHECK(sc.exact_rate <= 1.0);
  }
  // The bit-flipping solver should recover the optimum most often.
  CHECK(result.solvers[0].exact_rate >= result.solvers[1].exact_rate);

  // Determinism regardless of the thread count.
  const ComparisonResult rerun = run_comparison(batch, {SolverKind::L1Bf}, 1);
  for (std::size_t t = 0; t < 40; ++t)
    CHECK(rerun.solvers[0].deltas[t] == result.solvers[0].deltas[t]);
}

TEST_CASE("line_fit_demo: clean fits agree, corrupted L2 drifts") {
  const Eigen::Matrix2d cov = default_line_fit_covariance();
  const Eigen::MatrixXd outliers = default_line_fit_outliers(cov);
  CHECK(outliers.cols() == 4);

  const LineFitResult r = line_fit_demo(100, cov, outliers, 7);
  CHECK(angle_between(r.l2_clean, r.true_direction) < 0.2);
  CHECK(angle_between(r.l1_clean, r.true_direction) < 0.2);

  const LineFitResult again = line_fit_demo(100, cov, outliers, 7);
  CHECK((r.nominal - again.nominal).cwiseAbs().maxCoeff() == 0.0);
  CHECK((r.l1_corrupted - again.l1_corrupted).cwiseAbs().maxCoeff() == 0.0);

  int l1_better = 0;
  for (int rep = 0; rep < 25; ++rep) {
    const LineFitResult rr = line_fit_demo(100, cov, outliers, 100 + rep);
    if (angle_between(rr.l1_corrupted, rr.true_direction) <
        angle_between(rr.l2_corrupted, rr.true_direction))
      ++l1_better;
  }
  CHECK(l1_better > 12);
}

TEST_CASE("line_fit_demo rejects an indefinite covariance") {
  Eigen::Matrix2d bad;
  bad << 1, 2, 2, 1;
  CHECK_THROWS_AS(line_fit_demo(50, bad, Eigen::MatrixXd::Zero(2, 1), 1),
                  PreconditionError);
}

TEST_CASE("surrogate_classes produces two reproducible classes") {
  SurrogateSpec spec;
  const auto [m, n] = surrogate_classes(spec);
  CHECK(m.rows() == 9);
  CHECK(m.cols() == 19);
  CHECK(n.rows() == 9);
  const auto [m2, n2] = surrogate_classes(spec);
  CHECK((m - m2).cwiseAbs().maxCoeff() == 0.0);
  CHECK((n - n2).cwiseAbs().maxCoeff() == 0.0);

  SurrogateSpec bad;
  bad.rank_n = 8;
  CHECK_THROWS_AS(surrogate_classes(bad), PreconditionError);
}

TEST_CASE("subspace_classify: ROC endpoints and sanity") {
  SurrogateSpec spec;
  const auto [cm, cn] = surrogate_classes(spec);

  ClassifyConfig cfg;
  cfg.splits = 60;
  cfg.seed = 31;
  cfg.threads = 2;
  const RocCurve roc = subspace_classify(cm, cn, PcaMethod::L2, cfg);

  REQUIRE(roc.lambdas.size() >= 3);
  // Largest bias classifies everything "normal": the (0, 0) corner.
  CHECK(roc.false_alarm.front() == 0.0);
  CHECK(roc.detection.front() == 0.0);
  // Smallest bias classifies everything "malignant": the (1, 1) corner.
  CHECK(roc.false_alarm.back() == 1.0);
  CHECK(roc.detection.back() == 1.0);
  for (std::size_t i = 1; i < roc.lambdas.size(); ++i) {
    CHECK(roc.lambdas[i] < roc.lambdas[i - 1]);
    CHECK(roc.false_alarm[i] >= roc.false_alarm[i - 1]);
    CHECK(roc.detection[i] >= roc.detection[i - 1]);
  }
  for (std::size_t i = 0; i < roc.lambdas.size(); ++i) {
    CHECK(roc.false_alarm[i] >= 0.0);
    CHECK(roc.false_alarm[i] <= 1.0);
    CHECK(roc.detection[i] >= 0.0);
    CHECK(roc.detection[i] <= 1.0);
  }
  // Clean training data separates the classes well.
  CHECK(roc.area_under_curve() > 0.8);
}

TEST_CASE("subspace_classify: mislabeling favors the robust components") {
  const auto [cm, cn] = surrogate_classes(SurrogateSpec{});

  ClassifyConfig cfg;
  cfg.splits = 500;
  cfg.p_mislabel = 2;
  cfg.seed = 77;
  cfg.threads = 4;
  const double auc_l2 =
      subspace_classify(cm, cn, PcaMethod::L2, cfg).area_under_curve();
  const double auc_l1 =
      subspace_classify(cm, cn, PcaMethod::L1Bf, cfg).area_under_curve();
  CHECK(auc_l1 > auc_l2);
}

TEST_CASE("init_comparison: sv-sign start usually wins and rarely flips") {
  const InitStudyResult r = init_comparison(3, 20, 120, 5, 4);
  CHECK(r.svsign_flips.size() == 120);
  CHECK(r.svsign_win_fraction >= 0.6);
  std::vector<int> sorted = r.svsign_flips;
  std::sort(sorted.begin(), sorted.end());
  CHECK(sorted[sorted.size() / 2] <= 1);  // median
}
