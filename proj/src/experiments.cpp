#include "l1pca/experiments.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <Eigen/QR>
#include <algorithm>
#include <cmath>
#include <numeric>

#include "l1pca/errors.hpp"
#include "l1pca/parallel.hpp"
#include "l1pca/rng.hpp"
#include "l1pca/solver_k1.hpp"
#include "l1pca/solver_kk.hpp"

namespace l1pca {

double degradation(const Eigen::MatrixXd& q, const DataMatrix& x,
                   const OracleResult& oracle) {
  const double opt = l1_metric_k(x.entries(), oracle.optimal_q);
  if (opt <= 0.0)
    throw PreconditionError("degradation: oracle metric must be positive");
  const double val = l1_metric_k(x.entries(), q);
  return std::clamp((opt - val) / opt, 0.0, 1.0);
}

Eigen::MatrixXd trial_matrix(int dims, int samples, int rank,
                             std::uint64_t seed, std::uint64_t trial) {
  Rng rng = Rng::stream(seed, {kTagTrial, trial});
  if (rank <= 0 || rank >= std::min(dims, samples))
    return gaussian_matrix(dims, samples, rng);
  const Eigen::MatrixXd a = gaussian_matrix(dims, rank, rng);
  const Eigen::MatrixXd b = gaussian_matrix(rank, samples, rng);
  return a * b;
}

std::string solver_name(SolverKind kind) {
  switch (kind) {
    case SolverKind::L1Bf:
      return "l1bf";
    case SolverKind::FixedPoint:
      return "fp";
    case SolverKind::AltOpt:
      return "ao";
  }
  return "unknown";
}

std::string method_name(PcaMethod method) {
  return method == PcaMethod::L2 ? "l2" : "l1bf";
}

ComparisonResult run_comparison(const TrialBatch& batch,
                                const std::vector<SolverKind>& solvers,
                                int threads) {
  if (batch.trials < 1)
    throw PreconditionError("run_comparison: trials must be >= 1");
  ComparisonResult result;
  result.batch = batch;
  result.solvers.resize(solvers.size());
  const std::size_t trials = static_cast<std::size_t>(batch.trials);
  for (std::size_t s = 0; s < solvers.size(); ++s) {
    result.solvers[s].kind = solvers[s];
    result.solvers[s].deltas.resize(trials);
    result.solvers[s].flips.resize(trials);
  }
  std::vector<std::vector<double>> wall(solvers.size(),
                                        std::vector<double>(trials, 0.0));

  parallel_for(trials, threads, [&](std::size_t t) {
    const DataMatrix x(trial_matrix(batch.dims, batch.samples, batch.rank,
                                    batch.seed, t));
    const OracleResult oracle = exhaustive_oracle(x, batch.components);
    SolverConfig cfg;
    cfg.restarts = batch.restarts;
    cfg.seed = Rng::mix(batch.seed, t);
    for (std::size_t s = 0; s < solvers.size(); ++s) {
      SolverReport rep;
      switch (solvers[s]) {
        case SolverKind::L1Bf:
          rep = batch.components == 1 ? bit_flip_solve(x, cfg)
                                      : bit_flip_solve_k(x, batch.components, cfg);
          break;
        case SolverKind::FixedPoint:
          rep = fixed_point_solve(x, batch.components, cfg);
          break;
        case SolverKind::AltOpt:
          rep = alt_opt_solve(x, batch.components, cfg);
          break;
      }
      result.solvers[s].deltas[t] = degradation(rep.q, x, oracle);
      result.solvers[s].flips[t] = rep.flips;
      wall[s][t] = rep.wall_time_sec;
    }
  });

  for (std::size_t s = 0; s < solvers.size(); ++s) {
    auto& sc = result.solvers[s];
    const auto exact = std::count_if(sc.deltas.begin(), sc.deltas.end(),
                                     [](double d) { return d <= 1e-8; });
    sc.exact_rate = static_cast<double>(exact) / static_cast<double>(trials);
    sc.mean_flips =
        std::accumulate(sc.flips.begin(), sc.flips.end(), 0.0) / trials;
    sc.mean_wall_sec =
        std::accumulate(wall[s].begin(), wall[s].end(), 0.0) / trials;
  }
  return result;
}

double angle_between(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  const double cosine =
      std::abs(a.dot(b)) / std::max(a.norm() * b.norm(), 1e-300);
  return std::acos(std::clamp(cosine, 0.0, 1.0));
}

Eigen::Matrix2d default_line_fit_covariance() {
  Eigen::Matrix2d r;
  r << 4.0, 10.0, 10.0, 29.0;
  return r;
}

namespace {

/// Eigenpairs of a 2×2 covariance with a fixed sign convention (largest
/// component positive) so fixtures are reproducible.
void covariance_axes(const Eigen::Matrix2d& covariance,
                     Eigen::Vector2d& major, Eigen::Vector2d& minor,
                     double& sigma_major) {
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> eig(covariance);
  if (eig.eigenvalues().minCoeff() <= 0.0)
    throw PreconditionError("line_fit: covariance must be positive definite");
  major = eig.eigenvectors().col(1);
  minor = eig.eigenvectors().col(0);
  auto fix = [](Eigen::Vector2d& v) {
    const int i = std::abs(v[0]) >= std::abs(v[1]) ? 0 : 1;
    if (v[i] < 0.0) v = -v;
  };
  fix(major);
  fix(minor);
  sigma_major = std::sqrt(eig.eigenvalues()[1]);
}

}  // namespace

Eigen::MatrixXd default_line_fit_outliers(const Eigen::Matrix2d& covariance) {
  Eigen::Vector2d major, minor;
  double sigma;
  covariance_axes(covariance, major, minor, sigma);
  const double along[] = {-0.40, -0.35, -0.50, -0.45};
  const double across[] = {6.00, 6.40, 5.80, 6.10};
  Eigen::MatrixXd outliers(2, 4);
  for (int j = 0; j < 4; ++j)
    outliers.col(j) = sigma * (along[j] * major + across[j] * minor);
  return outliers;
}

LineFitResult line_fit_demo(int n_nominal, const Eigen::Matrix2d& covariance,
                            const Eigen::MatrixXd& outliers,
                            std::uint64_t seed) {
  if (n_nominal < 2)
    throw PreconditionError("line_fit: need at least two nominal points");
  Eigen::Vector2d major, minor;
  double sigma;
  covariance_axes(covariance, major, minor, sigma);

  Rng rng = Rng::stream(seed, {kTagLineFit});
  const Eigen::Matrix2d chol = covariance.llt().matrixL();
  LineFitResult result;
  result.nominal = chol * gaussian_matrix(2, n_nominal, rng);
  result.outliers = outliers;
  result.true_direction = major;

  Eigen::MatrixXd corrupted(2, n_nominal + outliers.cols());
  corrupted << result.nominal, outliers;

  const DataMatrix clean(result.nominal);
  const DataMatrix dirty(corrupted);
  result.l2_clean = clean.left_vectors().col(0);
  result.l2_corrupted = dirty.left_vectors().col(0);
  SolverConfig cfg;
  cfg.seed = seed;
  result.l1_clean = bit_flip_solve(clean, cfg).q.col(0);
  result.l1_corrupted = bit_flip_solve(dirty, cfg).q.col(0);
  return result;
}

double RocCurve::area_under_curve() const {
  double area = 0.0;
  for (std::size_t i = 1; i < false_alarm.size(); ++i)
    area += (false_alarm[i] - false_alarm[i - 1]) *
            0.5 * (detection[i] + detection[i - 1]);
  return area;
}

namespace {

/// First `count` elements of a seeded shuffle of {0, ..., n-1}.
std::vector<int> random_subset(int n, int count, Rng& rng) {
  std::vector<int> idx(static_cast<std::size_t>(n));
  std::iota(idx.begin(), idx.end(), 0);
  for (int i = 0; i < count; ++i) {
    const int j = i + static_cast<int>(rng.next() %
                                       static_cast<std::uint64_t>(n - i));
    std::swap(idx[static_cast<std::size_t>(i)],
              idx[static_cast<std::size_t>(j)]);
  }
  idx.resize(static_cast<std::size_t>(count));
  return idx;
}

Eigen::MatrixXd class_basis(const Eigen::MatrixXd& centered, PcaMethod method,
                            int k, const SolverConfig& cfg) {
  const DataMatrix data(centered);
  if (k > data.rank())
    throw PreconditionError(
        "subspace_classify: K exceeds the training-set rank");
  if (method == PcaMethod::L2) return data.left_vectors().leftCols(k);
  return bit_flip_solve_k(data, k, cfg).q;
}

}  // namespace

RocCurve subspace_classify(const Eigen::MatrixXd& class_m,
                           const Eigen::MatrixXd& class_n, PcaMethod method,
                           const ClassifyConfig& cfg) {
  const int n = static_cast<int>(class_m.cols());
  if (class_n.cols() != n || class_n.rows() != class_m.rows())
    throw PreconditionError("subspace_classify: class shapes must match");
  if (cfg.n_train < 2 || cfg.n_train >= n)
    throw PreconditionError(
        "subspace_classify: need 2 <= n_train < points per class");
  if (cfg.p_mislabel > cfg.n_train)
    throw PreconditionError("subspace_classify: p exceeds the training size");
  if (cfg.splits < 1)
    throw PreconditionError("subspace_classify: splits must be >= 1");
  const int held = n - cfg.n_train;

  const std::size_t splits = static_cast<std::size_t>(cfg.splits);
  std::vector<std::vector<double>> pos(splits), neg(splits);

  parallel_for(splits, cfg.threads, [&](std::size_t s) {
    Rng rng = Rng::stream(cfg.seed, {kTagSplit, s});
    const std::vector<int> train_m = random_subset(n, cfg.n_train, rng);
    const std::vector<int> train_n = random_subset(n, cfg.n_train, rng);

    Eigen::MatrixXd tr_m(class_m.rows(), cfg.n_train);
    Eigen::MatrixXd tr_n(class_n.rows(), cfg.n_train);
    for (int i = 0; i < cfg.n_train; ++i) {
      tr_m.col(i) = class_m.col(train_m[static_cast<std::size_t>(i)]);
      tr_n.col(i) = class_n.col(train_n[static_cast<std::size_t>(i)]);
    }
    // Mislabeling: swap p training columns between the classes.
    const std::vector<int> slots_m = random_subset(cfg.n_train, cfg.p_mislabel, rng);
    const std::vector<int> slots_n = random_subset(cfg.n_train, cfg.p_mislabel, rng);
    for (int i = 0; i < cfg.p_mislabel; ++i)
      tr_m.col(slots_m[static_cast<std::size_t>(i)])
          .swap(tr_n.col(slots_n[static_cast<std::size_t>(i)]));

    const Eigen::VectorXd mean_m = tr_m.rowwise().mean();
    const Eigen::VectorXd mean_n = tr_n.rowwise().mean();
    SolverConfig solver_cfg;
    solver_cfg.restarts = cfg.restarts;
    solver_cfg.seed = Rng::mix(cfg.seed, s);
    const Eigen::MatrixXd q_m = class_basis(tr_m.colwise() - mean_m, method,
                                            cfg.components, solver_cfg);
    const Eigen::MatrixXd q_n = class_basis(tr_n.colwise() - mean_n, method,
                                            cfg.components, solver_cfg);

    auto statistic = [&](const Eigen::VectorXd& x) {
      return (q_m.transpose() * (x - mean_m)).squaredNorm() -
             (q_n.transpose() * (x - mean_n)).squaredNorm();
    };
    std::vector<char> in_train_m(static_cast<std::size_t>(n), 0);
    std::vector<char> in_train_n(static_cast<std::size_t>(n), 0);
    for (int i : train_m) in_train_m[static_cast<std::size_t>(i)] = 1;
    for (int i : train_n) in_train_n[static_cast<std::size_t>(i)] = 1;
    pos[s].reserve(static_cast<std::size_t>(held));
    neg[s].reserve(static_cast<std::size_t>(held));
    for (int i = 0; i < n; ++i) {
      if (!in_train_m[static_cast<std::size_t>(i)])
        pos[s].push_back(statistic(class_m.col(i)));
      if (!in_train_n[static_cast<std::size_t>(i)])
        neg[s].push_back(statistic(class_n.col(i)));
    }
  });

  std::vector<double> positives, negatives;
  for (std::size_t s = 0; s < splits; ++s) {
    positives.insert(positives.end(), pos[s].begin(), pos[s].end());
    negatives.insert(negatives.end(), neg[s].begin(), neg[s].end());
  }
  if (positives.empty() || negatives.empty())
    throw PreconditionError("subspace_classify: empty held-out set");

  std::sort(positives.begin(), positives.end());
  std::sort(negatives.begin(), negatives.end());
  std::vector<double> thresholds = positives;
  thresholds.insert(thresholds.end(), negatives.begin(), negatives.end());
  std::sort(thresholds.begin(), thresholds.end(), std::greater<>());
  thresholds.erase(std::unique(thresholds.begin(), thresholds.end()),
                   thresholds.end());

  auto frac_above = [](const std::vector<double>& sorted, double lambda) {
    const auto it =
        std::upper_bound(sorted.begin(), sorted.end(), lambda);
    return static_cast<double>(sorted.end() - it) /
           static_cast<double>(sorted.size());
  };

  RocCurve roc;
  roc.lambdas.reserve(thresholds.size() + 1);
  for (double lambda : thresholds) {
    roc.lambdas.push_back(lambda);
    roc.false_alarm.push_back(frac_above(negatives, lambda));
    roc.detection.push_back(frac_above(positives, lambda));
  }
  roc.lambdas.push_back(thresholds.back() - 1.0);
  roc.false_alarm.push_back(1.0);
  roc.detection.push_back(1.0);
  return roc;
}

std::pair<Eigen::MatrixXd, Eigen::MatrixXd> surrogate_classes(
    const SurrogateSpec& spec) {
  if (spec.subspace_dim < 1 || spec.rank_n < 1 ||
      spec.subspace_dim + spec.rank_n > spec.dims)
    throw PreconditionError(
        "surrogate_classes: need subspace_dim + rank_n <= dims");
  const int total = spec.subspace_dim + spec.rank_n;
  Rng rng = Rng::stream(spec.seed, {kTagClassData});
  const Eigen::MatrixXd raw = gaussian_matrix(spec.dims, total, rng);
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(raw);
  const Eigen::MatrixXd basis =
      qr.householderQ() * Eigen::MatrixXd::Identity(spec.dims, total);

  Eigen::VectorXd stds_m(spec.subspace_dim);
  for (int j = 0; j < spec.subspace_dim; ++j)
    stds_m[j] = spec.subspace_dim > 1
                    ? 3.0 - 1.5 * j / (spec.subspace_dim - 1.0)
                    : 3.0;
  const Eigen::VectorXd stds_n =
      Eigen::VectorXd::Constant(spec.rank_n, 3.0 * spec.scale_n);

  auto draw_class = [&](const Eigen::MatrixXd& sub,
                        const Eigen::VectorXd& stds) {
    Eigen::MatrixXd out(spec.dims, spec.per_class);
    for (int i = 0; i < spec.per_class; ++i) {
      const Eigen::VectorXd loading =
          stds.cwiseProduct(gaussian_vector(stds.size(), rng));
      out.col(i) = sub * loading + spec.noise * gaussian_vector(spec.dims, rng);
    }
    return out;
  };
  const Eigen::MatrixXd class_m =
      draw_class(basis.leftCols(spec.subspace_dim), stds_m);
  const Eigen::MatrixXd class_n =
      draw_class(basis.rightCols(spec.rank_n), stds_n);
  return {class_m, class_n};
}

InitStudyResult init_comparison(int dims, int samples, int trials,
                                std::uint64_t seed, int threads) {
  InitStudyResult result;
  result.svsign_flips.resize(static_cast<std::size_t>(trials));
  result.random_flips.resize(static_cast<std::size_t>(trials));
  std::vector<char> wins(static_cast<std::size_t>(trials), 0);

  parallel_for(static_cast<std::size_t>(trials), threads, [&](std::size_t t) {
    const DataMatrix x(trial_matrix(dims, samples, 0, seed, t));
    SolverConfig cfg;
    cfg.seed = Rng::mix(seed, t);

    cfg.init = InitMode::SvSign;
    const SolverReport sv = bit_flip_solve(x, cfg);
    cfg.init = InitMode::Random;
    const SolverReport rnd = bit_flip_solve(x, cfg);

    result.svsign_flips[t] = sv.flips;
    result.random_flips[t] = rnd.flips;
    wins[t] = sv.l1_metric >= rnd.l1_metric - 1e-9 * x.frobenius() ? 1 : 0;
  });

  result.svsign_win_fraction =
      std::accumulate(wins.begin(), wins.end(), 0.0) / trials;
  return result;
}

}  // namespace l1pca
