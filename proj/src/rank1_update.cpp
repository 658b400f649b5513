#include <Eigen/Dense>
#include <algorithm>
#include <cassert>
#include <cmath>
#include <numeric>
#include <vector>

#include "l1pca/errors.hpp"
#include "l1pca/linalg.hpp"

namespace l1pca {

namespace {

struct GivensRotation {
  Eigen::Index i, j;  // rows acted on, i < j
  double c, s;
};

/// Secular function f(mu) = 1 + rho * sum_i za[i]^2 / (delta[i] - mu)
/// where delta[i] = da[i] - da[left]; monotone increasing between poles.
double secular_value(const std::vector<double>& delta,
                     const std::vector<double>& zsq, double rho, double mu) {
  double acc = 1.0;
  for (std::size_t i = 0; i < delta.size(); ++i)
    acc += rho * zsq[i] / (delta[i] - mu);
  return acc;
}

/// Root of the secular function in (0, hi), as an offset from the left pole.
/// Plain bisection; monotonicity makes it safe and the interval shrinks to
/// the last representable bit.
double secular_root(const std::vector<double>& delta,
                    const std::vector<double>& zsq, double rho, double hi) {
  double lo = 0.0;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (secular_value(delta, zsq, rho, mid) < 0.0)
      lo = mid;
    else
      hi = mid;
  }
  return 0.5 * (lo + hi);
}

EigUpdateResult diagonal_result(const Eigen::VectorXd& p, bool want_vectors) {
  const Eigen::Index n = p.size();
  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](Eigen::Index a, Eigen::Index b) { return p[a] > p[b]; });
  EigUpdateResult out;
  out.eigenvalues.resize(n);
  if (want_vectors) out.eigenvectors = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index k = 0; k < n; ++k) {
    out.eigenvalues[k] = p[order[static_cast<std::size_t>(k)]];
    if (want_vectors)
      out.eigenvectors(order[static_cast<std::size_t>(k)], k) = 1.0;
  }
  return out;
}

}  // namespace

EigUpdateResult rank1_eig_update(const Eigen::VectorXd& p,
                                 const Eigen::VectorXd& z, double rho,
                                 bool want_vectors) {
  const Eigen::Index n = p.size();
  if (n == 0) throw PreconditionError("rank1_eig_update: empty diagonal");
  if (z.size() != n)
    throw PreconditionError("rank1_eig_update: size mismatch between p and z");
  if (!p.allFinite() || !z.allFinite() || !std::isfinite(rho))
    throw InputError("rank1_eig_update: non-finite input");

  if (rho == 0.0 || z.squaredNorm() == 0.0) return diagonal_result(p, want_vectors);

  if (rho < 0.0) {
    // diag(p) + rho zz^T = -(diag(-p) + (-rho) zz^T)
    EigUpdateResult inner = rank1_eig_update(-p, z, -rho, want_vectors);
    EigUpdateResult out;
    out.eigenvalues = (-inner.eigenvalues).reverse();
    if (want_vectors) out.eigenvectors = inner.eigenvectors.rowwise().reverse();
    return out;
  }

  // Sort ascending; work in the permuted basis throughout.
  std::vector<Eigen::Index> perm(static_cast<std::size_t>(n));
  std::iota(perm.begin(), perm.end(), 0);
  std::stable_sort(perm.begin(), perm.end(),
                   [&](Eigen::Index a, Eigen::Index b) { return p[a] < p[b]; });
  Eigen::VectorXd d(n), zz(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    d[i] = p[perm[static_cast<std::size_t>(i)]];
    zz[i] = z[perm[static_cast<std::size_t>(i)]];
  }

  const double defl_tol = 1e-12 * p.cwiseAbs().maxCoeff();

  // Merge (nearly) repeated diagonal entries: a Givens rotation moves the
  // z-weight of the run into its last element and deflates the rest.
  std::vector<GivensRotation> rotations;
  for (Eigen::Index i = 0; i + 1 < n; ++i) {
    if (d[i + 1] - d[i] > defl_tol) continue;
    if (zz[i] == 0.0) continue;
    const double r = std::hypot(zz[i], zz[i + 1]);
    const double c = zz[i + 1] / r;
    const double s = zz[i] / r;
    rotations.push_back({i, i + 1, c, s});
    zz[i] = 0.0;
    zz[i + 1] = r;
  }

  std::vector<Eigen::Index> active;
  for (Eigen::Index i = 0; i < n; ++i)
    if (rho * zz[i] * zz[i] > defl_tol) active.push_back(i);

  const std::size_t na = active.size();
  Eigen::VectorXd values(n);
  Eigen::MatrixXd vectors;
  if (want_vectors) vectors = Eigen::MatrixXd::Zero(n, n);

  // Deflated coordinates contribute their diagonal entries unchanged.
  std::vector<bool> is_active(static_cast<std::size_t>(n), false);
  for (Eigen::Index i : active) is_active[static_cast<std::size_t>(i)] = true;
  Eigen::Index slot = 0;
  for (Eigen::Index i = 0; i < n; ++i) {
    if (is_active[static_cast<std::size_t>(i)]) continue;
    values[slot] = d[i];
    if (want_vectors) vectors(i, slot) = 1.0;
    ++slot;
  }

  if (na > 0) {
    std::vector<double> da(na), za(na), zsq(na), mu(na);
    for (std::size_t j = 0; j < na; ++j) {
      da[j] = d[active[j]];
      za[j] = zz[active[j]];
      zsq[j] = za[j] * za[j];
    }
    const double zn2 = std::accumulate(zsq.begin(), zsq.end(), 0.0);

    for (std::size_t j = 0; j < na; ++j) {
      std::vector<double> delta(na);
      for (std::size_t i = 0; i < na; ++i) delta[i] = da[i] - da[j];
      double hi;
      if (j + 1 < na) {
        hi = da[j + 1] - da[j];
      } else {
        hi = rho * zn2;
        // f(rho*||z||^2) >= 0 in exact arithmetic; expand on rounding.
        int guard = 0;
        while (secular_value(delta, zsq, rho, hi) < 0.0 && guard++ < 64)
          hi *= 2.0;
      }
      mu[j] = secular_root(delta, zsq, rho, hi);
    }

    // Recompute z against the computed roots so the eigenvectors are the
    // exact ones of a nearby problem and stay numerically orthogonal.
    std::vector<double> zhat(na);
    if (want_vectors) {
      for (std::size_t i = 0; i < na; ++i) {
        double ratio = mu[i] / rho;
        for (std::size_t j = 0; j < na; ++j) {
          if (j == i) continue;
          const double dd = da[j] - da[i];
          ratio *= (dd + mu[j]) / dd;
        }
        zhat[i] = std::copysign(std::sqrt(std::max(ratio, 0.0)), za[i]);
      }
    }

    for (std::size_t j = 0; j < na; ++j) {
      values[slot] = da[j] + mu[j];
      if (want_vectors) {
        Eigen::VectorXd v = Eigen::VectorXd::Zero(n);
        if (mu[j] == 0.0) {
          v[active[j]] = 1.0;
        } else {
          for (std::size_t i = 0; i < na; ++i)
            v[active[i]] = zhat[i] / ((da[i] - da[j]) - mu[j]);
          v.normalize();
        }
        vectors.col(slot) = v;
      }
      ++slot;
    }
  }

  if (want_vectors) {
    // Undo the merge rotations (reverse order), then the sort permutation.
    for (auto it = rotations.rbegin(); it != rotations.rend(); ++it) {
      const Eigen::VectorXd row_i = vectors.row(it->i);
      const Eigen::VectorXd row_j = vectors.row(it->j);
      vectors.row(it->i) = it->c * row_i + it->s * row_j;
      vectors.row(it->j) = -it->s * row_i + it->c * row_j;
    }
    Eigen::MatrixXd unsorted(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
      unsorted.row(perm[static_cast<std::size_t>(i)]) = vectors.row(i);
    vectors = std::move(unsorted);
  }

  // Order nonincreasing.
  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) {
    return values[a] > values[b];
  });
  EigUpdateResult out;
  out.eigenvalues.resize(n);
  if (want_vectors) out.eigenvectors.resize(n, n);
  for (Eigen::Index k = 0; k < n; ++k) {
    out.eigenvalues[k] = values[order[static_cast<std::size_t>(k)]];
    if (want_vectors)
      out.eigenvectors.col(k) = vectors.col(order[static_cast<std::size_t>(k)]);
  }

#ifndef NDEBUG
  {  // trace conservation
    const double got = out.eigenvalues.sum();
    const double expect = p.sum() + rho * z.squaredNorm();
    const double scale =
        std::max({std::abs(expect), p.cwiseAbs().maxCoeff(), 1.0});
    assert(std::abs(got - expect) <= 1e-9 * scale);
  }
#endif
  return out;
}

}  // namespace l1pca
