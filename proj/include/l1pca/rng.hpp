#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <initializer_list>

namespace l1pca {

/// Deterministic 64-bit generator (splitmix64) with hierarchical stream
/// derivation. Every trial/restart draws from its own stream obtained by
/// hashing a path of ids onto the root seed, so results do not depend on
/// scheduling or evaluation order and are stable across platforms.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  /// Hash-combine used for stream derivation.
  static std::uint64_t mix(std::uint64_t h, std::uint64_t v) noexcept;

  /// Stream for (seed, path...): e.g. stream(seed, {kTagTrial, t, r}).
  static Rng stream(std::uint64_t seed,
                    std::initializer_list<std::uint64_t> path);

  std::uint64_t next() noexcept;
  double uniform() noexcept;   // [0, 1)
  double gaussian() noexcept;  // standard normal via Box-Muller

 private:
  std::uint64_t state_;
};

Eigen::VectorXd gaussian_vector(Eigen::Index n, Rng& rng);
/// Column-major fill order (fixed as part of the reproducibility contract).
Eigen::MatrixXd gaussian_matrix(Eigen::Index rows, Eigen::Index cols, Rng& rng);

// Stream tags. Fixed constants so that artifacts are reproducible across
// releases; never renumber.
inline constexpr std::uint64_t kTagRestartK1 = 0x11;
inline constexpr std::uint64_t kTagRestartKk = 0x12;
inline constexpr std::uint64_t kTagRestartFp = 0x13;
inline constexpr std::uint64_t kTagRestartAo = 0x14;
inline constexpr std::uint64_t kTagTrial = 0x21;
inline constexpr std::uint64_t kTagLineFit = 0x22;
inline constexpr std::uint64_t kTagClassData = 0x23;
inline constexpr std::uint64_t kTagSplit = 0x24;
inline constexpr std::uint64_t kTagInitStudy = 0x25;

}  // namespace l1pca
