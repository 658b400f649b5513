#pragma once

#include <stdexcept>
#include <string>

namespace l1pca {

/// User-supplied data could not be used (unparseable file, non-finite
/// entries, empty matrix).
class InputError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A documented precondition was violated (K > rank, enumeration guard,
/// bad configuration).
class PreconditionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Numerical failure that could not be recovered internally.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A matrix argument had fewer independent columns than required.
/// Carries the rank that was actually observed.
class RankDeficientError : public NumericalError {
 public:
  RankDeficientError(const std::string& what, long observed_rank)
      : NumericalError(what), rank_(observed_rank) {}
  long rank() const noexcept { return rank_; }

 private:
  long rank_;
};

}  // namespace l1pca
