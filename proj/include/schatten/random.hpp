#pragma once

#include <cstdint>

#include <Eigen/Dense>

namespace schatten {

/// Counter-based Gaussian source. Entry `i` of stream `s` is a pure function
/// of (seed, s, i), so blocks can be regenerated in any order and the
/// sequence does not depend on the standard library's distributions.
class GaussianStream {
 public:
  explicit GaussianStream(std::uint64_t seed, std::uint64_t stream = 0)
      : seed_(seed), stream_(stream) {}

  /// Standard normal sample at position `index`.
  double normal(std::uint64_t index) const;

  /// Uniform sample in (0, 1) at position `index`.
  double uniform(std::uint64_t index) const;

  /// rows x cols matrix of N(0, 1) entries, filled column-major from index 0.
  Eigen::MatrixXd matrix(Eigen::Index rows, Eigen::Index cols) const;

  std::uint64_t seed() const { return seed_; }
  std::uint64_t stream() const { return stream_; }

 private:
  std::uint64_t seed_;
  std::uint64_t stream_;
};

/// SplitMix64 finalizer; used for seed derivation.
std::uint64_t mix64(std::uint64_t x);

/// Deterministic child seed for a labelled sub-computation.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t label);

/// Haar-distributed rows x cols matrix with orthonormal columns (rows >= cols).
Eigen::MatrixXd random_orthonormal(Eigen::Index rows, Eigen::Index cols,
                                   std::uint64_t seed);

}  // namespace schatten
