#pragma once

#include <cstdint>

#include <Eigen/Dense>

#include "schatten/linop.hpp"

namespace schatten {

/// Multiplier applied inside every O(.) iteration schedule unless overridden.
inline constexpr double kDefaultScheduleConstant = 4.0;

struct KrylovParams {
  Index target_rank = 1;  // k
  Index block_size = 1;   // s, k <= s <= d
  int iterations = 1;     // q >= 1
  std::uint64_t seed = 0;
};

struct SubspaceResult {
  Eigen::MatrixXd basis;            // d x k, orthonormal columns
  Eigen::VectorXd rayleigh_values;  // ||A z_i||^2, descending
  Eigen::MatrixXd image;            // A * basis, recovered from products already paid for
  QueryLedger queries_used;
  Index krylov_dimension = 0;       // columns of the orthonormal Krylov basis
  bool dense_fallback = false;
};

/// q = ceil(c ln(d / gamma) / sqrt(gamma)), at least 1.
std::int64_t gap_independent_schedule(Index d, double gamma, double c = kDefaultScheduleConstant);

/// q = ceil(c ln(n / gamma) sqrt(high / (high - low))), at least 1.
/// Throws when there is no gap (high <= low).
std::int64_t gap_dependent_schedule(Index n, double gamma, double sigma_high, double sigma_low,
                                    double c = kDefaultScheduleConstant);

/// Block Krylov iteration on `op` (n x d) from an n x s Gaussian block U:
/// span{A^T U, (A^T A) A^T U, ..., (A^T A)^q A^T U}, followed by
/// Rayleigh-Ritz. Every new block is orthogonalized against the basis built
/// so far before the next product, so the span is the Krylov span without
/// ever forming the ill-conditioned Krylov matrix.
///
/// Products: s(q+1) adjoint and s(q+1) normal (the last block's image is
/// needed for Rayleigh-Ritz), fewer if blocks deflate. When s(q+1) >= d the
/// span is all of R^d and the run switches to the exact dense path
/// (d normal products against the identity).
SubspaceResult block_krylov(const LinearOperator& op, const KrylovParams& params);

/// Same iteration started from an explicit d x s block on the right side:
/// span{V, (A^T A) V, ..., (A^T A)^q V}. Used to polish a known vector.
SubspaceResult block_krylov_from(const LinearOperator& op, const Eigen::MatrixXd& start,
                                 Index target_rank, int iterations);

/// sigma_i(A)^2 - ||A Z_{*,i}||^2 for every column of Z.
Eigen::VectorXd per_vector_errors(const Eigen::MatrixXd& matrix, const Eigen::MatrixXd& basis);

}  // namespace schatten
