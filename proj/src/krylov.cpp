#include "schatten/krylov.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include <Eigen/SVD>

#include "schatten/random.hpp"
#include "schatten/spectral.hpp"

namespace schatten {

namespace {

constexpr double kDeflationTolerance = 1e-10;
constexpr double kRankTolerance = 1e-12;
constexpr double kMaxIterations = 1e12;

std::int64_t ceil_schedule(double value) {
  if (!std::isfinite(value) || value > kMaxIterations) {
    throw std::overflow_error("iteration schedule overflows");
  }
  return std::max<std::int64_t>(1, static_cast<std::int64_t>(std::ceil(value)));
}

void require_gamma(double gamma) {
  if (!(gamma > 0.0) || gamma > 1.0) {
    throw std::invalid_argument("accuracy gamma must lie in (0, 1], got " + std::to_string(gamma));
  }
}

// Orthonormal basis of a growing subspace with the images A q of its columns.
class KrylovBasis {
 public:
  KrylovBasis(Index dim, Index image_dim, Index capacity)
      : q_(dim, capacity), aq_(image_dim, capacity) {}

  Index size() const { return used_; }
  Index dim() const { return q_.rows(); }
  auto basis() const { return q_.leftCols(used_); }
  auto images() const { return aq_.leftCols(used_); }

  // Orthonormalizes the columns of `raw` against the basis (classical
  // Gram-Schmidt, applied twice) and appends the survivors. Returns the
  // accepted columns.
  Eigen::MatrixXd extend(const Eigen::MatrixXd& raw) {
    const Index start = used_;
    for (Index j = 0; j < raw.cols() && used_ < q_.cols(); ++j) {
      Eigen::VectorXd x = raw.col(j);
      const double before = x.norm();
      if (!(before > 0.0)) continue;
      for (int pass = 0; pass < 2; ++pass) {
        if (used_ > 0) x -= q_.leftCols(used_) * (q_.leftCols(used_).transpose() * x);
      }
      const double after = x.norm();
      if (after <= kDeflationTolerance * before) continue;
      q_.col(used_++) = x / after;
    }
    return q_.middleCols(start, used_ - start);
  }

  void assign_identity() {
    q_.setIdentity();
    used_ = q_.cols();
  }

  void set_images(Index start, const Eigen::MatrixXd& images) {
    aq_.middleCols(start, images.cols()) = images;
  }

 private:
  Eigen::MatrixXd q_;
  Eigen::MatrixXd aq_;
  Index used_ = 0;
};

// Pads the basis with coordinate directions until it holds `k` columns, paying
// for their images. Only reached for operators whose Krylov span collapses
// below the target rank (e.g. the zero matrix).
void complete_basis(const LinearOperator& op, KrylovBasis& basis, Index k) {
  for (Index e = 0; e < basis.dim() && basis.size() < k; ++e) {
    const Index start = basis.size();
    Eigen::MatrixXd accepted = basis.extend(Eigen::VectorXd::Unit(basis.dim(), e));
    if (accepted.cols() > 0) basis.set_images(start, op.apply_block(accepted, Side::kNormal));
  }
}

SubspaceResult rayleigh_ritz(const KrylovBasis& basis, Index k) {
  const Eigen::MatrixXd q = basis.basis();
  const Eigen::MatrixXd aq = basis.images();
  Eigen::BDCSVD<Eigen::MatrixXd> svd(aq, Eigen::ComputeFullV);
  const Eigen::VectorXd& sv = svd.singularValues();
  const Eigen::MatrixXd y = svd.matrixV().leftCols(k);

  SubspaceResult out;
  out.basis = q * y;
  out.image = aq * y;
  out.rayleigh_values = Eigen::VectorXd::Zero(k);
  const double top = sv.size() > 0 ? sv(0) : 0.0;
  for (Index i = 0; i < k && i < sv.size(); ++i) {
    out.rayleigh_values(i) = sv(i) > kRankTolerance * top ? sv(i) * sv(i) : 0.0;
  }
  out.krylov_dimension = basis.size();
  return out;
}

SubspaceResult dense_path(const LinearOperator& op, Index k) {
  const Index d = op.cols();
  KrylovBasis basis(d, op.rows(), d);
  basis.assign_identity();
  basis.set_images(0, op.apply_block(Eigen::MatrixXd::Identity(d, d), Side::kNormal));
  SubspaceResult out = rayleigh_ritz(basis, k);
  out.dense_fallback = true;
  return out;
}

// Grows span{first, (A^T A) first, ..., (A^T A)^q first} and projects.
SubspaceResult iterate(const LinearOperator& op, const Eigen::MatrixXd& first, Index k, int q) {
  const Index d = op.cols();
  const Index capacity = std::min<Index>(d, first.cols() * (static_cast<Index>(q) + 1));
  KrylovBasis basis(d, op.rows(), std::max(capacity, k));
  Eigen::MatrixXd block = basis.extend(first);
  for (int j = 0; j <= q && block.cols() > 0; ++j) {
    const Index start = basis.size() - block.cols();
    const Eigen::MatrixXd image = op.apply_block(block, Side::kNormal);
    basis.set_images(start, image);
    if (j == q || basis.size() == d) break;
    block = basis.extend(op.apply_block(image, Side::kAdjoint));
  }
  if (basis.size() < k) complete_basis(op, basis, k);
  return rayleigh_ritz(basis, k);
}

void validate(const LinearOperator& op, Index k, Index s, int q) {
  const Index d = op.cols();
  if (k < 1 || k > d) {
    throw std::invalid_argument("block_krylov: target rank " + std::to_string(k) +
                                " outside [1, " + std::to_string(d) + "]");
  }
  if (s < k || s > d) {
    throw std::invalid_argument("block_krylov: block size " + std::to_string(s) +
                                " outside [k, d] = [" + std::to_string(k) + ", " +
                                std::to_string(d) + "]");
  }
  if (q < 0) throw std::invalid_argument("block_krylov: iterations must be non-negative");
}

}  // namespace

std::int64_t gap_independent_schedule(Index d, double gamma, double c) {
  require_gamma(gamma);
  if (d < 1) throw std::invalid_argument("gap_independent_schedule: d must be >= 1");
  if (!(c > 0.0)) throw std::invalid_argument("schedule constant must be positive");
  return ceil_schedule(c * std::log(static_cast<double>(d) / gamma) / std::sqrt(gamma));
}

std::int64_t gap_dependent_schedule(Index n, double gamma, double sigma_high, double sigma_low,
                                    double c) {
  require_gamma(gamma);
  if (n < 1) throw std::invalid_argument("gap_dependent_schedule: n must be >= 1");
  if (!(c > 0.0)) throw std::invalid_argument("schedule constant must be positive");
  if (!(sigma_low >= 0.0) || !(sigma_high > sigma_low)) {
    throw std::invalid_argument(
        "gap_dependent_schedule: requires sigma_high > sigma_low >= 0; use the gap-independent "
        "schedule when there is no gap");
  }
  const double gap_factor = std::sqrt(sigma_high / (sigma_high - sigma_low));
  return ceil_schedule(c * std::log(static_cast<double>(n) / gamma) * gap_factor);
}

SubspaceResult block_krylov(const LinearOperator& op, const KrylovParams& params) {
  const Index k = params.target_rank;
  const Index s = params.block_size;
  validate(op, k, s, params.iterations);
  if (params.iterations < 1) throw std::invalid_argument("block_krylov: iterations must be >= 1");

  const QueryLedger before = op.ledger();
  SubspaceResult out;
  if (s * (static_cast<Index>(params.iterations) + 1) >= op.cols()) {
    out = dense_path(op, k);
  } else {
    const Eigen::MatrixXd gaussian = GaussianStream(params.seed).matrix(op.rows(), s);
    out = iterate(op, op.apply_block(gaussian, Side::kAdjoint), k, params.iterations);
  }
  out.queries_used = op.ledger() - before;
  return out;
}

SubspaceResult block_krylov_from(const LinearOperator& op, const Eigen::MatrixXd& start,
                                 Index target_rank, int iterations) {
  if (start.rows() != op.cols()) {
    throw DimensionError("block_krylov_from: start block has " + std::to_string(start.rows()) +
                         " rows, operator has " + std::to_string(op.cols()) + " columns");
  }
  if (!start.allFinite()) throw std::invalid_argument("block_krylov_from: non-finite start");
  validate(op, target_rank, std::max(start.cols(), target_rank), iterations);

  const QueryLedger before = op.ledger();
  SubspaceResult out;
  if (start.cols() * (static_cast<Index>(iterations) + 1) >= op.cols()) {
    out = dense_path(op, target_rank);
  } else {
    out = iterate(op, start, target_rank, iterations);
  }
  out.queries_used = op.ledger() - before;
  return out;
}

Eigen::VectorXd per_vector_errors(const Eigen::MatrixXd& matrix, const Eigen::MatrixXd& basis) {
  if (basis.rows() != matrix.cols()) {
    throw DimensionError("per_vector_errors: basis rows do not match matrix columns");
  }
  require_orthonormal(basis, 1e-8, "per_vector_errors basis");
  const Eigen::VectorXd sigma = singular_values(matrix);
  const Eigen::MatrixXd image = matrix * basis;
  Eigen::VectorXd errors(basis.cols());
  for (Index i = 0; i < basis.cols(); ++i) {
    const double s = i < sigma.size() ? sigma(i) : 0.0;
    errors(i) = s * s - image.col(i).squaredNorm();
  }
  return errors;
}

}  // namespace schatten
