#include "schatten/spectral.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

namespace schatten {

NormOrder::NormOrder(double p) {
  if (std::isnan(p) || p < 1.0) {
    throw std::invalid_argument("Schatten order must satisfy p >= 1");
  }
  if (std::isinf(p)) {
    infinite_ = true;
    p_ = 0.0;
  } else {
    p_ = p;
  }
}

NormOrder NormOrder::infinity() {
  NormOrder order;
  order.infinite_ = true;
  order.p_ = 0.0;
  return order;
}

NormOrder NormOrder::parse(std::string_view text) {
  if (text == "inf" || text == "Inf" || text == "INF" || text == "infinity") {
    return infinity();
  }
  double value = 0.0;
  const auto* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc() || ptr != end) {
    throw std::invalid_argument("cannot parse Schatten order '" + std::string(text) + "'");
  }
  return NormOrder(value);
}

double NormOrder::value() const {
  if (infinite_) throw std::logic_error("infinite Schatten order has no finite value");
  return p_;
}

std::string NormOrder::to_string() const {
  if (infinite_) return "inf";
  std::ostringstream out;
  out.precision(12);
  out << p_;
  return out.str();
}

double InequalitySlack::tolerance() const {
  return 1e-9 * std::max({1.0, std::abs(lhs), std::abs(rhs)});
}

Spectrum dense_svd(const Eigen::MatrixXd& matrix) {
  if (matrix.rows() < 1 || matrix.cols() < 1) {
    throw std::invalid_argument("dense_svd: empty matrix");
  }
  if (!matrix.allFinite()) throw std::invalid_argument("dense_svd: non-finite entries");
  Eigen::BDCSVD<Eigen::MatrixXd> svd(matrix, Eigen::ComputeThinU | Eigen::ComputeThinV);
  return {svd.singularValues(), svd.matrixU(), svd.matrixV()};
}

Eigen::VectorXd singular_values(const Eigen::MatrixXd& matrix) {
  if (matrix.rows() == 0 || matrix.cols() == 0) return Eigen::VectorXd();
  if (!matrix.allFinite()) throw std::invalid_argument("singular_values: non-finite entries");
  Eigen::BDCSVD<Eigen::MatrixXd> svd(matrix);
  return svd.singularValues();
}

namespace {

void require_nonnegative(const Eigen::VectorXd& sigma) {
  for (double s : sigma) {
    if (!(s >= 0.0) || !std::isfinite(s)) {
      throw std::invalid_argument("singular values must be finite and non-negative");
    }
  }
}

}  // namespace

double schatten_norm(const Eigen::VectorXd& sigma, NormOrder p) {
  require_nonnegative(sigma);
  if (sigma.size() == 0) return 0.0;
  const double top = sigma.maxCoeff();
  if (top == 0.0) return 0.0;
  if (p.is_infinite()) return top;
  const double order = p.value();
  double sum = 0.0;
  for (double s : sigma) sum += std::pow(s / top, order);
  return top * std::pow(sum, 1.0 / order);
}

double schatten_norm(const Spectrum& spectrum, NormOrder p) {
  return schatten_norm(spectrum.singular_values, p);
}

double matrix_schatten_norm(const Eigen::MatrixXd& matrix, NormOrder p) {
  return schatten_norm(singular_values(matrix), p);
}

double schatten_power(const Eigen::VectorXd& sigma, double p) {
  if (!(p >= 1.0) || std::isinf(p)) {
    throw std::invalid_argument("schatten_power requires finite p >= 1");
  }
  require_nonnegative(sigma);
  double sum = 0.0;
  for (double s : sigma) sum += std::pow(s, p);
  return sum;
}

double matrix_schatten_power(const Eigen::MatrixXd& matrix, double p) {
  return schatten_power(singular_values(matrix), p);
}

double best_rank_k_error(const Eigen::VectorXd& sigma, Eigen::Index k, NormOrder p) {
  if (k < 0 || k > sigma.size()) {
    throw std::out_of_range("best_rank_k_error: k = " + std::to_string(k) +
                            " outside [0, " + std::to_string(sigma.size()) + "]");
  }
  return schatten_norm(Eigen::VectorXd(sigma.tail(sigma.size() - k)), p);
}

double best_rank_k_error(const Eigen::MatrixXd& matrix, Eigen::Index k, NormOrder p) {
  const Eigen::Index r = std::min(matrix.rows(), matrix.cols());
  if (k < 0 || k > r) {
    throw std::out_of_range("best_rank_k_error: k = " + std::to_string(k) + " outside [0, " +
                            std::to_string(r) + "]");
  }
  return best_rank_k_error(singular_values(matrix), k, p);
}

double orthonormality_defect(const Eigen::MatrixXd& basis) {
  if (basis.cols() == 0) return 0.0;
  const Eigen::MatrixXd gram = basis.transpose() * basis;
  return (gram - Eigen::MatrixXd::Identity(basis.cols(), basis.cols())).cwiseAbs().maxCoeff();
}

void require_orthonormal(const Eigen::MatrixXd& basis, double tolerance, std::string_view what) {
  const double defect = orthonormality_defect(basis);
  if (!(defect <= tolerance)) {
    throw std::invalid_argument(std::string(what) + " does not have orthonormal columns (defect " +
                                std::to_string(defect) + ")");
  }
}

double residual_cost(const Eigen::MatrixXd& matrix, const Eigen::MatrixXd& basis, NormOrder p) {
  if (basis.rows() != matrix.cols()) {
    throw std::invalid_argument("residual_cost: basis has " + std::to_string(basis.rows()) +
                                " rows, matrix has " + std::to_string(matrix.cols()) + " columns");
  }
  require_orthonormal(basis, 1e-8, "residual_cost basis");
  const Eigen::MatrixXd residual = matrix - (matrix * basis) * basis.transpose();
  return matrix_schatten_norm(residual, p);
}

SingularPair svd_2x2(double a, double b, double c, double d) {
  const double scale = std::max({std::abs(a), std::abs(b), std::abs(c), std::abs(d)});
  if (scale == 0.0 || !std::isfinite(scale)) {
    if (scale == 0.0) return {0.0, 0.0};
    throw std::invalid_argument("svd_2x2: non-finite input");
  }
  a /= scale;
  b /= scale;
  c /= scale;
  d /= scale;
  const double frob2 = a * a + b * b + c * c + d * d;
  const double root = std::hypot(a * a + b * b - c * c - d * d, 2.0 * (a * c + b * d));
  const double first = std::sqrt((frob2 + root) / 2.0);
  // sigma_1 * sigma_2 = |det|, the same closed form without the cancellation in
  // (frob2 - root) when sigma_2 << sigma_1.
  const double second = first > 0.0 ? std::min(first, std::abs(a * d - b * c) / first) : 0.0;
  return {first * scale, second * scale};
}

InequalitySlack pinching_slack(const Eigen::MatrixXd& matrix, const Eigen::MatrixXd& left_basis,
                               const Eigen::MatrixXd& right_basis, double p) {
  if (left_basis.rows() != matrix.rows() || right_basis.rows() != matrix.cols()) {
    throw std::invalid_argument("pinching_slack: basis dimensions do not match the matrix");
  }
  require_orthonormal(left_basis, 1e-8, "pinching_slack left basis");
  require_orthonormal(right_basis, 1e-8, "pinching_slack right basis");
  const Eigen::MatrixXd p_proj = left_basis * left_basis.transpose();
  const Eigen::MatrixXd q_proj = right_basis * right_basis.transpose();
  const Eigen::MatrixXd p_perp =
      Eigen::MatrixXd::Identity(matrix.rows(), matrix.rows()) - p_proj;
  const Eigen::MatrixXd q_perp =
      Eigen::MatrixXd::Identity(matrix.cols(), matrix.cols()) - q_proj;
  InequalitySlack out;
  out.lhs = matrix_schatten_power(matrix, p);
  out.rhs = matrix_schatten_power(p_proj * matrix * q_proj, p) +
            matrix_schatten_power(p_perp * matrix * q_perp, p);
  out.slack = out.lhs - out.rhs;
  return out;
}

Eigen::MatrixXd psd_power(const Eigen::MatrixXd& symmetric, double r) {
  if (symmetric.rows() != symmetric.cols()) {
    throw std::invalid_argument("psd_power: matrix must be square");
  }
  const Eigen::MatrixXd sym = 0.5 * (symmetric + symmetric.transpose());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(sym);
  if (eig.info() != Eigen::Success) throw std::runtime_error("psd_power: eigensolver failed");
  Eigen::VectorXd lambda = eig.eigenvalues();
  if (lambda.size() > 0 && lambda.minCoeff() < -1e-8) {
    throw std::invalid_argument("psd_power: matrix is not positive semidefinite (eigenvalue " +
                                std::to_string(lambda.minCoeff()) + ")");
  }
  for (double& l : lambda) l = l <= 0.0 ? 0.0 : std::pow(l, r);
  return eig.eigenvectors() * lambda.asDiagonal() * eig.eigenvectors().transpose();
}

InequalitySlack alt_slack(const Eigen::MatrixXd& a_psd, const Eigen::MatrixXd& b_psd, double r) {
  if (!(r > 0.0) || !std::isfinite(r)) throw std::invalid_argument("alt_slack: r must be > 0");
  if (a_psd.rows() != a_psd.cols() || b_psd.rows() != b_psd.cols() ||
      a_psd.rows() != b_psd.rows()) {
    throw std::invalid_argument("alt_slack: A and B must be square of equal size");
  }
  const Eigen::MatrixXd b_sym = 0.5 * (b_psd + b_psd.transpose());
  // Validate both inputs before forming products.
  const Eigen::MatrixXd a_r = psd_power(a_psd, r);
  const Eigen::MatrixXd b_r = psd_power(b_sym, r);
  InequalitySlack out;
  out.lhs = psd_power(b_sym * (0.5 * (a_psd + a_psd.transpose())) * b_sym, r).trace();
  out.rhs = (b_r * a_r * b_r).trace();
  out.slack = out.lhs - out.rhs;
  return out;
}

Eigen::MatrixXd orthonormal_range(const Eigen::MatrixXd& matrix, Eigen::Index columns) {
  const Eigen::Index dim = matrix.rows();
  if (columns > dim) {
    throw std::invalid_argument("orthonormal_range: more columns requested than dimensions");
  }
  Eigen::MatrixXd out(dim, columns);
  Eigen::Index used = 0;
  auto push = [&](Eigen::VectorXd x) {
    const double before = x.norm();
    if (!(before > 0.0)) return;
    for (int pass = 0; pass < 2; ++pass) {
      if (used > 0) x -= out.leftCols(used) * (out.leftCols(used).transpose() * x);
    }
    const double after = x.norm();
    if (after <= 1e-10 * before) return;
    out.col(used++) = x / after;
  };
  for (Eigen::Index j = 0; j < matrix.cols() && used < columns; ++j) push(matrix.col(j));
  for (Eigen::Index e = 0; e < dim && used < columns; ++e) push(Eigen::VectorXd::Unit(dim, e));
  return out;
}

}  // namespace schatten
