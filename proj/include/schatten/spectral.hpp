#pragma once

#include <string>
#include <string_view>

#include <Eigen/Dense>

namespace schatten {

/// Order p of a Schatten norm: a real p >= 1 or the distinguished value
/// infinity (spectral norm).
class NormOrder {
 public:
  /// Implicit so call sites can pass `2.0`. Throws for p < 1 or NaN; +inf
  /// maps to the distinguished infinite order.
  NormOrder(double p);  // NOLINT(google-explicit-constructor)

  static NormOrder infinity();
  /// Accepts a decimal number or "inf".
  static NormOrder parse(std::string_view text);

  bool is_infinite() const { return infinite_; }
  /// Finite order; throws for infinity.
  double value() const;
  std::string to_string() const;

  bool operator==(const NormOrder&) const = default;

 private:
  NormOrder() = default;
  double p_ = 2.0;
  bool infinite_ = false;
};

/// Thin SVD: A ~ left * diag(singular_values) * right^T, values descending.
struct Spectrum {
  Eigen::VectorXd singular_values;
  Eigen::MatrixXd left;
  Eigen::MatrixXd right;
};

/// slack = lhs - rhs. Which sign is "satisfied" depends on the inequality.
struct InequalitySlack {
  double lhs = 0.0;
  double rhs = 0.0;
  double slack = 0.0;

  /// Floating-point allowance 1e-9 * max(1, |lhs|, |rhs|).
  double tolerance() const;
};

struct SingularPair {
  double first = 0.0;
  double second = 0.0;
};

Spectrum dense_svd(const Eigen::MatrixXd& matrix);
Eigen::VectorXd singular_values(const Eigen::MatrixXd& matrix);

/// (sum sigma_i^p)^(1/p), or sigma_max for p = infinity. Scaled by the
/// largest value so large p neither overflows nor underflows.
double schatten_norm(const Eigen::VectorXd& sigma, NormOrder p);
double schatten_norm(const Spectrum& spectrum, NormOrder p);
double matrix_schatten_norm(const Eigen::MatrixXd& matrix, NormOrder p);

/// sum sigma_i^p for finite p.
double schatten_power(const Eigen::VectorXd& sigma, double p);
double matrix_schatten_power(const Eigen::MatrixXd& matrix, double p);

/// Optimal rank-k error (tail of the spectrum), 0 <= k <= min(n, d).
double best_rank_k_error(const Eigen::MatrixXd& matrix, Eigen::Index k, NormOrder p);
double best_rank_k_error(const Eigen::VectorXd& sigma, Eigen::Index k, NormOrder p);

/// || A (I - Z Z^T) ||_p for Z with orthonormal columns (checked to 1e-8).
double residual_cost(const Eigen::MatrixXd& matrix, const Eigen::MatrixXd& basis, NormOrder p);

/// Closed-form singular values of [[a, b], [c, d]].
SingularPair svd_2x2(double a, double b, double c, double d);

/// ||A||_p^p - ||P A Q||_p^p - ||(I-P) A (I-Q)||_p^p with P, Q the
/// projectors onto the given orthonormal bases. Non-negative in exact
/// arithmetic for every p >= 1.
InequalitySlack pinching_slack(const Eigen::MatrixXd& matrix, const Eigen::MatrixXd& left_basis,
                               const Eigen::MatrixXd& right_basis, double p);

/// tr((BAB)^r) - tr(B^r A^r B^r) for PSD A, B. Non-positive for r >= 1,
/// non-negative for 0 < r < 1, zero at r = 1.
InequalitySlack alt_slack(const Eigen::MatrixXd& a_psd, const Eigen::MatrixXd& b_psd, double r);

/// S^r for symmetric PSD S through its eigendecomposition. Inputs are
/// symmetrized; eigenvalues below -1e-8 are rejected, the rest clamped at 0.
Eigen::MatrixXd psd_power(const Eigen::MatrixXd& symmetric, double r);

/// max |Z^T Z - I|.
double orthonormality_defect(const Eigen::MatrixXd& basis);
void require_orthonormal(const Eigen::MatrixXd& basis, double tolerance, std::string_view what);

/// Orthonormal basis for the column span of `matrix`, completed with
/// coordinate directions to exactly `columns` columns when the span is
/// smaller (rank-deficient inputs). Deterministic.
Eigen::MatrixXd orthonormal_range(const Eigen::MatrixXd& matrix, Eigen::Index columns);

}  // namespace schatten
