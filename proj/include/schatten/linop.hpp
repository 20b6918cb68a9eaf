#pragma once

#include <atomic>
#include <cstdint>
#include <memory>
#include <span>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/SparseCore>

namespace schatten {

using Index = Eigen::Index;

/// Raised when vector or matrix dimensions do not fit the operator.
class DimensionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct OperatorShape {
  Index rows = 0;
  Index cols = 0;

  bool operator==(const OperatorShape&) const = default;
};

/// Snapshot of the matrix-vector product counters of an operator.
struct QueryLedger {
  std::uint64_t applies = 0;          // products A v
  std::uint64_t adjoint_applies = 0;  // products A^T v

  std::uint64_t total() const { return applies + adjoint_applies; }

  QueryLedger& operator+=(const QueryLedger& other) {
    applies += other.applies;
    adjoint_applies += other.adjoint_applies;
    return *this;
  }
  friend QueryLedger operator+(QueryLedger a, const QueryLedger& b) { return a += b; }
  /// Counter delta; `later` must have been taken after `earlier`.
  friend QueryLedger operator-(const QueryLedger& later, const QueryLedger& earlier) {
    return {later.applies - earlier.applies,
            later.adjoint_applies - earlier.adjoint_applies};
  }
  bool operator==(const QueryLedger&) const = default;
};

enum class Side { kNormal, kAdjoint };

enum class PolynomialKind {
  kGramPower,   // (A^T A)^l, d x d
  kAGramPower,  // A (A^T A)^l, n x d
};

struct Triplet {
  Index row = 0;
  Index col = 0;
  double value = 0.0;
};

struct DenseBacking {
  Eigen::MatrixXd matrix;
};
struct DiagonalBacking {
  Eigen::VectorXd values;
};
/// Zero-indexed coordinate entries. Duplicate coordinates are summed.
struct SparseBacking {
  Index rows = 0;
  Index cols = 0;
  std::vector<Triplet> entries;
};

using BackingDescriptor = std::variant<DenseBacking, DiagonalBacking, SparseBacking>;

inline constexpr int kMaxPolynomialDegree = 64;

class LinearOperator;
struct PolynomialSpec;

LinearOperator build_operator(BackingDescriptor descriptor);

/// (A^T A)^l or A (A^T A)^l evaluated by repeated products with `spec.base`.
/// The result shares the base's ledger, so one product with it charges the
/// full chain: l + l for GRAM_POWER, l + 1 normal and l adjoint for
/// A_GRAM_POWER (mirrored for its adjoint).
LinearOperator polynomial_operator(const PolynomialSpec& spec,
                                   int max_degree = kMaxPolynomialDegree);

/// An implicit matrix reachable only through counted products.
///
/// The backing data is immutable and shared between copies. The ledger is
/// shared as well: copies and `transposed()` views charge the same counters,
/// always against the orientation of the original matrix (a NORMAL product
/// with the transposed view is an adjoint product with the original).
/// `clone()` yields an operator over the same data with fresh counters.
/// `apply` is safe to call from several threads at once.
class LinearOperator {
 public:
  static LinearOperator dense(Eigen::MatrixXd matrix);
  static LinearOperator diagonal(Eigen::VectorXd values);
  static LinearOperator identity(Index n);
  static LinearOperator sparse(Index rows, Index cols, std::span<const Triplet> entries);

  OperatorShape shape() const;
  Index rows() const { return shape().rows; }
  Index cols() const { return shape().cols; }

  /// A v (NORMAL) or A^T v (ADJOINT). Charges one product.
  Eigen::VectorXd apply(const Eigen::VectorXd& v, Side side = Side::kNormal) const;

  /// Applies to every column of `block`; charges one product per column.
  Eigen::MatrixXd apply_block(const Eigen::MatrixXd& block, Side side = Side::kNormal) const;

  QueryLedger ledger() const;

  LinearOperator transposed() const;
  LinearOperator clone() const;

  /// Explicit matrix in this view's orientation. Not charged; oracle use only.
  Eigen::MatrixXd to_dense() const;

  std::string describe() const;

  struct Backing;
  struct LedgerState {
    std::atomic<std::uint64_t> applies{0};
    std::atomic<std::uint64_t> adjoint_applies{0};
  };

 private:
  LinearOperator(std::shared_ptr<const Backing> backing, std::shared_ptr<LedgerState> ledger,
                 bool transposed);

  Eigen::MatrixXd apply_unchecked(const Eigen::MatrixXd& block, Side side) const;

  std::shared_ptr<const Backing> backing_;
  std::shared_ptr<LedgerState> ledger_;
  bool transposed_ = false;

  friend LinearOperator build_operator(BackingDescriptor descriptor);
  friend LinearOperator polynomial_operator(const PolynomialSpec& spec, int max_degree);
};

struct PolynomialSpec {
  LinearOperator base;
  int degree = 0;
  PolynomialKind kind = PolynomialKind::kGramPower;
};

/// Current counters of `op`; does not mutate anything.
inline QueryLedger ledger_report(const LinearOperator& op) { return op.ledger(); }

}  // namespace schatten
