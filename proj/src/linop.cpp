#include "schatten/linop.hpp"

#include <cmath>
#include <sstream>

namespace schatten {

struct LinearOperator::Backing {
  struct Dense {
    Eigen::MatrixXd matrix;
  };
  struct Diagonal {
    Eigen::VectorXd values;
  };
  struct Sparse {
    Eigen::SparseMatrix<double> matrix;
  };
  struct Polynomial {
    LinearOperator base;
    int degree;
    PolynomialKind kind;
  };

  std::variant<Dense, Diagonal, Sparse, Polynomial> data;
  OperatorShape shape;
};

namespace {

void require_positive_shape(Index rows, Index cols) {
  if (rows < 1 || cols < 1) {
    throw DimensionError("operator shape must be at least 1 x 1, got " + std::to_string(rows) +
                         " x " + std::to_string(cols));
  }
}

Side flip(Side side) { return side == Side::kNormal ? Side::kAdjoint : Side::kNormal; }

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

}  // namespace

LinearOperator::LinearOperator(std::shared_ptr<const Backing> backing,
                               std::shared_ptr<LedgerState> ledger, bool transposed)
    : backing_(std::move(backing)), ledger_(std::move(ledger)), transposed_(transposed) {}

LinearOperator build_operator(BackingDescriptor descriptor) {
  auto backing = std::make_shared<LinearOperator::Backing>();
  std::visit(
      Overloaded{
          [&](DenseBacking& d) {
            require_positive_shape(d.matrix.rows(), d.matrix.cols());
            if (!d.matrix.allFinite()) {
              throw std::invalid_argument("dense operator has non-finite entries");
            }
            backing->shape = {d.matrix.rows(), d.matrix.cols()};
            backing->data = LinearOperator::Backing::Dense{std::move(d.matrix)};
          },
          [&](DiagonalBacking& d) {
            require_positive_shape(d.values.size(), d.values.size());
            if (!d.values.allFinite()) {
              throw std::invalid_argument("diagonal operator has non-finite entries");
            }
            backing->shape = {d.values.size(), d.values.size()};
            backing->data = LinearOperator::Backing::Diagonal{std::move(d.values)};
          },
          [&](SparseBacking& s) {
            require_positive_shape(s.rows, s.cols);
            std::vector<Eigen::Triplet<double>> triplets;
            triplets.reserve(s.entries.size());
            for (const Triplet& t : s.entries) {
              if (t.row < 0 || t.row >= s.rows || t.col < 0 || t.col >= s.cols) {
                throw DimensionError("sparse entry (" + std::to_string(t.row) + ", " +
                                     std::to_string(t.col) + ") outside " +
                                     std::to_string(s.rows) + " x " + std::to_string(s.cols));
              }
              if (!std::isfinite(t.value)) {
                throw std::invalid_argument("sparse operator has non-finite entries");
              }
              triplets.emplace_back(t.row, t.col, t.value);
            }
            Eigen::SparseMatrix<double> m(s.rows, s.cols);
            // setFromTriplets sums duplicates.
            m.setFromTriplets(triplets.begin(), triplets.end());
            backing->shape = {s.rows, s.cols};
            backing->data = LinearOperator::Backing::Sparse{std::move(m)};
          },
      },
      descriptor);
  return LinearOperator(std::move(backing), std::make_shared<LinearOperator::LedgerState>(),
                        false);
}

LinearOperator LinearOperator::dense(Eigen::MatrixXd matrix) {
  return build_operator(DenseBacking{std::move(matrix)});
}

LinearOperator LinearOperator::diagonal(Eigen::VectorXd values) {
  return build_operator(DiagonalBacking{std::move(values)});
}

LinearOperator LinearOperator::identity(Index n) {
  return diagonal(Eigen::VectorXd::Ones(n));
}

LinearOperator LinearOperator::sparse(Index rows, Index cols, std::span<const Triplet> entries) {
  return build_operator(SparseBacking{rows, cols, {entries.begin(), entries.end()}});
}

LinearOperator polynomial_operator(const PolynomialSpec& spec, int max_degree) {
  if (spec.degree < 0) {
    throw std::invalid_argument("polynomial degree must be non-negative");
  }
  if (spec.degree > max_degree) {
    throw std::invalid_argument("polynomial degree " + std::to_string(spec.degree) +
                                " exceeds maximum " + std::to_string(max_degree));
  }
  auto backing = std::make_shared<LinearOperator::Backing>();
  const OperatorShape base = spec.base.shape();
  backing->shape = spec.kind == PolynomialKind::kGramPower ? OperatorShape{base.cols, base.cols}
                                                           : OperatorShape{base.rows, base.cols};
  backing->data = LinearOperator::Backing::Polynomial{spec.base, spec.degree, spec.kind};
  return LinearOperator(std::move(backing), spec.base.ledger_, false);
}

OperatorShape LinearOperator::shape() const {
  const OperatorShape s = backing_->shape;
  return transposed_ ? OperatorShape{s.cols, s.rows} : s;
}

Eigen::VectorXd LinearOperator::apply(const Eigen::VectorXd& v, Side side) const {
  return apply_block(v, side).col(0);
}

Eigen::MatrixXd LinearOperator::apply_block(const Eigen::MatrixXd& block, Side side) const {
  const OperatorShape s = shape();
  const Index expected = side == Side::kNormal ? s.cols : s.rows;
  if (block.rows() != expected) {
    throw DimensionError("operator " + describe() + " expects vectors of length " +
                         std::to_string(expected) + " for " +
                         (side == Side::kNormal ? "NORMAL" : "ADJOINT") + " products, got " +
                         std::to_string(block.rows()));
  }
  if (!block.allFinite()) {
    throw std::invalid_argument("apply: input has non-finite entries");
  }
  return apply_unchecked(block, side);
}

Eigen::MatrixXd LinearOperator::apply_unchecked(const Eigen::MatrixXd& block, Side side) const {
  const Side eff = transposed_ ? flip(side) : side;
  const auto count = static_cast<std::uint64_t>(block.cols());
  auto charge = [&] {
    if (eff == Side::kNormal) {
      ledger_->applies.fetch_add(count, std::memory_order_relaxed);
    } else {
      ledger_->adjoint_applies.fetch_add(count, std::memory_order_relaxed);
    }
  };
  return std::visit(
      Overloaded{
          [&](const Backing::Dense& d) -> Eigen::MatrixXd {
            charge();
            if (eff == Side::kNormal) return d.matrix * block;
            return d.matrix.transpose() * block;
          },
          [&](const Backing::Diagonal& d) -> Eigen::MatrixXd {
            charge();
            return d.values.asDiagonal() * block;
          },
          [&](const Backing::Sparse& sp) -> Eigen::MatrixXd {
            charge();
            if (eff == Side::kNormal) return sp.matrix * block;
            return sp.matrix.transpose() * block;
          },
          [&](const Backing::Polynomial& poly) -> Eigen::MatrixXd {
            // The base charges its (shared) ledger for every link of the chain.
            Eigen::MatrixXd x = block;
            const bool leading_a = poly.kind == PolynomialKind::kAGramPower;
            if (leading_a && eff == Side::kAdjoint) {
              x = poly.base.apply_unchecked(x, Side::kAdjoint);
            }
            for (int i = 0; i < poly.degree; ++i) {
              x = poly.base.apply_unchecked(x, Side::kNormal);
              x = poly.base.apply_unchecked(x, Side::kAdjoint);
            }
            if (leading_a && eff == Side::kNormal) {
              x = poly.base.apply_unchecked(x, Side::kNormal);
            }
            return x;
          },
      },
      backing_->data);
}

QueryLedger LinearOperator::ledger() const {
  return {ledger_->applies.load(std::memory_order_relaxed),
          ledger_->adjoint_applies.load(std::memory_order_relaxed)};
}

LinearOperator LinearOperator::transposed() const {
  return LinearOperator(backing_, ledger_, !transposed_);
}

LinearOperator LinearOperator::clone() const {
  if (const auto* poly = std::get_if<Backing::Polynomial>(&backing_->data)) {
    LinearOperator fresh =
        polynomial_operator({poly->base.clone(), poly->degree, poly->kind}, poly->degree);
    fresh.transposed_ = transposed_;
    return fresh;
  }
  return LinearOperator(backing_, std::make_shared<LedgerState>(), transposed_);
}

Eigen::MatrixXd LinearOperator::to_dense() const {
  Eigen::MatrixXd m = std::visit(
      Overloaded{
          [](const Backing::Dense& d) -> Eigen::MatrixXd { return d.matrix; },
          [](const Backing::Diagonal& d) -> Eigen::MatrixXd {
            return d.values.asDiagonal().toDenseMatrix();
          },
          [](const Backing::Sparse& sp) -> Eigen::MatrixXd { return Eigen::MatrixXd(sp.matrix); },
          [](const Backing::Polynomial& poly) -> Eigen::MatrixXd {
            const Eigen::MatrixXd a = poly.base.to_dense();
            const Eigen::MatrixXd gram = a.transpose() * a;
            Eigen::MatrixXd power = Eigen::MatrixXd::Identity(a.cols(), a.cols());
            for (int i = 0; i < poly.degree; ++i) power = power * gram;
            if (poly.kind == PolynomialKind::kAGramPower) return a * power;
            return power;
          },
      },
      backing_->data);
  if (transposed_) return m.transpose();
  return m;
}

std::string LinearOperator::describe() const {
  std::ostringstream out;
  const OperatorShape s = shape();
  std::visit(Overloaded{
                 [&](const Backing::Dense&) { out << "dense"; },
                 [&](const Backing::Diagonal&) { out << "diagonal"; },
                 [&](const Backing::Sparse&) { out << "sparse"; },
                 [&](const Backing::Polynomial& p) {
                   out << (p.kind == PolynomialKind::kGramPower ? "(A^T A)^" : "A (A^T A)^")
                       << p.degree;
                 },
             },
             backing_->data);
  out << ' ' << s.rows << 'x' << s.cols;
  if (transposed_) out << " (transposed)";
  return out.str();
}

}  // namespace schatten
