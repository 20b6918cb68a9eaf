#include "schatten/verify.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <sstream>

#include <Eigen/Dense>

#include "schatten/hardness.hpp"
#include "schatten/krylov.hpp"
#include "schatten/linop.hpp"
#include "schatten/random.hpp"
#include "schatten/spectral.hpp"

namespace schatten {

namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;

constexpr double kSlack = 1e-9;

double scaled(double a, double b) { return kSlack * std::max({1.0, std::abs(a), std::abs(b)}); }

TrialOutcome at_least(double lhs, double rhs) { return {lhs - rhs, scaled(lhs, rhs)}; }

MatrixXd gaussian(std::uint64_t seed, std::uint64_t stream, Index rows, Index cols) {
  return GaussianStream(seed, stream).matrix(rows, cols);
}

VectorXd unit(std::uint64_t seed, std::uint64_t stream, Index dim) {
  return gaussian(seed, stream, dim, 1).col(0).normalized();
}

MatrixXd random_psd(std::uint64_t seed, std::uint64_t stream, Index dim) {
  const MatrixXd g = gaussian(seed, stream, dim, dim);
  return g * g.transpose();
}

template <typename T, std::size_t N>
const T& pick(const T (&grid)[N], int index) {
  return grid[static_cast<std::size_t>(index) % N];
}

TrialOutcome worst(std::initializer_list<TrialOutcome> outcomes) {
  TrialOutcome out{std::numeric_limits<double>::infinity(), 0.0};
  for (const TrialOutcome& o : outcomes) {
    if (o.margin + o.tolerance < out.margin + out.tolerance) out = o;
  }
  return out;
}

// ||A||_p^p >= ||P A Q||_p^p + ||(I-P) A (I-Q)||_p^p, rank-3 P and Q.
TrialOutcome pinching(std::uint64_t seed, int index) {
  const double grid[] = {1.0, 1.5, 2.0, 4.0, 9.0};
  const MatrixXd a = gaussian(seed, 0, 12, 10);
  const MatrixXd left = random_orthonormal(12, 3, derive_seed(seed, 1));
  const MatrixXd right = random_orthonormal(10, 3, derive_seed(seed, 2));
  const InequalitySlack s = pinching_slack(a, left, right, pick(grid, index));
  return {s.slack, s.tolerance()};
}

// tr((BAB)^r) against tr(B^r A^r B^r): >= for r < 1, <= for r > 1, = at 1.
TrialOutcome alt(std::uint64_t seed, int index) {
  const double grid[] = {0.25, 0.5, 0.75, 1.0, 1.5, 2.0};
  const double r = pick(grid, index);
  const InequalitySlack s = alt_slack(random_psd(seed, 0, 6), random_psd(seed, 1, 6), r);
  if (r < 1.0) return {s.slack, s.tolerance()};
  if (r > 1.0) return {-s.slack, s.tolerance()};
  return {-std::abs(s.slack), s.tolerance()};
}

// ||A B||_p <= ||A||_q ||B||_r with 1/p = 1/q + 1/r.
TrialOutcome holder(std::uint64_t seed, int index) {
  struct Orders {
    double q;
    double r;
  };
  const Orders grid[] = {{2, 2}, {3, 3}, {4, 4}, {3, 6}, {4, 2}, {1e300, 2}, {1e300, 1}};
  const Orders o = pick(grid, index);
  const NormOrder q = o.q > 1e299 ? NormOrder::infinity() : NormOrder(o.q);
  const double inv_p = (q.is_infinite() ? 0.0 : 1.0 / o.q) + 1.0 / o.r;
  const MatrixXd a = gaussian(seed, 0, 6, 5);
  const MatrixXd b = gaussian(seed, 1, 5, 7);
  return at_least(matrix_schatten_norm(a, q) * matrix_schatten_norm(b, o.r),
                  matrix_schatten_norm(a * b, 1.0 / inv_p));
}

TrialOutcome unitary(std::uint64_t seed, int index) {
  const NormOrder grid[] = {1.0, 1.5, 2.0, 3.0, NormOrder::infinity()};
  const NormOrder p = pick(grid, index);
  const MatrixXd a = gaussian(seed, 0, 8, 6);
  const MatrixXd u = random_orthonormal(8, 8, derive_seed(seed, 1));
  const MatrixXd v = random_orthonormal(6, 6, derive_seed(seed, 2));
  const double lhs = matrix_schatten_norm(u * a * v.transpose(), p);
  const double rhs = matrix_schatten_norm(a, p);
  return {-std::abs(lhs - rhs), scaled(lhs, rhs)};
}

// p -> ||sigma||_p is non-increasing, ending at the spectral norm.
TrialOutcome monotone(std::uint64_t seed, int) {
  const NormOrder grid[] = {1.0, 1.25, 1.5, 2.0, 3.0, 4.0, 8.0, 32.0, NormOrder::infinity()};
  const VectorXd sigma = gaussian(seed, 0, 9, 1).col(0).cwiseAbs();
  TrialOutcome out{std::numeric_limits<double>::infinity(), 0.0};
  for (std::size_t i = 0; i + 1 < std::size(grid); ++i) {
    const TrialOutcome step = at_least(schatten_norm(sigma, grid[i]), schatten_norm(sigma, grid[i + 1]));
    out = worst({out, step});
  }
  return out;
}

// ||M||_p <= ||C_{M,p}||_p for row-aligned blocks, p >= 2.
TrialOutcome compression(std::uint64_t seed, int index) {
  const double grid[] = {2.0, 3.0, 4.0, 8.0};
  const double p = pick(grid, index);
  const MatrixXd x = gaussian(seed, 0, 4, 5);
  const MatrixXd y = gaussian(seed, 1, 3, 5);
  const VectorXd s = gaussian(seed, 2, 4, 1).col(0);
  MatrixXd m(7, 10);
  m << s(0) * x, s(1) * x, s(2) * y, s(3) * y;
  const double nx = matrix_schatten_norm(x, p);
  const double ny = matrix_schatten_norm(y, p);
  const SingularPair c =
      svd_2x2(std::abs(s(0)) * nx, std::abs(s(1)) * nx, std::abs(s(2)) * ny, std::abs(s(3)) * ny);
  return at_least(schatten_norm(VectorXd{{c.first, c.second}}, p), matrix_schatten_norm(m, p));
}

// ||A||_p <= ||[[|v'Au|, ||vv'A(I-uu')||], [0, ||(I-vv')A(I-uu')||]]||_p, v = Au/||Au||.
TrialOutcome block2x2(std::uint64_t seed, int index) {
  const double grid[] = {2.0, 3.0, 4.0, 8.0};
  const double p = pick(grid, index);
  const MatrixXd a = gaussian(seed, 0, 8, 6);
  const VectorXd u = unit(seed, 1, 6);
  const VectorXd v = (a * u).normalized();
  const MatrixXd pu = u * u.transpose();
  const MatrixXd pv = v * v.transpose();
  const MatrixXd iu = MatrixXd::Identity(6, 6) - pu;
  const MatrixXd iv = MatrixXd::Identity(8, 8) - pv;
  const SingularPair c = svd_2x2(matrix_schatten_norm(pv * a * pu, p),
                                 matrix_schatten_norm(pv * a * iu, p), 0.0,
                                 matrix_schatten_norm(iv * a * iu, p));
  return at_least(schatten_norm(VectorXd{{c.first, c.second}}, p), matrix_schatten_norm(a, p));
}

TrialOutcome svd2x2(std::uint64_t seed, int) {
  const MatrixXd m = gaussian(seed, 0, 2, 2);
  const SingularPair closed = svd_2x2(m(0, 0), m(0, 1), m(1, 0), m(1, 1));
  const VectorXd sv = singular_values(m);
  return {-std::max(std::abs(closed.first - sv(0)), std::abs(closed.second - sv(1))), 1e-12};
}

// sigma_i(A Z) >= sigma_i(A^T W) with W from a run on A^T and Z = orth(A^T W).
TrialOutcome transfer(std::uint64_t seed, int) {
  const Index k = 3;
  const MatrixXd a = gaussian(seed, 0, 30, 20);
  const LinearOperator op = LinearOperator::dense(a);
  const MatrixXd w = block_krylov(op.transposed(), {k, k, 2, derive_seed(seed, 1)}).basis;
  const MatrixXd atw = a.transpose() * w;
  const MatrixXd z = orthonormal_range(atw, k);
  const VectorXd lhs = singular_values(a * z);
  const VectorXd rhs = singular_values(atw);
  TrialOutcome out{std::numeric_limits<double>::infinity(), 0.0};
  for (Index i = 0; i < k; ++i) out = worst({out, at_least(lhs(i), rhs(i))});
  return out;
}

MatrixXd spectrum_matrix(std::uint64_t seed, Index n, Index d, const VectorXd& sigma) {
  const Index r = sigma.size();
  return random_orthonormal(n, r, derive_seed(seed, 11)) * sigma.asDiagonal() *
         random_orthonormal(d, r, derive_seed(seed, 12)).transpose();
}

// ||A Z||_p^p >= ||A_k||_p^p - sum_i 2 gamma_i p sigma_{k+1}^2 sigma_i^{p-2}.
TrialOutcome pervector(std::uint64_t seed, int index) {
  const double grid[] = {1.0, 1.5, 2.0, 3.0, 4.0};
  const double p = pick(grid, index);
  const Index k = 3;
  VectorXd sigma(20);
  for (Index i = 0; i < sigma.size(); ++i) sigma(i) = std::pow(i + 1.0, -0.5);
  const MatrixXd a = spectrum_matrix(seed, 40, 30, sigma);
  const MatrixXd z =
      block_krylov(LinearOperator::dense(a), {k, k, 1, derive_seed(seed, 1)}).basis;
  const VectorXd errors = per_vector_errors(a, z);
  const double tail = sigma(k) * sigma(k);
  double rhs = 0.0;
  for (Index i = 0; i < k; ++i) {
    const double gamma = std::max(errors(i), 0.0) / tail;
    rhs += std::pow(sigma(i), p) - 2.0 * gamma * p * tail * std::pow(sigma(i), p - 2.0);
  }
  return at_least(matrix_schatten_power(a * z, p), rhs);
}

// With a gap at l: ||A_l^T (I - W W^T)||_F^2 and ||A_l (I - Z Z^T)||_F^2 are
// at most sum_i (sigma_i^2 - ||A^T w_i||^2) / (1 - sigma_{l+1}^2 / sigma_l^2).
TrialOutcome residual(std::uint64_t seed, int index) {
  const Index l = 2 + index % 2;
  VectorXd sigma(12);
  for (Index i = 0; i < sigma.size(); ++i) sigma(i) = i < l ? 10.0 - i : 1.0 / (i + 1.0);
  const MatrixXd a = spectrum_matrix(seed, 25, 18, sigma);
  const Spectrum svd = dense_svd(a);
  const MatrixXd a_l = svd.left.leftCols(l) * svd.singular_values.head(l).asDiagonal() *
                       svd.right.leftCols(l).transpose();
  const MatrixXd w =
      block_krylov(LinearOperator::dense(a.transpose()), {l, l, 2, derive_seed(seed, 1)}).basis;
  const MatrixXd z = orthonormal_range(a.transpose() * w, l);

  double errors = 0.0;
  for (Index i = 0; i < l; ++i) errors += sigma(i) * sigma(i) - (a.transpose() * w.col(i)).squaredNorm();
  const double ratio = sigma(l) * sigma(l) / (sigma(l - 1) * sigma(l - 1));
  const double bound = std::max(errors, 0.0) / (1.0 - ratio);

  const double left = (a_l.transpose() - a_l.transpose() * w * w.transpose()).squaredNorm();
  const double right = (a_l - a_l * z * z.transpose()).squaredNorm();
  const double scale = sigma(0) * sigma(0);
  return worst({{bound - left, kSlack * scale}, {bound - right, kSlack * scale}});
}

MatrixXd bounded_wishart(std::uint64_t seed, Index n) {
  for (std::uint64_t attempt = 0;; ++attempt) {
    WishartInstance inst = sample_wishart(n, derive_seed(seed, 100 + attempt));
    if (hard_spectrum(inst.w).opnorm_w <= 5.0) return inst.w;
  }
}

// ||A (I - v v^T)||_p^p >= ||A||_p^p - ||A v||^p, A = I - W/5, p in [1, 2].
TrialOutcome altroute(std::uint64_t seed, int index) {
  const double grid[] = {1.0, 1.25, 1.5, 1.75, 2.0};
  const double p = pick(grid, index);
  const Index n = 12;
  const MatrixXd a = MatrixXd::Identity(n, n) - bounded_wishart(seed, n) / 5.0;
  const VectorXd v = unit(seed, 1, n);
  const MatrixXd proj = MatrixXd::Identity(n, n) - v * v.transpose();
  return at_least(matrix_schatten_power(a * proj, p),
                  matrix_schatten_power(a, p) - std::pow((a * v).norm(), p));
}

// ||A||_op^p >= ||A v||^p for unit v.
TrialOutcome sandwich(std::uint64_t seed, int index) {
  const double grid[] = {1.0, 2.0, 3.0, 4.0};
  const double p = pick(grid, index);
  const Index n = 12;
  const MatrixXd a = MatrixXd::Identity(n, n) - bounded_wishart(seed, n) / 5.0;
  const VectorXd v = unit(seed, 1, n);
  return at_least(std::pow(singular_values(a)(0), p), std::pow((a * v).norm(), p));
}

double relative_error(const MatrixXd& got, const MatrixXd& want) {
  return (got - want).norm() / std::max(want.norm(), std::numeric_limits<double>::min());
}

// Polynomial operators against dense evaluation, plus exact chain charges.
TrialOutcome polynomial(std::uint64_t seed, int index) {
  const int degree = index % 4;
  const PolynomialKind kind = (index / 4) % 2 == 0 ? PolynomialKind::kGramPower
                                                    : PolynomialKind::kAGramPower;
  const MatrixXd a = gaussian(seed, 0, 7, 5) / 2.0;
  const LinearOperator base = LinearOperator::dense(a);
  const LinearOperator poly = polynomial_operator({base, degree, kind});
  MatrixXd gram_power = MatrixXd::Identity(5, 5);
  for (int i = 0; i < degree; ++i) gram_power = a.transpose() * a * gram_power;
  const MatrixXd dense = kind == PolynomialKind::kGramPower ? gram_power : MatrixXd(a * gram_power);

  const VectorXd x = gaussian(seed, 1, dense.cols(), 1).col(0);
  const VectorXd y = gaussian(seed, 2, dense.rows(), 1).col(0);
  const QueryLedger before = base.ledger();
  const VectorXd forward = poly.apply(x, Side::kNormal);
  const QueryLedger mid = base.ledger();
  const VectorXd backward = poly.apply(y, Side::kAdjoint);
  const QueryLedger after = base.ledger();

  const std::uint64_t l = static_cast<std::uint64_t>(degree);
  const QueryLedger want_forward = kind == PolynomialKind::kGramPower ? QueryLedger{l, l}
                                                                      : QueryLedger{l + 1, l};
  const QueryLedger want_backward = kind == PolynomialKind::kGramPower ? QueryLedger{l, l}
                                                                       : QueryLedger{l, l + 1};
  if (!(mid - before == want_forward) || !(after - mid == want_backward)) {
    return {-std::numeric_limits<double>::infinity(), 1e-8};
  }
  const double err = std::max(relative_error(forward, dense * x),
                              relative_error(backward, dense.transpose() * y));
  return {-err, 1e-8};
}

// <A v, w> = <v, A^T w> for every backing.
TrialOutcome adjoint(std::uint64_t seed, int index) {
  const MatrixXd a = gaussian(seed, 0, 6, 4);
  std::vector<Triplet> entries;
  for (int e = 0; e < 10; ++e) {
    const GaussianStream g(seed, 3);
    entries.push_back({static_cast<Index>(g.uniform(3 * e) * 6), static_cast<Index>(g.uniform(3 * e + 1) * 4),
                       g.normal(3 * e + 2)});
  }
  const LinearOperator dense = LinearOperator::dense(a);
  const LinearOperator ops[] = {
      dense,
      LinearOperator::diagonal(gaussian(seed, 1, 5, 1).col(0)),
      LinearOperator::sparse(6, 4, entries),
      polynomial_operator({dense, 2, PolynomialKind::kGramPower}),
      polynomial_operator({dense, 1, PolynomialKind::kAGramPower}),
      dense.transposed(),
  };
  const LinearOperator& op = ops[static_cast<std::size_t>(index) % std::size(ops)];
  const VectorXd v = gaussian(seed, 4, op.cols(), 1).col(0);
  const VectorXd w = gaussian(seed, 5, op.rows(), 1).col(0);
  const double lhs = op.apply(v, Side::kNormal).dot(w);
  const double rhs = v.dot(op.apply(w, Side::kAdjoint));
  const double scale = std::max({std::abs(lhs), std::abs(rhs), std::numeric_limits<double>::min()});
  return {-std::abs(lhs - rhs) / scale, 1e-10};
}

struct Suite {
  std::string_view name;
  std::function<TrialOutcome(std::uint64_t, int)> run;
};

const std::vector<Suite>& suites() {
  static const std::vector<Suite> all = {
      {"pinching", pinching},     {"alt", alt},           {"holder", holder},
      {"unitary", unitary},       {"monotone", monotone}, {"compression", compression},
      {"block2x2", block2x2},     {"svd2x2", svd2x2},     {"transfer", transfer},
      {"pervector", pervector},   {"residual", residual}, {"altroute", altroute},
      {"sandwich", sandwich},     {"polynomial", polynomial}, {"adjoint", adjoint},
  };
  return all;
}

const Suite& find_suite(std::string_view name) {
  for (const Suite& s : suites()) {
    if (s.name == name) return s;
  }
  throw UnknownSuiteError("unknown verify suite '" + std::string(name) + "'");
}

}  // namespace

int VerifyReport::total_trials() const {
  int n = 0;
  for (const SuiteReport& s : suites) n += s.trials;
  return n;
}

int VerifyReport::total_failures() const {
  int n = 0;
  for (const SuiteReport& s : suites) n += s.failures;
  return n;
}

std::string VerifyReport::status() const {
  if (total_trials() == 0) return "no trials";
  return passed() ? "pass" : "fail";
}

std::vector<std::string_view> verify_suite_names() {
  std::vector<std::string_view> out;
  for (const Suite& s : suites()) out.push_back(s.name);
  return out;
}

TrialOutcome run_trial(std::string_view suite, std::uint64_t seed, int index) {
  return find_suite(suite).run(seed, index);
}

VerifyReport run_verify(std::string_view selector, std::span<const std::uint64_t> seeds) {
  std::vector<const Suite*> chosen;
  if (selector == "all") {
    for (const Suite& s : suites()) chosen.push_back(&s);
  } else {
    chosen.push_back(&find_suite(selector));
  }
  VerifyReport report;
  for (const Suite* suite : chosen) {
    SuiteReport sr;
    sr.name = std::string(suite->name);
    sr.worst_margin = std::numeric_limits<double>::infinity();
    for (std::size_t t = 0; t < seeds.size(); ++t) {
      TrialOutcome o;
      try {
        o = suite->run(seeds[t], static_cast<int>(t));
      } catch (const std::exception&) {
        o = {-std::numeric_limits<double>::infinity(), 0.0};
      }
      ++sr.trials;
      if (!o.ok()) ++sr.failures;
      sr.worst_margin = std::min(sr.worst_margin, o.margin);
    }
    report.suites.push_back(std::move(sr));
  }
  return report;
}

std::string format_report(const VerifyReport& report) {
  std::ostringstream out;
  for (const SuiteReport& s : report.suites) {
    out << s.name << ": ";
    if (s.trials == 0) {
      out << "no trials\n";
      continue;
    }
    out << s.trials << " trials, " << s.failures << " failures, worst margin " << s.worst_margin
        << '\n';
  }
  out << "status: " << report.status() << '\n';
  return out.str();
}

}  // namespace schatten
