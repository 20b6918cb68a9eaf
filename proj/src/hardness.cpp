#include "schatten/hardness.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <stdexcept>
#include <string>

#include <Eigen/Eigenvalues>

#include "schatten/lra.hpp"
#include "schatten/random.hpp"

namespace schatten {

namespace {

constexpr std::uint64_t kWishartLabel = 0x57495348;  // "WISH"
constexpr std::uint64_t kLraLabel = 0x4c5241;        // "LRA"

}  // namespace

WishartInstance sample_wishart(Index n, std::uint64_t seed) {
  if (n < 1) throw std::invalid_argument("sample_wishart: n must be >= 1");
  WishartInstance out;
  out.n = n;
  out.seed = seed;
  out.x = GaussianStream(seed).matrix(n, n) / std::sqrt(static_cast<double>(n));
  Eigen::MatrixXd lower = Eigen::MatrixXd::Zero(n, n);
  lower.selfadjointView<Eigen::Lower>().rankUpdate(out.x);
  out.w = lower.selfadjointView<Eigen::Lower>();
  return out;
}

LinearOperator hard_instance(const Eigen::MatrixXd& w) {
  if (w.rows() != w.cols() || w.rows() < 1) {
    throw DimensionError("hard_instance: W must be square and non-empty");
  }
  if ((w - w.transpose()).cwiseAbs().maxCoeff() > 1e-12 * std::max(1.0, w.cwiseAbs().maxCoeff())) {
    throw std::invalid_argument("hard_instance: W must be symmetric");
  }
  return LinearOperator::dense(Eigen::MatrixXd::Identity(w.rows(), w.cols()) - w / 5.0);
}

LinearOperator hard_instance(Index n, std::uint64_t seed) {
  return hard_instance(sample_wishart(n, seed).w);
}

HardSpectrum hard_spectrum(const Eigen::MatrixXd& w) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(w, Eigen::EigenvaluesOnly);
  if (eig.info() != Eigen::Success) throw std::runtime_error("hard_spectrum: eigensolver failed");
  HardSpectrum out;
  out.w_eigenvalues = eig.eigenvalues();
  out.lambda_min = out.w_eigenvalues(0);
  out.opnorm_w = out.w_eigenvalues.cwiseAbs().maxCoeff();
  Eigen::VectorXd a = (1.0 - out.w_eigenvalues.array() / 5.0).abs().matrix();
  std::sort(a.data(), a.data() + a.size(), std::greater<>());
  out.a_singular = a;
  return out;
}

double HardSpectrum::schatten_power(double p) const {
  return a_singular.array().pow(p).sum();
}

double HardSpectrum::tail_power(double p) const {
  return a_singular.size() < 2 ? 0.0 : a_singular.tail(a_singular.size() - 1).array().pow(p).sum();
}

double min_eig_estimate(const LinearOperator& a, const Eigen::VectorXd& v, double p) {
  if (!(p >= 1.0) || !std::isfinite(p)) throw std::invalid_argument("min_eig_estimate: p must be finite and >= 1");
  const double norm = v.norm();
  if (!(std::abs(norm - 1.0) <= 1e-8)) {
    throw std::invalid_argument("min_eig_estimate: v must be a unit vector, ||v|| = " +
                                std::to_string(norm));
  }
  return (5.0 / p) * (1.0 - std::pow(a.apply(v).norm(), p));
}

HardnessReport hardness_experiment(Index n, double p, const HardnessConfig& cfg) {
  if (n < 2) throw std::invalid_argument("hardness_experiment: n must be >= 2");
  if (!(cfg.calibration > 0.0)) throw std::invalid_argument("hardness_experiment: calibration must be positive");

  HardnessReport out;
  out.n = n;
  out.p = p;
  out.seed = cfg.seed;
  out.eps = cfg.calibration / std::pow(static_cast<double>(n), 3.0);

  const WishartInstance inst = sample_wishart(n, derive_seed(cfg.seed, kWishartLabel));
  const HardSpectrum spectrum = hard_spectrum(inst.w);
  out.lambda_min_true = spectrum.lambda_min;
  out.opnorm_w = spectrum.opnorm_w;
  out.opnorm_exceeded = spectrum.opnorm_w > 5.0;
  out.schatten_power_p = spectrum.schatten_power(p);
  out.schatten_tail_p = spectrum.tail_power(p);

  const LinearOperator a = hard_instance(inst.w);
  LraConfig lra_cfg;
  lra_cfg.k = 1;
  lra_cfg.eps = out.eps;
  lra_cfg.p = p;
  lra_cfg.c = cfg.c;
  lra_cfg.seed = derive_seed(cfg.seed, kLraLabel);
  const Eigen::MatrixXd dense = a.to_dense();
  const LraOutput lra = schatten_lra(a, lra_cfg, &dense);
  out.residual = *lra.residual_certificate;
  out.optimum = *lra.optimum;
  out.lra_queries = lra.total_queries;
  out.branch = std::string(branch_name(lra.decision.branch));

  Eigen::VectorXd v = lra.basis.col(0);
  if (cfg.refine) {
    out.refine_iterations =
        static_cast<std::int64_t>(std::ceil(1.0 / (cfg.c * std::cbrt(out.eps))));
    const SubspaceResult polished =
        block_krylov_from(a, v, 1, static_cast<int>(out.refine_iterations));
    out.refine_queries = polished.queries_used;
    v = polished.basis.col(0);
  }
  v.normalize();

  const QueryLedger before = a.ledger();
  out.lambda_hat = min_eig_estimate(a, v, p);
  out.estimate_queries = a.ledger() - before;
  out.abs_error = std::abs(out.lambda_hat - out.lambda_min_true);
  out.queries_used = out.lra_queries + out.refine_queries + out.estimate_queries;
  return out;
}

}  // namespace schatten
