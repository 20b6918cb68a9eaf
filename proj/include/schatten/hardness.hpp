#pragma once

#include <cstdint>
#include <string>

#include <Eigen/Dense>

#include "schatten/krylov.hpp"
#include "schatten/linop.hpp"

namespace schatten {

struct WishartInstance {
  Index n = 0;
  Eigen::MatrixXd x;  // entries N(0, 1/n)
  Eigen::MatrixXd w;  // X X^T, exactly symmetric
  std::uint64_t seed = 0;
};

WishartInstance sample_wishart(Index n, std::uint64_t seed);

/// A = I - W/5 as a dense counted operator. `w` must be square and symmetric.
LinearOperator hard_instance(const Eigen::MatrixXd& w);
LinearOperator hard_instance(Index n, std::uint64_t seed);

/// Spectral quantities of W and of A = I - W/5 from one symmetric
/// eigendecomposition (eigenvalues only).
struct HardSpectrum {
  Eigen::VectorXd w_eigenvalues;  // ascending
  Eigen::VectorXd a_singular;     // descending
  double lambda_min = 0.0;
  double opnorm_w = 0.0;

  double schatten_power(double p) const;  // ||A||_p^p
  double tail_power(double p) const;      // ||A - A_1||_p^p
};

HardSpectrum hard_spectrum(const Eigen::MatrixXd& w);

/// (5/p) (1 - ||A v||^p) with one normal product. Throws unless
/// ||v|| = 1 within 1e-8.
double min_eig_estimate(const LinearOperator& a, const Eigen::VectorXd& v, double p);

struct HardnessConfig {
  double calibration = 1.0;  // eps = calibration / n^3
  double c = kDefaultScheduleConstant;
  bool refine = true;
  std::uint64_t seed = 0;
};

struct HardnessReport {
  Index n = 0;
  double p = 0.0;
  double eps = 0.0;
  std::uint64_t seed = 0;
  double lambda_min_true = 0.0;
  double lambda_hat = 0.0;
  double abs_error = 0.0;
  double opnorm_w = 0.0;
  bool opnorm_exceeded = false;  // opnorm_w > 5
  double schatten_power_p = 0.0;  // ||A||_p^p
  double schatten_tail_p = 0.0;   // ||A - A_1||_p^p
  std::string branch;
  double residual = 0.0;  // ||A (I - z z^T)||_p for the LRA vector
  double optimum = 0.0;   // ||A - A_1||_p
  std::int64_t refine_iterations = 0;
  QueryLedger lra_queries;
  QueryLedger refine_queries;
  QueryLedger estimate_queries;
  QueryLedger queries_used;
};

/// Samples the hard instance, runs the LRA with k = 1, polishes the vector
/// with ceil(1 / (c eps^{1/3})) further Krylov steps started from it, and
/// evaluates the min-eigenvalue estimator.
HardnessReport hardness_experiment(Index n, double p, const HardnessConfig& cfg);

}  // namespace schatten
