#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "schatten/krylov.hpp"
#include "schatten/linop.hpp"
#include "schatten/spectral.hpp"

namespace schatten {

enum class Branch { kLargeGapTop, kSmallTailW2, kLargeTailW1, kSpectralFallback };

/// "LARGE_GAP_TOP", "SMALL_TAIL_W2", "LARGE_TAIL_W1", "SPECTRAL_FALLBACK".
std::string_view branch_name(Branch branch);

/// Replaces the shared constant c for a single stage.
struct StageConstants {
  std::optional<double> w1;
  std::optional<double> w2;
  std::optional<double> probe_top;
  std::optional<double> probe_tail;
  std::optional<double> spectral;
};

struct LraConfig {
  Index k = 1;
  double eps = 0.1;
  NormOrder p = 2.0;
  double c = kDefaultScheduleConstant;
  StageConstants stage;
  std::optional<Index> block_cap;  // defaults to min(n, d)
  int repetitions = 1;
  std::uint64_t seed = 0;

  /// Throws std::invalid_argument (eps, c, repetitions, block_cap) or
  /// std::out_of_range (k).
  void validate(Index n, Index d) const;
};

/// Iteration counts and block sizes used by schatten_lra on an n x d input.
/// Pure arithmetic.
struct LraSchedule {
  bool spectral = false;
  bool trivial = false;  // k == min(n, d)
  double gamma1 = 0.0;
  double gamma2 = 0.0;   // recorded only
  Index k = 0;
  Index s = 0;
  std::int64_t q_w1 = 0;
  std::int64_t q_w2 = 0;
  std::int64_t q_probe_top = 0;
  std::int64_t q_probe_tail = 0;
  std::int64_t q_spectral = 0;

  /// Products the run may issue: 2 s (q+1) per Krylov stage plus k for the
  /// final A^T W. Reached exactly unless a block deflates.
  std::uint64_t query_budget() const;
};

LraSchedule lra_schedule(Index n, Index d, const LraConfig& cfg);

struct ProbeResult {
  double sigma1_sq = 0.0;
  double sigma_k1_sq = 0.0;
  double sigma_s_sq = 0.0;
  QueryLedger probe_queries;
};

struct BranchDecision {
  Branch branch = Branch::kLargeTailW1;
  double factor = 0.0;          // 1 + 0.5/p
  double top_threshold = 0.0;   // factor * sigma_k1^2
  double tail_threshold = 0.0;  // sigma_k1^2 / factor
  std::string rationale;
};

struct StageReport {
  std::string name;
  Index block_size = 0;
  std::int64_t iterations = 0;
  QueryLedger queries;
  bool dense_fallback = false;
};

struct LraOutput {
  Eigen::MatrixXd basis;  // d x k
  BranchDecision decision;
  QueryLedger total_queries;
  std::vector<StageReport> stages;
  std::optional<double> residual_certificate;
  std::optional<double> optimum;
  ProbeResult probe;
};

ProbeResult spectrum_probe(const LinearOperator& op, Index k, Index s, const LraConfig& cfg);

/// `p` must be finite.
BranchDecision select_branch(const ProbeResult& probe, double p, Index k, Index s);

/// Schatten-p low-rank approximation from matrix-vector products.
/// `oracle`, when given, is the explicit matrix; it fills the certificate
/// and is required for repetitions > 1 (the run with the smallest residual
/// is kept; queries of every repetition are counted).
LraOutput schatten_lra(const LinearOperator& op, const LraConfig& cfg,
                       const Eigen::MatrixXd* oracle = nullptr);

struct Rank1Sketch {
  Eigen::VectorXd z;
  double value = 0.0;  // ||A z||^2
  int chosen = 1;      // 1: single-vector run, 2: block run
  QueryLedger queries;
};

/// Rank-1 Frobenius sketch from a single vector run and a block run; keeps
/// whichever vector captures more of ||A z||^2. Uses cfg.c and cfg.seed.
Rank1Sketch frobenius_rank1_sketch(const LinearOperator& op, double eps, const LraConfig& cfg);

/// Plain block Krylov with q = ceil(c ln(d/eps) / sqrt(eps)) and block k.
LraOutput baseline_block_krylov(const LinearOperator& op, const LraConfig& cfg,
                                const Eigen::MatrixXd* oracle = nullptr);

struct StreamingFootprint {
  std::int64_t passes = 0;
  std::int64_t words = 0;
};

StreamingFootprint streaming_footprint(Index n, Index d, Index k, double p, double eps,
                                       double c = kDefaultScheduleConstant);

}  // namespace schatten
