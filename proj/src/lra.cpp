#include "schatten/lra.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "schatten/random.hpp"

namespace schatten {

namespace {

enum SeedLabel : std::uint64_t {
  kSeedW1 = 1,
  kSeedW2 = 2,
  kSeedProbeTop = 3,
  kSeedProbeTail = 4,
  kSeedSpectral = 5,
  kSeedSketchSingle = 6,
  kSeedSketchBlock = 7,
  kSeedBaseline = 8,
  kSeedRepetition = 0x100,
};

std::int64_t ceil_count(double value) {
  if (!std::isfinite(value) || value > 1e12) {
    throw std::overflow_error("iteration schedule overflows");
  }
  return std::max<std::int64_t>(1, static_cast<std::int64_t>(std::ceil(value)));
}

// Past q = dim every run takes the dense path, so clamping changes nothing.
int as_iterations(std::int64_t q, Index dim) {
  return static_cast<int>(std::min<std::int64_t>(q, std::max<Index>(dim, 1)));
}

void require_eps(double eps) {
  if (!(eps > 0.0 && eps < 1.0)) {
    throw std::invalid_argument("eps must lie in (0, 1), got " + std::to_string(eps));
  }
}

std::string format_double(double x) {
  std::ostringstream out;
  out.precision(6);
  out << x;
  return out.str();
}

struct StageRun {
  SubspaceResult result;
  StageReport report;
};

StageRun run_stage(const LinearOperator& op, std::string name, Index k, Index s, std::int64_t q,
                   std::uint64_t seed) {
  StageRun out;
  out.result = block_krylov(op, {k, s, as_iterations(q, op.cols()), seed});
  out.report = {std::move(name), s, q, out.result.queries_used, out.result.dense_fallback};
  return out;
}

// Z = orth(A^T W): k adjoint products and a local orthonormalization.
Eigen::MatrixXd lift(const LinearOperator& op, const Eigen::MatrixXd& w, Index k,
                     std::vector<StageReport>& stages) {
  const QueryLedger before = op.ledger();
  const Eigen::MatrixXd atw = op.apply_block(w, Side::kAdjoint);
  stages.push_back({"lift", w.cols(), 0, op.ledger() - before, false});
  return orthonormal_range(atw, k);
}

double stage_constant(const std::optional<double>& override_c, double c) {
  return override_c.value_or(c);
}

LraOutput run_once(const LinearOperator& op, const LraConfig& cfg, const LraSchedule& plan,
                   std::uint64_t seed) {
  const Index n = op.rows();
  const Index d = op.cols();
  const Index k = cfg.k;
  const LinearOperator at = op.transposed();
  LraOutput out;

  if (plan.trivial) {
    out.decision.branch = Branch::kLargeGapTop;
    out.decision.rationale = "k = min(n, d): the row space fits in the basis";
    if (k == d) {
      out.basis = Eigen::MatrixXd::Identity(d, d);
    } else {
      out.basis = lift(op, Eigen::MatrixXd::Identity(n, n), k, out.stages);
    }
  } else if (plan.spectral) {
    StageRun w = run_stage(at, "spectral", k, k, plan.q_spectral, derive_seed(seed, kSeedSpectral));
    out.stages.push_back(w.report);
    out.decision.branch = Branch::kSpectralFallback;
    out.decision.rationale = cfg.p.is_infinite()
                                 ? std::string("p = inf")
                                 : "p = " + format_double(cfg.p.value()) + " > ln(d)/eps = " +
                                       format_double(std::log(static_cast<double>(d)) / cfg.eps);
    out.basis = lift(op, w.result.basis, k, out.stages);
  } else {
    StageRun w1 = run_stage(at, "w1", k, k, plan.q_w1, derive_seed(seed, kSeedW1));
    StageRun w2 = run_stage(at, "w2", k, plan.s, plan.q_w2, derive_seed(seed, kSeedW2));
    out.stages.push_back(w1.report);
    out.stages.push_back(w2.report);

    LraConfig probe_cfg = cfg;
    probe_cfg.seed = seed;
    const QueryLedger probe_start = op.ledger();
    out.probe = spectrum_probe(op, k, plan.s, probe_cfg);
    StageReport probe_report{"probe", plan.s, plan.q_probe_top + plan.q_probe_tail,
                             op.ledger() - probe_start, false};
    out.stages.push_back(probe_report);

    out.decision = select_branch(out.probe, cfg.p.value(), k, plan.s);
    const Eigen::MatrixXd& w = out.decision.branch == Branch::kSmallTailW2 ? w2.result.basis
                                                                            : w1.result.basis;
    out.decision.rationale +=
        out.decision.branch == Branch::kLargeGapTop ? "; Z spans A^T W1 W1^T" : "";
    out.basis = lift(op, w, k, out.stages);
  }

  for (const StageReport& stage : out.stages) out.total_queries += stage.queries;
  return out;
}

}  // namespace

std::string_view branch_name(Branch branch) {
  switch (branch) {
    case Branch::kLargeGapTop: return "LARGE_GAP_TOP";
    case Branch::kSmallTailW2: return "SMALL_TAIL_W2";
    case Branch::kLargeTailW1: return "LARGE_TAIL_W1";
    case Branch::kSpectralFallback: return "SPECTRAL_FALLBACK";
  }
  return "UNKNOWN";
}

void LraConfig::validate(Index n, Index d) const {
  require_eps(eps);
  if (n < 1 || d < 1) throw std::invalid_argument("operator must be non-empty");
  if (k < 1 || k > std::min(n, d)) {
    throw std::out_of_range("k = " + std::to_string(k) + " outside [1, min(n, d)] = [1, " +
                            std::to_string(std::min(n, d)) + "]");
  }
  if (!(c > 0.0) || !std::isfinite(c)) throw std::invalid_argument("schedule constant c must be positive");
  for (const auto* override_c :
       {&stage.w1, &stage.w2, &stage.probe_top, &stage.probe_tail, &stage.spectral}) {
    if (override_c->has_value() && !(**override_c > 0.0)) {
      throw std::invalid_argument("stage constants must be positive");
    }
  }
  if (repetitions < 1) throw std::invalid_argument("repetitions must be >= 1");
  if (block_cap && *block_cap < k + 1) {
    throw std::invalid_argument("block_cap = " + std::to_string(*block_cap) +
                                " is below k + 1 = " + std::to_string(k + 1));
  }
}

LraSchedule lra_schedule(Index n, Index d, const LraConfig& cfg) {
  cfg.validate(n, d);
  LraSchedule plan;
  plan.k = cfg.k;
  plan.gamma2 = cfg.eps;
  const double dd = static_cast<double>(d);
  const double log_d_eps = std::log(dd / cfg.eps);

  if (cfg.k == std::min(n, d)) {
    plan.trivial = true;
    return plan;
  }
  if (cfg.p.is_infinite() || cfg.p.value() > std::log(dd) / cfg.eps) {
    plan.spectral = true;
    plan.q_spectral =
        ceil_count(stage_constant(cfg.stage.spectral, cfg.c) * log_d_eps / std::sqrt(cfg.eps));
    return plan;
  }

  const double p = cfg.p.value();
  const double sqrt_p = std::sqrt(p);
  plan.gamma1 = std::pow(cfg.eps, 2.0 / 3.0) / std::cbrt(p);
  plan.q_w1 = ceil_count(stage_constant(cfg.stage.w1, cfg.c) *
                         (std::log(dd / plan.gamma1) / std::sqrt(plan.gamma1) + log_d_eps * sqrt_p));

  const Index cap = std::min({n, d, cfg.block_cap.value_or(d)});
  const double raw_s = std::ceil(static_cast<double>(cfg.k) / std::cbrt(cfg.eps * p));
  plan.s = std::clamp<Index>(static_cast<Index>(std::min(raw_s, 1e15)), cfg.k + 1, cap);
  plan.q_w2 = ceil_count(stage_constant(cfg.stage.w2, cfg.c) * log_d_eps * sqrt_p);
  plan.q_probe_top = ceil_count(stage_constant(cfg.stage.probe_top, cfg.c) *
                                (std::log(dd * p) + log_d_eps) * sqrt_p);
  plan.q_probe_tail = ceil_count(stage_constant(cfg.stage.probe_tail, cfg.c) * log_d_eps * sqrt_p);
  return plan;
}

std::uint64_t LraSchedule::query_budget() const {
  auto run = [](Index block, std::int64_t q) {
    return 2 * static_cast<std::uint64_t>(block) * static_cast<std::uint64_t>(q + 1);
  };
  const auto kk = static_cast<std::uint64_t>(k);
  if (trivial) return kk;  // at most the lift
  if (spectral) return run(k, q_spectral) + kk;
  return run(k, q_w1) + run(s, q_w2) + run(k + 1, q_probe_top) + run(s, q_probe_tail) + kk;
}

ProbeResult spectrum_probe(const LinearOperator& op, Index k, Index s, const LraConfig& cfg) {
  require_eps(cfg.eps);
  if (cfg.p.is_infinite()) throw std::invalid_argument("spectrum_probe: p must be finite");
  if (s < k + 1 || s > op.cols()) {
    throw std::invalid_argument("spectrum_probe: block size s = " + std::to_string(s) +
                                " must lie in [k + 1, d]");
  }
  const double p = cfg.p.value();
  const double dd = static_cast<double>(op.cols());
  const std::int64_t q_top = ceil_count(stage_constant(cfg.stage.probe_top, cfg.c) *
                                        (std::log(dd * p) + std::log(dd / cfg.eps)) * std::sqrt(p));
  const std::int64_t q_tail = ceil_count(stage_constant(cfg.stage.probe_tail, cfg.c) *
                                         std::log(dd / cfg.eps) * std::sqrt(p));

  ProbeResult out;
  const SubspaceResult top =
      block_krylov(op, {k + 1, k + 1, as_iterations(q_top, op.cols()), derive_seed(cfg.seed, kSeedProbeTop)});
  const SubspaceResult tail =
      block_krylov(op, {s, s, as_iterations(q_tail, op.cols()), derive_seed(cfg.seed, kSeedProbeTail)});
  out.sigma1_sq = top.rayleigh_values(0);
  out.sigma_k1_sq = top.rayleigh_values(k);
  out.sigma_s_sq = tail.rayleigh_values(s - 1);
  out.probe_queries = top.queries_used + tail.queries_used;
  return out;
}

BranchDecision select_branch(const ProbeResult& probe, double p, Index k, Index s) {
  if (!(p >= 1.0) || !std::isfinite(p)) throw std::invalid_argument("select_branch: p must be finite and >= 1");
  BranchDecision out;
  out.factor = 1.0 + 0.5 / p;
  out.top_threshold = out.factor * probe.sigma_k1_sq;
  out.tail_threshold = probe.sigma_k1_sq / out.factor;
  std::ostringstream why;
  why << "sigma1^2 = " << format_double(probe.sigma1_sq) << ", sigma_" << (k + 1)
      << "^2 = " << format_double(probe.sigma_k1_sq) << ", sigma_" << s
      << "^2 = " << format_double(probe.sigma_s_sq) << "; ";
  if (probe.sigma1_sq >= out.top_threshold) {
    out.branch = Branch::kLargeGapTop;
    why << "sigma1^2 >= " << format_double(out.top_threshold);
  } else if (probe.sigma_s_sq <= out.tail_threshold) {
    out.branch = Branch::kSmallTailW2;
    why << "sigma1^2 < " << format_double(out.top_threshold) << " and sigma_s^2 <= "
        << format_double(out.tail_threshold);
  } else {
    out.branch = Branch::kLargeTailW1;
    why << "sigma1^2 < " << format_double(out.top_threshold) << " and sigma_s^2 > "
        << format_double(out.tail_threshold);
  }
  out.rationale = why.str();
  return out;
}

LraOutput schatten_lra(const LinearOperator& op, const LraConfig& cfg, const Eigen::MatrixXd* oracle) {
  const LraSchedule plan = lra_schedule(op.rows(), op.cols(), cfg);
  if (cfg.repetitions > 1 && oracle == nullptr) {
    throw std::invalid_argument("repetitions > 1 needs a dense oracle to pick the best run");
  }
  if (oracle && (oracle->rows() != op.rows() || oracle->cols() != op.cols())) {
    throw DimensionError("oracle shape does not match the operator");
  }

  LraOutput best;
  QueryLedger spent;
  for (int r = 0; r < cfg.repetitions; ++r) {
    const std::uint64_t seed = r == 0 ? cfg.seed : derive_seed(cfg.seed, kSeedRepetition + r);
    LraOutput run = run_once(op, cfg, plan, seed);
    spent += run.total_queries;
    if (oracle) run.residual_certificate = residual_cost(*oracle, run.basis, cfg.p);
    if (r == 0 || *run.residual_certificate < *best.residual_certificate) best = std::move(run);
  }
  best.total_queries = spent;
  if (oracle) best.optimum = best_rank_k_error(*oracle, cfg.k, cfg.p);
  return best;
}

LraOutput baseline_block_krylov(const LinearOperator& op, const LraConfig& cfg,
                                const Eigen::MatrixXd* oracle) {
  cfg.validate(op.rows(), op.cols());
  const std::int64_t q = ceil_count(
      cfg.c * std::log(static_cast<double>(op.cols()) / cfg.eps) / std::sqrt(cfg.eps));
  StageRun run = run_stage(op, "baseline", cfg.k, cfg.k, q, derive_seed(cfg.seed, kSeedBaseline));
  LraOutput out;
  out.basis = run.result.basis;
  out.decision.branch = Branch::kSpectralFallback;
  out.decision.rationale = "baseline block Krylov, q = " + std::to_string(q);
  out.total_queries = run.report.queries;
  out.stages.push_back(std::move(run.report));
  if (oracle) {
    out.residual_certificate = residual_cost(*oracle, out.basis, cfg.p);
    out.optimum = best_rank_k_error(*oracle, cfg.k, cfg.p);
  }
  return out;
}

Rank1Sketch frobenius_rank1_sketch(const LinearOperator& op, double eps, const LraConfig& cfg) {
  require_eps(eps);
  if (!(cfg.c > 0.0)) throw std::invalid_argument("schedule constant c must be positive");
  const Index n = op.rows();
  const Index d = op.cols();
  const double inv_cbrt = 1.0 / std::cbrt(eps);
  const std::int64_t q_single = ceil_count(cfg.c * inv_cbrt);
  const Index block = std::min<Index>(d, ceil_count(cfg.c * inv_cbrt));
  const std::int64_t q_block = ceil_count(cfg.c * std::log(static_cast<double>(n) / eps));

  const QueryLedger before = op.ledger();
  const SubspaceResult single =
      block_krylov(op, {1, 1, as_iterations(q_single, d), derive_seed(cfg.seed, kSeedSketchSingle)});
  const SubspaceResult blocked =
      block_krylov(op, {1, block, as_iterations(q_block, d), derive_seed(cfg.seed, kSeedSketchBlock)});

  const Eigen::VectorXd z1 = single.basis.col(0).normalized();
  const Eigen::VectorXd z2 = blocked.basis.col(0).normalized();
  const double v1 = op.apply(z1).squaredNorm();
  const double v2 = op.apply(z2).squaredNorm();

  Rank1Sketch out;
  out.chosen = v2 > v1 ? 2 : 1;
  out.z = out.chosen == 2 ? z2 : z1;
  out.value = std::max(v1, v2);
  out.queries = op.ledger() - before;
  return out;
}

StreamingFootprint streaming_footprint(Index n, Index d, Index k, double p, double eps, double c) {
  const double third = std::cbrt(eps);
  // cbrt of a decimal is inexact; absorb the rounding before ceil
  const auto up = [](double x) { return static_cast<std::int64_t>(std::ceil(x * (1.0 - 1e-12))); };
  StreamingFootprint out;
  out.passes = up(c * std::log(static_cast<double>(d) / eps) * std::pow(p, 1.0 / 6.0) / third);
  out.words = up(c * static_cast<double>(n) * static_cast<double>(k) / third);
  return out;
}

}  // namespace schatten
