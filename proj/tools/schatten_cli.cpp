#include <cstdlib>
#include <fstream>
#include <iostream>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "schatten/bench.hpp"
#include "schatten/config.hpp"
#include "schatten/hardness.hpp"
#include "schatten/lra.hpp"
#include "schatten/matrix_io.hpp"
#include "schatten/random.hpp"
#include "schatten/verify.hpp"

namespace {

constexpr int kOk = 0;
constexpr int kFailure = 1;
constexpr int kUsage = 2;
constexpr double kCertifyLimit = 4e6;  // entries of the explicit matrix

std::uint64_t default_seed() {
  if (const char* env = std::getenv("SCHATTEN_SEED")) {
    try {
      std::size_t used = 0;
      const unsigned long long value = std::stoull(env, &used);
      if (used == std::string(env).size()) return value;
    } catch (const std::exception&) {
    }
    throw schatten::ParseError("SCHATTEN_SEED", 0, "not a non-negative integer: '" + std::string(env) + "'");
  }
  return 0;
}

// Writes to `path`, or stdout for "" and "-".
template <typename Fn>
void with_output(const std::string& path, Fn write) {
  if (path.empty() || path == "-") {
    write(std::cout);
    return;
  }
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
  write(out);
  if (!out) throw std::runtime_error("write to '" + path + "' failed");
}

struct LraArgs {
  std::string matrix;
  std::string config;
  std::optional<long long> k;
  std::optional<double> eps;
  std::optional<std::string> p;
  std::optional<std::uint64_t> seed;
  std::optional<double> c;
  std::string out;
  bool no_certify = false;
};

int run_lra(const LraArgs& args) {
  schatten::LraConfig cfg;
  cfg.seed = default_seed();
  if (!args.config.empty()) cfg = schatten::read_lra_config(args.config, cfg);
  if (args.k) cfg.k = *args.k;
  if (args.eps) cfg.eps = *args.eps;
  if (args.p) cfg.p = schatten::NormOrder::parse(*args.p);
  if (args.seed) cfg.seed = *args.seed;
  if (args.c) cfg.c = *args.c;

  const schatten::LinearOperator op = schatten::read_matrix(args.matrix);
  std::optional<Eigen::MatrixXd> dense;
  const bool certify = !args.no_certify &&
                       static_cast<double>(op.rows()) * static_cast<double>(op.cols()) <= kCertifyLimit;
  if (certify || cfg.repetitions > 1) dense = op.to_dense();
  const schatten::LraOutput result = schatten::schatten_lra(op, cfg, dense ? &*dense : nullptr);
  with_output(args.out, [&](std::ostream& out) {
    schatten::write_lra_csv(out, args.matrix, op.rows(), op.cols(), cfg, result);
  });
  std::cerr << schatten::branch_name(result.decision.branch) << ": " << result.decision.rationale
            << '\n';
  return kOk;
}

int run_bench(const std::string& plan_path, const std::string& out_path, std::optional<int> workers) {
  schatten::BenchPlan plan = schatten::read_bench_plan(plan_path);
  if (workers) plan.workers = *workers;
  plan.validate();
  const std::vector<schatten::BenchRow> rows = schatten::run_bench(plan);
  with_output(out_path, [&](std::ostream& out) { schatten::write_bench_csv(out, rows); });
  int errors = 0;
  for (const schatten::BenchRow& row : rows) errors += row.error.empty() ? 0 : 1;
  if (errors > 0) std::cerr << errors << " of " << rows.size() << " runs recorded errors\n";
  return errors > 0 ? kFailure : kOk;
}

int run_hardness(long long n, double p, int trials, std::optional<std::uint64_t> seed, double c,
                 double calibration, const std::string& out_path) {
  if (trials < 0) throw std::invalid_argument("--trials must be non-negative");
  schatten::HardnessConfig cfg;
  cfg.c = c;
  cfg.calibration = calibration;
  const std::uint64_t base = seed ? *seed : default_seed();
  std::vector<schatten::HardnessReport> reports;
  for (int t = 0; t < trials; ++t) {
    cfg.seed = schatten::derive_seed(base, static_cast<std::uint64_t>(t));
    reports.push_back(schatten::hardness_experiment(n, p, cfg));
  }
  with_output(out_path, [&](std::ostream& out) { schatten::write_hardness_csv(out, reports); });
  return kOk;
}

int run_verify(const std::string& suite, int trials, std::optional<std::uint64_t> seed) {
  if (trials < 0) throw std::invalid_argument("--trials must be non-negative");
  const std::uint64_t base = seed ? *seed : default_seed();
  std::vector<std::uint64_t> seeds(static_cast<std::size_t>(trials));
  for (std::size_t t = 0; t < seeds.size(); ++t) seeds[t] = schatten::derive_seed(base, t);
  const schatten::VerifyReport report = schatten::run_verify(suite, seeds);
  std::cout << schatten::format_report(report);
  return report.passed() ? kOk : kFailure;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Schatten-p low-rank approximation from matrix-vector products"};
  app.require_subcommand(1);

  LraArgs lra;
  CLI::App* lra_cmd = app.add_subcommand("lra", "Low-rank approximation of a matrix file");
  lra_cmd->add_option("matrix", lra.matrix, "Matrix file (.mtx Matrix Market, otherwise dense CSV)")
      ->required();
  lra_cmd->add_option("--config", lra.config, "Key-value config file");
  lra_cmd->add_option("--k", lra.k, "Target rank");
  lra_cmd->add_option("--eps", lra.eps, "Accuracy in (0, 1)");
  lra_cmd->add_option("--p", lra.p, "Schatten order (number >= 1 or inf)");
  lra_cmd->add_option("--seed", lra.seed, "Random seed");
  lra_cmd->add_option("--c", lra.c, "Schedule constant");
  lra_cmd->add_option("--out", lra.out, "Output CSV (default stdout)");
  lra_cmd->add_flag("--no-certify", lra.no_certify, "Skip the dense residual certificate");

  std::string plan_path;
  std::string bench_out;
  std::optional<int> workers;
  CLI::App* bench_cmd = app.add_subcommand("bench", "Run a benchmark plan");
  bench_cmd->add_option("plan", plan_path, "Plan file")->required();
  bench_cmd->add_option("--out", bench_out, "Output CSV (default stdout)");
  bench_cmd->add_option("--workers", workers, "Worker threads");

  long long n = 40;
  double hp = 2.0;
  int htrials = 1;
  std::optional<std::uint64_t> hseed;
  double hc = schatten::kDefaultScheduleConstant;
  double calibration = 1.0;
  std::string hout;
  CLI::App* hard_cmd = app.add_subcommand("hardness", "Wishart min-eigenvalue reduction experiment");
  hard_cmd->add_option("--n", n, "Dimension");
  hard_cmd->add_option("--p", hp, "Schatten order");
  hard_cmd->add_option("--trials", htrials, "Independent samples");
  hard_cmd->add_option("--seed", hseed, "Random seed");
  hard_cmd->add_option("--c", hc, "Schedule constant");
  hard_cmd->add_option("--calibration", calibration, "eps = calibration / n^3");
  hard_cmd->add_option("--out", hout, "Output CSV (default stdout)");

  std::string suite = "all";
  int vtrials = 100;
  std::optional<std::uint64_t> vseed;
  CLI::App* verify_cmd = app.add_subcommand("verify", "Run inequality property suites");
  verify_cmd->add_option("--suite", suite, "Suite name or 'all'");
  verify_cmd->add_option("--trials", vtrials, "Trials per suite");
  verify_cmd->add_option("--seed", vseed, "Random seed");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (*lra_cmd) return run_lra(lra);
    if (*bench_cmd) return run_bench(plan_path, bench_out, workers);
    if (*hard_cmd) return run_hardness(n, hp, htrials, hseed, hc, calibration, hout);
    if (*verify_cmd) return run_verify(suite, vtrials, vseed);
  } catch (const schatten::ParseError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const std::out_of_range& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kFailure;
  }
  return kUsage;
}
