#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "schatten/hardness.hpp"
#include "schatten/lra.hpp"
#include "schatten/parse_error.hpp"

namespace schatten {

enum class Generator { kPowerLaw, kDiagonal, kWishart, kFile };

struct InstanceSpec {
  Generator generator = Generator::kPowerLaw;
  Index n = 200;
  Index d = 150;
  double alpha = 1.0;  // sigma_i = i^-alpha
  std::filesystem::path file;
};

/// Sweep over eps x p x k for `seeds` instances per cell.
///
/// Plan file keys: generator (powerlaw | diagonal | wishart | file), n, d,
/// alpha, path, eps, p, k (comma-separated lists), seeds, seed, c,
/// block_cap, certify, baseline, timing (true/false), workers.
struct BenchPlan {
  InstanceSpec instance;
  std::vector<double> eps{0.1};
  std::vector<NormOrder> p{NormOrder(2.0)};
  std::vector<Index> k{1};
  int seeds = 1;
  std::uint64_t seed = 0;
  double c = kDefaultScheduleConstant;
  std::optional<Index> block_cap;
  bool certify = true;
  bool baseline = true;
  bool timing = true;
  int workers = 1;

  void validate() const;
};

BenchPlan parse_bench_plan(std::istream& in, const std::string& source = "<plan>");
BenchPlan read_bench_plan(const std::filesystem::path& path);

struct BenchRow {
  std::string instance;
  Index n = 0;
  Index d = 0;
  Index k = 0;
  NormOrder p = 2.0;
  double eps = 0.0;
  std::string branch;  // BASELINE for the comparison run
  std::uint64_t applies = 0;
  std::uint64_t adjoint_applies = 0;
  std::uint64_t total = 0;
  std::optional<double> residual;
  std::optional<double> optimum;
  std::optional<double> ratio;
  std::optional<double> wall_ms;
  std::string error;
  std::size_t cell = 0;
  int seed_index = 0;
  bool baseline = false;
};

/// One row per (cell, seed, method), ordered by cell, then seed, with the
/// baseline row after ours. Independent of the worker count.
std::vector<BenchRow> run_bench(const BenchPlan& plan);

/// Synthetic operator for seed index `j` and its explicit matrix.
struct Instance {
  std::string id;
  LinearOperator op;
  Eigen::MatrixXd dense;
};
Instance make_instance(const InstanceSpec& spec, std::uint64_t seed, const std::string& id);

/// n x d matrix with singular values i^-alpha and Haar singular vectors.
Eigen::MatrixXd power_law_matrix(Index n, Index d, double alpha, std::uint64_t seed);

void write_bench_csv(std::ostream& out, const std::vector<BenchRow>& rows);

/// One-row CSV for a single LRA run.
void write_lra_csv(std::ostream& out, const std::string& instance, Index n, Index d,
                   const LraConfig& cfg, const LraOutput& result);

void write_hardness_csv(std::ostream& out, const std::vector<HardnessReport>& reports);

}  // namespace schatten
