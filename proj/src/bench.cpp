#include "schatten/bench.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <mutex>
#include <ostream>
#include <sstream>
#include <thread>

#include "schatten/config.hpp"
#include "schatten/matrix_io.hpp"
#include "schatten/random.hpp"

namespace schatten {

namespace {

constexpr std::uint64_t kInstanceLabel = 0x1000;
constexpr std::uint64_t kLeftLabel = 1;
constexpr std::uint64_t kRightLabel = 2;

std::string num(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  return buf;
}

std::string opt(const std::optional<double>& x) { return x ? num(*x) : std::string(); }

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char ch : s) {
    if (ch == '"') out += '"';
    out += ch == '\n' ? ' ' : ch;
  }
  return out + "\"";
}

std::optional<double> ratio_of(const std::optional<double>& residual, const std::optional<double>& optimum) {
  if (!residual || !optimum || !(*optimum > 0.0)) return std::nullopt;
  return *residual / *optimum;
}

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream in(text);
  for (std::string item; std::getline(in, item, ',');) {
    const auto a = item.find_first_not_of(" \t");
    const auto b = item.find_last_not_of(" \t");
    out.push_back(a == std::string::npos ? std::string() : item.substr(a, b - a + 1));
  }
  return out;
}

bool parse_bool(const KeyValue& kv, const std::string& source) {
  if (kv.value == "true" || kv.value == "1" || kv.value == "yes") return true;
  if (kv.value == "false" || kv.value == "0" || kv.value == "no") return false;
  throw ParseError(source, kv.line, "'" + kv.key + "' needs true or false, got '" + kv.value + "'");
}

template <typename T, typename F>
std::vector<T> parse_list(const KeyValue& kv, const std::string& source, F convert) {
  std::vector<T> out;
  for (const std::string& item : split_list(kv.value)) {
    out.push_back(convert(KeyValue{kv.key, item, kv.line}));
  }
  return out;
}

const char* kLraColumns = "instance,n,d,k,p,eps,branch,applies,adjoint_applies";

}  // namespace

void BenchPlan::validate() const {
  if (eps.empty() || p.empty() || k.empty()) throw std::invalid_argument("bench plan: grids must be non-empty");
  if (seeds < 1) throw std::invalid_argument("bench plan: seeds must be >= 1");
  if (workers < 1) throw std::invalid_argument("bench plan: workers must be >= 1");
  if (!(c > 0.0)) throw std::invalid_argument("bench plan: c must be positive");
  for (double e : eps) {
    if (!(e > 0.0 && e < 1.0)) throw std::invalid_argument("bench plan: eps values must lie in (0, 1)");
  }
  for (Index kk : k) {
    if (kk < 1) throw std::invalid_argument("bench plan: k values must be >= 1");
  }
  if (instance.generator != Generator::kFile && (instance.n < 1 || instance.d < 1)) {
    throw std::invalid_argument("bench plan: n and d must be >= 1");
  }
  if (instance.generator == Generator::kFile && instance.file.empty()) {
    throw std::invalid_argument("bench plan: generator 'file' needs a path");
  }
}

BenchPlan parse_bench_plan(std::istream& in, const std::string& source) {
  BenchPlan plan;
  for (const KeyValue& kv : parse_key_values(in, source)) {
    try {
      if (kv.key == "generator") {
        if (kv.value == "powerlaw") plan.instance.generator = Generator::kPowerLaw;
        else if (kv.value == "diagonal") plan.instance.generator = Generator::kDiagonal;
        else if (kv.value == "wishart") plan.instance.generator = Generator::kWishart;
        else if (kv.value == "file") plan.instance.generator = Generator::kFile;
        else throw ParseError(source, kv.line, "unknown generator '" + kv.value + "'");
      } else if (kv.key == "n") {
        plan.instance.n = parse_integer(kv, source);
      } else if (kv.key == "d") {
        plan.instance.d = parse_integer(kv, source);
      } else if (kv.key == "alpha") {
        plan.instance.alpha = parse_double(kv, source);
      } else if (kv.key == "path") {
        plan.instance.file = kv.value;
      } else if (kv.key == "eps") {
        plan.eps = parse_list<double>(kv, source, [&](const KeyValue& x) { return parse_double(x, source); });
      } else if (kv.key == "p") {
        plan.p = parse_list<NormOrder>(kv, source, [](const KeyValue& x) { return NormOrder::parse(x.value); });
      } else if (kv.key == "k") {
        plan.k = parse_list<Index>(kv, source, [&](const KeyValue& x) { return parse_integer(x, source); });
      } else if (kv.key == "seeds") {
        plan.seeds = static_cast<int>(parse_integer(kv, source));
      } else if (kv.key == "seed") {
        plan.seed = parse_unsigned(kv, source);
      } else if (kv.key == "c") {
        plan.c = parse_double(kv, source);
      } else if (kv.key == "block_cap") {
        plan.block_cap = parse_integer(kv, source);
      } else if (kv.key == "certify") {
        plan.certify = parse_bool(kv, source);
      } else if (kv.key == "baseline") {
        plan.baseline = parse_bool(kv, source);
      } else if (kv.key == "timing") {
        plan.timing = parse_bool(kv, source);
      } else if (kv.key == "workers") {
        plan.workers = static_cast<int>(parse_integer(kv, source));
      } else {
        throw ParseError(source, kv.line, "unknown key '" + kv.key + "'");
      }
    } catch (const ParseError&) {
      throw;
    } catch (const std::invalid_argument& e) {
      throw ParseError(source, kv.line, e.what());
    }
  }
  try {
    plan.validate();
  } catch (const std::invalid_argument& e) {
    throw ParseError(source, 0, e.what());
  }
  return plan;
}

BenchPlan read_bench_plan(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError(path.string(), 0, "cannot open file");
  BenchPlan plan = parse_bench_plan(in, path.string());
  if (plan.instance.generator == Generator::kFile && plan.instance.file.is_relative()) {
    plan.instance.file = path.parent_path() / plan.instance.file;
  }
  return plan;
}

Eigen::MatrixXd power_law_matrix(Index n, Index d, double alpha, std::uint64_t seed) {
  const Index r = std::min(n, d);
  Eigen::VectorXd sigma(r);
  for (Index i = 0; i < r; ++i) sigma(i) = std::pow(static_cast<double>(i + 1), -alpha);
  const Eigen::MatrixXd u = random_orthonormal(n, r, derive_seed(seed, kLeftLabel));
  const Eigen::MatrixXd v = random_orthonormal(d, r, derive_seed(seed, kRightLabel));
  return u * sigma.asDiagonal() * v.transpose();
}

Instance make_instance(const InstanceSpec& spec, std::uint64_t seed, const std::string& id) {
  switch (spec.generator) {
    case Generator::kPowerLaw: {
      Eigen::MatrixXd m = power_law_matrix(spec.n, spec.d, spec.alpha, seed);
      return {id, LinearOperator::dense(m), std::move(m)};
    }
    case Generator::kDiagonal: {
      Eigen::VectorXd values(spec.d);
      for (Index i = 0; i < spec.d; ++i) values(i) = std::pow(static_cast<double>(i + 1), -spec.alpha);
      return {id, LinearOperator::diagonal(values), Eigen::MatrixXd(values.asDiagonal())};
    }
    case Generator::kWishart: {
      LinearOperator op = hard_instance(sample_wishart(spec.n, seed).w);
      Eigen::MatrixXd m = op.to_dense();
      return {id, std::move(op), std::move(m)};
    }
    case Generator::kFile: {
      LinearOperator op = read_matrix(spec.file);
      Eigen::MatrixXd m = op.to_dense();
      return {id, std::move(op), std::move(m)};
    }
  }
  throw std::logic_error("unknown generator");
}

std::vector<BenchRow> run_bench(const BenchPlan& plan) {
  plan.validate();

  struct Cell {
    Index k;
    NormOrder p;
    double eps;
  };
  std::vector<Cell> cells;
  for (Index k : plan.k) {
    for (const NormOrder& p : plan.p) {
      for (double eps : plan.eps) cells.push_back({k, p, eps});
    }
  }

  const char* generator_name[] = {"powerlaw", "diagonal", "wishart", "file"};
  std::vector<std::optional<Instance>> instances(plan.seeds);
  std::vector<std::string> instance_errors(plan.seeds);
  std::vector<std::string> ids(plan.seeds);
  for (int j = 0; j < plan.seeds; ++j) {
    ids[j] = std::string(generator_name[static_cast<int>(plan.instance.generator)]) + "-" +
             std::to_string(j);
    try {
      instances[j] = make_instance(plan.instance, derive_seed(plan.seed, kInstanceLabel + j), ids[j]);
    } catch (const std::exception& e) {
      instance_errors[j] = e.what();
    }
  }

  const int methods = plan.baseline ? 2 : 1;
  const std::size_t tasks = cells.size() * plan.seeds * methods;
  std::vector<BenchRow> rows(tasks);

  auto run_task = [&](std::size_t t) {
    const int method = static_cast<int>(t % methods);
    const int j = static_cast<int>((t / methods) % plan.seeds);
    const std::size_t ci = t / methods / plan.seeds;
    const Cell& cell = cells[ci];

    BenchRow& row = rows[t];
    row.instance = ids[j];
    row.k = cell.k;
    row.p = cell.p;
    row.eps = cell.eps;
    row.cell = ci;
    row.seed_index = j;
    row.baseline = method == 1;
    if (!instances[j]) {
      row.error = "instance: " + instance_errors[j];
      return;
    }
    const Instance& inst = *instances[j];
    row.n = inst.op.rows();
    row.d = inst.op.cols();

    LraConfig cfg;
    cfg.k = cell.k;
    cfg.eps = cell.eps;
    cfg.p = cell.p;
    cfg.c = plan.c;
    cfg.block_cap = plan.block_cap;
    cfg.seed = derive_seed(plan.seed, ((ci + 1) << 20) | static_cast<std::uint64_t>(j));
    const LinearOperator op = inst.op.clone();
    const Eigen::MatrixXd* oracle = plan.certify ? &inst.dense : nullptr;
    try {
      const auto start = std::chrono::steady_clock::now();
      const LraOutput out = row.baseline ? baseline_block_krylov(op, cfg, oracle)
                                         : schatten_lra(op, cfg, oracle);
      const auto stop = std::chrono::steady_clock::now();
      row.branch = row.baseline ? "BASELINE" : std::string(branch_name(out.decision.branch));
      row.applies = out.total_queries.applies;
      row.adjoint_applies = out.total_queries.adjoint_applies;
      row.total = out.total_queries.total();
      row.residual = out.residual_certificate;
      row.optimum = out.optimum;
      row.ratio = ratio_of(row.residual, row.optimum);
      if (plan.timing) row.wall_ms = std::chrono::duration<double, std::milli>(stop - start).count();
    } catch (const std::exception& e) {
      row.error = e.what();
    }
  };

  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t t; (t = next.fetch_add(1)) < tasks;) run_task(t);
  };
  const int threads = std::min<int>(plan.workers, static_cast<int>(std::max<std::size_t>(tasks, 1)));
  std::vector<std::thread> pool;
  for (int w = 1; w < threads; ++w) pool.emplace_back(worker);
  worker();
  for (std::thread& th : pool) th.join();
  return rows;
}

void write_bench_csv(std::ostream& out, const std::vector<BenchRow>& rows) {
  out << "# schatten bench v1\n";
  out << kLraColumns << ",total,residual,optimum,ratio,wall_ms,error\n";
  for (const BenchRow& r : rows) {
    out << csv_field(r.instance) << ',' << r.n << ',' << r.d << ',' << r.k << ','
        << r.p.to_string() << ',' << num(r.eps) << ',' << r.branch << ',' << r.applies << ','
        << r.adjoint_applies << ',' << r.total << ',' << opt(r.residual) << ','
        << opt(r.optimum) << ',' << opt(r.ratio) << ',' << opt(r.wall_ms) << ','
        << csv_field(r.error) << '\n';
  }
}

void write_lra_csv(std::ostream& out, const std::string& instance, Index n, Index d,
                   const LraConfig& cfg, const LraOutput& result) {
  out << "# schatten lra v1\n";
  out << kLraColumns << ",residual,optimum,ratio\n";
  out << csv_field(instance) << ',' << n << ',' << d << ',' << cfg.k << ',' << cfg.p.to_string()
      << ',' << num(cfg.eps) << ',' << branch_name(result.decision.branch) << ','
      << result.total_queries.applies << ',' << result.total_queries.adjoint_applies << ','
      << opt(result.residual_certificate) << ',' << opt(result.optimum) << ','
      << opt(ratio_of(result.residual_certificate, result.optimum)) << '\n';
}

void write_hardness_csv(std::ostream& out, const std::vector<HardnessReport>& reports) {
  out << "# schatten hardness v1\n";
  out << kLraColumns
      << ",residual,optimum,ratio,lambda_min_true,lambda_hat,abs_error,opnorm_w,"
         "opnorm_exceeded\n";
  for (const HardnessReport& r : reports) {
    const std::optional<double> residual = r.residual;
    const std::optional<double> optimum = r.optimum;
    out << "wishart-" << r.seed << ',' << r.n << ',' << r.n << ",1," << NormOrder(r.p).to_string()
        << ',' << num(r.eps) << ',' << r.branch << ',' << r.queries_used.applies << ','
        << r.queries_used.adjoint_applies << ',' << opt(residual) << ',' << opt(optimum) << ','
        << opt(ratio_of(residual, optimum)) << ',' << num(r.lambda_min_true) << ','
        << num(r.lambda_hat) << ',' << num(r.abs_error) << ','
        << num(r.opnorm_w) << ',' << (r.opnorm_exceeded ? 1 : 0) << '\n';
  }
}

}  // namespace schatten
