#include "schatten/random.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace schatten {

std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t label) {
  return mix64(mix64(seed) ^ (label * 0xd1b54a32d192ed03ULL));
}

namespace {

// 53-bit mantissa mapped into the open interval (0, 1).
double to_open_unit(std::uint64_t bits) {
  return (static_cast<double>(bits >> 11) + 0.5) * 0x1.0p-53;
}

}  // namespace

double GaussianStream::uniform(std::uint64_t index) const {
  std::uint64_t key = mix64(seed_ ^ mix64(stream_ + 0x632be59bd9b4e019ULL));
  return to_open_unit(mix64(key ^ mix64(index)));
}

double GaussianStream::normal(std::uint64_t index) const {
  // Box-Muller on two independent uniforms derived from the same counter.
  const double u1 = uniform(2 * index);
  const double u2 = uniform(2 * index + 1);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

Eigen::MatrixXd GaussianStream::matrix(Eigen::Index rows, Eigen::Index cols) const {
  Eigen::MatrixXd out(rows, cols);
  std::uint64_t index = 0;
  for (Eigen::Index j = 0; j < cols; ++j) {
    for (Eigen::Index i = 0; i < rows; ++i) {
      out(i, j) = normal(index++);
    }
  }
  return out;
}

Eigen::MatrixXd random_orthonormal(Eigen::Index rows, Eigen::Index cols,
                                   std::uint64_t seed) {
  if (cols > rows) {
    throw std::invalid_argument("random_orthonormal: cols must not exceed rows");
  }
  Eigen::MatrixXd g = GaussianStream(seed).matrix(rows, cols);
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(g);
  Eigen::MatrixXd q = qr.householderQ() * Eigen::MatrixXd::Identity(rows, cols);
  // Sign fix so the distribution is Haar rather than QR-biased.
  const Eigen::MatrixXd r = qr.matrixQR().topRows(cols).triangularView<Eigen::Upper>();
  for (Eigen::Index j = 0; j < cols; ++j) {
    if (r(j, j) < 0) q.col(j) *= -1.0;
  }
  return q;
}

}  // namespace schatten
