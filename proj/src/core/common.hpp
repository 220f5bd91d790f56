#pragma once

#include <Eigen/Dense>
#include <Eigen/SparseCore>

#include <cmath>
#include <cstdint>
#include <random>
#include <span>
#include <stdexcept>
#include <string>

namespace advdrop {

using Mat = Eigen::MatrixXd;
using Vec = Eigen::VectorXd;
using SpMat = Eigen::SparseMatrix<double, Eigen::RowMajor>;
using Rng = std::mt19937_64;

struct io_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct parse_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Non-finite values where finite ones are required (diverged training etc).
struct numeric_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

inline double sigmoid(double x) {
  if (x >= 0.0) {
    return 1.0 / (1.0 + std::exp(-x));
  }
  const double z = std::exp(x);
  return z / (1.0 + z);
}

// log(1 + e^x) without overflow for large |x|.
inline double softplus(double x) {
  if (x > 0.0) {
    return x + std::log1p(std::exp(-x));
  }
  return std::log1p(std::exp(x));
}

inline std::uint64_t fnv1a64(std::span<const unsigned char> bytes,
                             std::uint64_t seed = 0xcbf29ce484222325ull) {
  std::uint64_t h = seed;
  for (unsigned char b : bytes) {
    h ^= b;
    h *= 0x100000001b3ull;
  }
  return h;
}

inline std::uint64_t fnv1a64_str(const std::string& s,
                                 std::uint64_t seed = 0xcbf29ce484222325ull) {
  return fnv1a64(
      {reinterpret_cast<const unsigned char*>(s.data()), s.size()}, seed);
}

// Fixed formatting for CSV output; %.10g keeps files stable across runs.
std::string fmt_double(double v);

// Uniform draw in [0, 1).
inline double uniform01(Rng& rng) {
  return std::uniform_real_distribution<double>(0.0, 1.0)(rng);
}

}  // namespace advdrop
