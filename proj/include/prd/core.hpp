#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <random>

namespace prd {

// Row-major throughout: checkpoints and tests address entries by (row, col)
// in storage order.
using Mat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Vec = Eigen::VectorXd;

// Deterministic seeded generator. Distribution code is hand-rolled on top of
// std::mt19937_64 because std::normal_distribution etc. are not pinned by the
// standard and differ across library implementations; every draw here is
// bit-exact on any conforming platform.
class SeededRng {
 public:
  explicit SeededRng(std::uint64_t seed, std::uint64_t stream = 0);

  std::uint64_t next_u64();
  // Uniform on [0, 1).
  double uniform();
  double uniform(double lo, double hi);
  // Standard normal via Box-Muller (one value cached).
  double gaussian();
  // -1 or +1 with equal probability.
  double rademacher();

  std::uint64_t seed() const { return seed_; }
  std::uint64_t stream() const { return stream_; }

  void fill_gaussian(Mat& m);
  void fill_rademacher(Mat& m);
  void fill_uniform(Mat& m, double lo, double hi);

 private:
  std::uint64_t seed_ = 0;
  std::uint64_t stream_ = 0;
  std::mt19937_64 gen_;
  double cached_gauss_ = 0.0;
  bool has_cached_gauss_ = false;
};

struct Spectrum {
  double lambda_min = 0.0;
  double lambda_max = 0.0;
  int iterations_used = 0;
};

// Extreme eigenvalues of a symmetric matrix: lambda_max by power iteration on
// M (sign-corrected when the dominant eigenvalue is negative), lambda_min by
// power iteration on (cI - M) with c = lambda_max. Throws std::invalid_argument
// if M is not symmetric within sym_tol, std::runtime_error if either phase
// fails to reach `tol` residual within max_iters.
Spectrum spectral_extremes(const Mat& M, double tol = 1e-8, int max_iters = 10000,
                           double sym_tol = 1e-8);

}  // namespace prd
