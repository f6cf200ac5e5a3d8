#pragma once

#include "prd/core.hpp"

#include <string>

namespace prd {

enum class InitMode { theory, xavier };

struct InitSnapshot {
  Mat U0;
  Mat V0;
};

// Two-layer ReLU generator f(x) = scale * V * relu(U x), scale = 1/sqrt(d_out*m).
// Scalar networks are the d_out == 1 case (V is the 1 x m row v).
struct GeneratorNet {
  Mat U;  // m x d_in
  Mat V;  // d_out x m
  int m = 0;
  int d_in = 0;
  int d_out = 0;
  InitMode mode = InitMode::theory;
  std::uint64_t seed = 0;
  InitSnapshot snapshot;  // captured at init, never mutated afterwards

  double scale() const;
};

// Two-layer ReLU critic g(y) = (1/sqrt(m)) a^T relu(W y) with each row of W
// kept inside the l2 ball of radius L.
struct DiscriminatorNet {
  Mat W;  // m x d_out
  Vec a;  // entries in {-1, +1}
  int m = 0;
  int d_out = 0;
  double L = 0.0;
};

// theory: U ~ N(0,1), V Rademacher. xavier: both layers N(0,1); the network's
// 1/sqrt(d_out*m) output factor carries the variance scaling in both modes.
GeneratorNet init_generator(int m, int d_in, int d_out, InitMode mode, SeededRng& rng);

Vec forward_generator(const GeneratorNet& net, const Vec& x);

// Batched forward: X is n x d_in, result is n x d_out.
Mat forward_generator(const GeneratorNet& net, const Mat& X);

// Batched forward with the intermediates exposed: pre = X U^T (n x m),
// h = max(pre, 0), z = scale * h V^T.  Gradient code must obtain z through
// this one compiled path rather than re-deriving it, so that a residual of
// exactly zero yields bitwise-zero gradients.
struct ForwardParts {
  Mat pre;
  Mat h;
  Mat z;
};
ForwardParts forward_parts(const GeneratorNet& net, const Mat& X);

DiscriminatorNet init_discriminator(int m, int d_out, double L, SeededRng& rng);

double forward_discriminator(const DiscriminatorNet& disc, const Vec& y);

// Flat binary checkpoint: header (magic, version, dims, mode, seed) followed
// by U, V, U0, V0 as row-major little-endian doubles.
void save_generator(const GeneratorNet& net, const std::string& path);
GeneratorNet load_generator(const std::string& path);

}  // namespace prd
