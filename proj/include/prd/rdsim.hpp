#pragma once

#include "prd/core.hpp"

#include <string>
#include <vector>

namespace prd {

struct RDGrid {
  int height = 0;
  int width = 0;
  Mat u;
  Mat v;
  double time = 0.0;
};

// Linear two-morphogen model
//   du/dt = a(u-h) + b(v-k) + mu  lap(u)/dx^2
//   dv/dt = c(u-h) + d(v-k) + nu  lap(v)/dx^2
struct TuringParams {
  double a = 1.0, b = -1.0, c = 3.0, d = -1.5;
  double h = 1.0, k = 1.0;
  double mu = 1e-4, nu = 6e-4;
  double dt = 0.02;
  double dx = 1.0;  // grid spacing; diffusion is scaled by 1/dx^2
};

// Gray-Scott model
//   du/dt = F(1-u) - u v^2 + mu lap(u)/dx^2
//   dv/dt = -(F+k)v + u v^2 + nu lap(v)/dx^2
struct GrayScottParams {
  double F = 0.025, k = 0.055;
  double mu = 2e-5, nu = 1e-5;
  double dt = 1.0;
  double dx = 1.0;
};

// 5-point stencil (4 neighbors - 4 center), periodic wraparound, unit
// spacing; physical spacing enters through the steppers' 1/dx^2 factor.
double laplacian(const Mat& field, int row, int col);
Mat laplacian(const Mat& field);

// u = h + Uniform(-amplitude, amplitude) per cell, v likewise around k.
RDGrid init_turing(int height, int width, double h, double k, double amplitude,
                   SeededRng& rng);

// u all ones and v all zeros with the central patch x patch square inverted.
RDGrid init_grayscott(int height, int width, int patch);

void step_turing(RDGrid& grid, const TuringParams& p);
void step_grayscott(RDGrid& grid, const GrayScottParams& p);

struct SpatialStats {
  double var_u = 0.0;  // population variance over cells
  double var_v = 0.0;
  double min = 0.0;  // over both fields
  double max = 0.0;
};

SpatialStats spatial_stats(const RDGrid& grid);

struct StatsRow {
  long step = 0;
  double time = 0.0;
  SpatialStats stats;
};

struct RDRunResult {
  std::vector<long> snapshot_steps;
  std::vector<Mat> snapshots_u;
  std::vector<Mat> snapshots_v;
  std::vector<StatsRow> stats;  // recorded at the same cadence
};

enum class RDModel { turing, grayscott };

struct RDRunParams {
  RDModel model = RDModel::turing;
  TuringParams turing;
  GrayScottParams grayscott;
};

// Steps the chosen model, capturing fields and stats at step 0 and at every
// multiple of snapshot_every (floor(steps/snapshot_every) + 1 captures).
RDRunResult run_rd(RDGrid grid, const RDRunParams& params, long steps, long snapshot_every);

void stats_to_csv(const std::vector<StatsRow>& stats, const std::string& path);

}  // namespace prd
