#include "prd/rdsim.hpp"

#include "prd/io.hpp"

#include <cmath>
#include <stdexcept>

namespace prd {

namespace {

void check_grid(const RDGrid& g) {
  if (g.height < 1 || g.width < 1) throw std::invalid_argument("rdsim: grid must be >= 1x1");
  if (g.u.rows() != g.height || g.u.cols() != g.width || g.v.rows() != g.height ||
      g.v.cols() != g.width)
    throw std::invalid_argument("rdsim: field dimensions do not match grid");
}

void check_finite(const RDGrid& g, const char* model) {
  if (!std::isfinite(g.u.sum()) || !std::isfinite(g.v.sum()))
    throw std::runtime_error(std::string(model) + ": non-finite field at t = " +
                             std::to_string(g.time));
}

}  // namespace

double laplacian(const Mat& f, int row, int col) {
  const int h = static_cast<int>(f.rows());
  const int w = static_cast<int>(f.cols());
  const int up = (row + h - 1) % h, down = (row + 1) % h;
  const int left = (col + w - 1) % w, right = (col + 1) % w;
  return f(up, col) + f(down, col) + f(row, left) + f(row, right) - 4.0 * f(row, col);
}

Mat laplacian(const Mat& f) {
  const Eigen::Index h = f.rows(), w = f.cols();
  Mat out(h, w);
  for (Eigen::Index i = 0; i < h; ++i) {
    const Eigen::Index up = (i + h - 1) % h, down = (i + 1) % h;
    for (Eigen::Index j = 0; j < w; ++j) {
      const Eigen::Index left = (j + w - 1) % w, right = (j + 1) % w;
      out(i, j) = f(up, j) + f(down, j) + f(i, left) + f(i, right) - 4.0 * f(i, j);
    }
  }
  return out;
}

RDGrid init_turing(int height, int width, double h, double k, double amplitude,
                   SeededRng& rng) {
  if (amplitude < 0.0) throw std::invalid_argument("init_turing: amplitude >= 0");
  RDGrid g;
  g.height = height;
  g.width = width;
  g.u = Mat(height, width);
  g.v = Mat(height, width);
  for (int i = 0; i < height; ++i)
    for (int j = 0; j < width; ++j) g.u(i, j) = h + rng.uniform(-amplitude, amplitude);
  for (int i = 0; i < height; ++i)
    for (int j = 0; j < width; ++j) g.v(i, j) = k + rng.uniform(-amplitude, amplitude);
  check_grid(g);
  return g;
}

RDGrid init_grayscott(int height, int width, int patch) {
  if (patch < 0 || patch > height || patch > width)
    throw std::invalid_argument("init_grayscott: patch must fit the grid");
  RDGrid g;
  g.height = height;
  g.width = width;
  g.u = Mat::Ones(height, width);
  g.v = Mat::Zero(height, width);
  const int r0 = (height - patch) / 2, c0 = (width - patch) / 2;
  for (int i = 0; i < patch; ++i)
    for (int j = 0; j < patch; ++j) {
      g.u(r0 + i, c0 + j) = 0.0;
      g.v(r0 + i, c0 + j) = 1.0;
    }
  check_grid(g);
  return g;
}

void step_turing(RDGrid& g, const TuringParams& p) {
  check_grid(g);
  const double inv_dx2 = 1.0 / (p.dx * p.dx);
  Mat du = p.a * (g.u.array() - p.h).matrix() + p.b * (g.v.array() - p.k).matrix() +
           (p.mu * inv_dx2) * laplacian(g.u);
  Mat dv = p.c * (g.u.array() - p.h).matrix() + p.d * (g.v.array() - p.k).matrix() +
           (p.nu * inv_dx2) * laplacian(g.v);
  g.u += p.dt * du;
  g.v += p.dt * dv;
  g.time += p.dt;
  check_finite(g, "step_turing");
}

void step_grayscott(RDGrid& g, const GrayScottParams& p) {
  check_grid(g);
  const double inv_dx2 = 1.0 / (p.dx * p.dx);
  Mat uvv = g.u.cwiseProduct(g.v.cwiseProduct(g.v));
  Mat du = p.F * (1.0 - g.u.array()).matrix() - uvv + (p.mu * inv_dx2) * laplacian(g.u);
  Mat dv = -(p.F + p.k) * g.v + uvv + (p.nu * inv_dx2) * laplacian(g.v);
  g.u += p.dt * du;
  g.v += p.dt * dv;
  g.time += p.dt;
  check_finite(g, "step_grayscott");
}

SpatialStats spatial_stats(const RDGrid& g) {
  check_grid(g);
  SpatialStats s;
  const double cells = double(g.u.size());
  const double mu_u = g.u.mean(), mu_v = g.v.mean();
  s.var_u = (g.u.array() - mu_u).square().sum() / cells;
  s.var_v = (g.v.array() - mu_v).square().sum() / cells;
  s.min = std::min(g.u.minCoeff(), g.v.minCoeff());
  s.max = std::max(g.u.maxCoeff(), g.v.maxCoeff());
  return s;
}

RDRunResult run_rd(RDGrid grid, const RDRunParams& params, long steps, long snapshot_every) {
  if (steps < 0) throw std::invalid_argument("run_rd: steps >= 0");
  if (snapshot_every < 1) throw std::invalid_argument("run_rd: snapshot_every >= 1");
  RDRunResult res;
  auto capture = [&](long step) {
    res.snapshot_steps.push_back(step);
    res.snapshots_u.push_back(grid.u);
    res.snapshots_v.push_back(grid.v);
    res.stats.push_back({step, grid.time, spatial_stats(grid)});
  };
  capture(0);
  for (long s = 1; s <= steps; ++s) {
    if (params.model == RDModel::turing)
      step_turing(grid, params.turing);
    else
      step_grayscott(grid, params.grayscott);
    if (s % snapshot_every == 0) capture(s);
  }
  return res;
}

void stats_to_csv(const std::vector<StatsRow>& stats, const std::string& path) {
  CsvWriter csv(path);
  csv.row({"step", "time", "var_u", "var_v", "min", "max"});
  for (const auto& r : stats)
    csv.row({std::to_string(r.step), format_double(r.time), format_double(r.stats.var_u),
             format_double(r.stats.var_v), format_double(r.stats.min),
             format_double(r.stats.max)});
}

}  // namespace prd
