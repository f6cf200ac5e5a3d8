#pragma once

#include "prd/core.hpp"

#include <string>
#include <vector>

namespace prd {

struct Sample {
  Vec x;
  Vec y;
};

struct Dataset {
  std::vector<Sample> train;
  std::vector<Sample> test;
  int d_in = 0;
  int d_out = 0;
  std::string provenance;
};

// Synthetic mixture-of-Gaussians manifold data: the first manifold_dim
// coordinates are blob samples (one isotropic mode per class, centers drawn
// uniformly in [-center_box, center_box]^manifold_dim, unit mode std, samples
// split evenly across modes), the remaining coordinates hold fill_value.
struct ManifoldSpec {
  long n_total = 0;
  long n_train = 0;
  int d_in = 0;
  int modes = 1;
  int manifold_dim = 1;
  double fill_value = 1.0;
  std::uint64_t seed = 1;
  bool scalar_labels = false;  // one-hot over modes when false
  double center_box = 10.0;
};

Dataset generate_manifold_dataset(const ManifoldSpec& spec);

// Scales every input (train and test) to unit l2 norm; labels untouched.
// Throws std::domain_error naming the first zero-norm sample.
[[nodiscard]] Dataset normalize_unit(const Dataset& ds);

// IDX image/label pair (big-endian, magics 0x803 / 0x801). Pixels scaled to
// [0,1], labels one-hot with d_out = 10; all samples land in `train`.
Dataset load_idx(const std::string& images_path, const std::string& labels_path);

// One sample per row: features, then the label as a class index (argmax of a
// one-hot y) or the raw scalar when d_out == 1. Train rows precede test rows.
void export_csv(const Dataset& ds, const std::string& path);

// Dense views of a sample list: X is n x d_in, Y is n x d_out.
struct Batch {
  Mat X;
  Mat Y;
};
Batch to_batch(const std::vector<Sample>& samples);

}  // namespace prd
