#pragma once

#include "prd/core.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace prd {

struct AscentConfig {
  double epsilon = 0.007;  // l-infinity radius
  double step_size = 0.1;
  int iterations = 100;
};

struct AscentResult {
  Vec delta;
  bool dead_within_ball = false;  // unit cannot activate anywhere in the ball
};

// Projected gradient ascent on the unit's excitation u_j.(x0 + delta) with a
// componentwise clamp to [-epsilon, epsilon] after every step. Maximizing the
// relu of the excitation coincides with maximizing the excitation itself
// (relu is monotone); when even the ball's maximal excitation stays negative
// the unit is flagged dead and delta = 0 is returned.
AscentResult maximize_excitation(const Vec& u_j, const Vec& x0, const AscentConfig& cfg);

struct GrayImage {
  int height = 0;
  int width = 0;
  std::vector<std::uint8_t> pixels;  // row-major
};

// Rows with the top_k largest l2 norms (ties broken toward the lower row
// index), each min-max scaled to 8-bit gray and reshaped row-major.
std::vector<GrayImage> export_weight_images(const Mat& U, int image_height, int image_width,
                                            int top_k);

// Population variance of each row's entries.
Vec neuron_variances(const Mat& U);

void variances_to_csv(const Vec& variances, const std::string& path);

}  // namespace prd
