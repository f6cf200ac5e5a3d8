#include "prd/featviz.hpp"

#include "prd/io.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

namespace prd {

AscentResult maximize_excitation(const Vec& u_j, const Vec& x0, const AscentConfig& cfg) {
  if (u_j.size() != x0.size())
    throw std::invalid_argument("maximize_excitation: dimension mismatch");
  if (cfg.epsilon <= 0.0 || cfg.iterations < 1)
    throw std::invalid_argument("maximize_excitation: invalid config");

  AscentResult res;
  // Best excitation reachable in the ball: u_j.x0 + eps * ||u_j||_1.
  if (u_j.dot(x0) + cfg.epsilon * u_j.lpNorm<1>() < 0.0) {
    res.delta = Vec::Zero(u_j.size());
    res.dead_within_ball = true;
    return res;
  }
  Vec delta = Vec::Zero(u_j.size());
  for (int it = 0; it < cfg.iterations; ++it) {
    delta += cfg.step_size * u_j;  // objective is linear in delta
    delta = delta.cwiseMax(-cfg.epsilon).cwiseMin(cfg.epsilon);
  }
  res.delta = std::move(delta);
  return res;
}

std::vector<GrayImage> export_weight_images(const Mat& U, int image_height, int image_width,
                                            int top_k) {
  if (Eigen::Index(image_height) * image_width != U.cols())
    throw std::invalid_argument("export_weight_images: d_in != height * width");
  if (top_k < 0 || top_k > U.rows())
    throw std::invalid_argument("export_weight_images: top_k out of range");

  std::vector<Eigen::Index> idx(U.rows());
  std::iota(idx.begin(), idx.end(), 0);
  Vec norms = U.rowwise().norm();
  std::stable_sort(idx.begin(), idx.end(),
                   [&](Eigen::Index a, Eigen::Index b) { return norms(a) > norms(b); });

  std::vector<GrayImage> out;
  out.reserve(top_k);
  for (int r = 0; r < top_k; ++r) {
    Vec row = U.row(idx[r]);
    Mat img = Eigen::Map<Mat>(row.data(), image_height, image_width);  // row-major reshape
    out.push_back({image_height, image_width, to_gray8(img)});
  }
  return out;
}

Vec neuron_variances(const Mat& U) {
  Vec out(U.rows());
  for (Eigen::Index r = 0; r < U.rows(); ++r) {
    double mean = U.row(r).mean();
    out(r) = (U.row(r).array() - mean).square().sum() / double(U.cols());
  }
  return out;
}

void variances_to_csv(const Vec& variances, const std::string& path) {
  CsvWriter csv(path);
  csv.row({"neuron", "variance"});
  for (Eigen::Index i = 0; i < variances.size(); ++i)
    csv.row({std::to_string(i), format_double(variances(i))});
}

}  // namespace prd
