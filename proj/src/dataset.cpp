#include "prd/dataset.hpp"

#include "prd/io.hpp"

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <numeric>
#include <stdexcept>
#include <string>

namespace prd {

namespace {

void validate(const ManifoldSpec& s) {
  if (s.n_total <= 0 || s.n_train <= 0 || s.n_train >= s.n_total)
    throw std::invalid_argument("manifold spec: need 0 < n_train < n_total");
  if (s.d_in <= 0 || s.manifold_dim <= 0 || s.manifold_dim >= s.d_in)
    throw std::invalid_argument("manifold spec: need 0 < manifold_dim < d_in");
  if (s.modes < 1) throw std::invalid_argument("manifold spec: modes >= 1");
  if (s.scalar_labels && s.modes < 2)
    throw std::invalid_argument("manifold spec: scalar labels need modes >= 2");
}

}  // namespace

Dataset generate_manifold_dataset(const ManifoldSpec& spec) {
  validate(spec);
  SeededRng rng(spec.seed);

  Mat centers(spec.modes, spec.manifold_dim);
  rng.fill_uniform(centers, -spec.center_box, spec.center_box);

  // Even split, earlier modes take the remainder.
  std::vector<long> counts(spec.modes, spec.n_total / spec.modes);
  for (long i = 0; i < spec.n_total % spec.modes; ++i) counts[i] += 1;

  const int d_out = spec.scalar_labels ? 1 : spec.modes;
  std::vector<Sample> all;
  all.reserve(spec.n_total);
  for (int mode = 0; mode < spec.modes; ++mode) {
    for (long c = 0; c < counts[mode]; ++c) {
      Sample s;
      s.x = Vec::Constant(spec.d_in, spec.fill_value);
      for (int k = 0; k < spec.manifold_dim; ++k)
        s.x(k) = centers(mode, k) + rng.gaussian();
      if (spec.scalar_labels) {
        s.y = Vec::Constant(1, -1.0 + 2.0 * mode / (spec.modes - 1));
      } else {
        s.y = Vec::Zero(spec.modes);
        s.y(mode) = 1.0;
      }
      all.push_back(std::move(s));
    }
  }

  // Seeded Fisher-Yates shuffle, then split.
  for (long i = spec.n_total - 1; i > 0; --i) {
    long j = static_cast<long>(rng.next_u64() % static_cast<std::uint64_t>(i + 1));
    std::swap(all[i], all[j]);
  }

  Dataset ds;
  ds.d_in = spec.d_in;
  ds.d_out = d_out;
  ds.provenance = "manifold(seed=" + std::to_string(spec.seed) + ")";
  ds.train.assign(all.begin(), all.begin() + spec.n_train);
  ds.test.assign(all.begin() + spec.n_train, all.end());
  return ds;
}

Dataset normalize_unit(const Dataset& ds) {
  Dataset out = ds;
  long index = 0;
  auto scale_all = [&](std::vector<Sample>& samples, const char* split) {
    for (auto& s : samples) {
      double nrm = s.x.norm();
      if (nrm == 0.0)
        throw std::domain_error("normalize_unit: zero-norm input at " + std::string(split) +
                                " sample " + std::to_string(index));
      s.x /= nrm;
      ++index;
    }
  };
  scale_all(out.train, "train");
  index = 0;
  scale_all(out.test, "test");
  return out;
}

namespace {

std::uint32_t read_be32(std::istream& in, const std::string& what) {
  unsigned char b[4];
  if (!in.read(reinterpret_cast<char*>(b), 4))
    throw std::runtime_error("idx: truncated file while reading " + what);
  return (std::uint32_t(b[0]) << 24) | (std::uint32_t(b[1]) << 16) |
         (std::uint32_t(b[2]) << 8) | std::uint32_t(b[3]);
}

}  // namespace

Dataset load_idx(const std::string& images_path, const std::string& labels_path) {
  std::ifstream img(images_path, std::ios::binary);
  if (!img) throw std::runtime_error("idx: cannot open " + images_path);
  std::ifstream lab(labels_path, std::ios::binary);
  if (!lab) throw std::runtime_error("idx: cannot open " + labels_path);

  if (std::uint32_t magic = read_be32(img, "image magic"); magic != 0x00000803u)
    throw std::runtime_error("idx: wrong magic in " + images_path);
  if (std::uint32_t magic = read_be32(lab, "label magic"); magic != 0x00000801u)
    throw std::runtime_error("idx: wrong magic in " + labels_path);

  const std::uint32_t n_img = read_be32(img, "image count");
  const std::uint32_t rows = read_be32(img, "row count");
  const std::uint32_t cols = read_be32(img, "column count");
  const std::uint32_t n_lab = read_be32(lab, "label count");
  if (n_img != n_lab)
    throw std::runtime_error("idx: image/label count mismatch (" + std::to_string(n_img) +
                             " vs " + std::to_string(n_lab) + ")");

  const std::size_t d_in = std::size_t(rows) * cols;
  Dataset ds;
  ds.d_in = static_cast<int>(d_in);
  ds.d_out = 10;
  ds.provenance = "idx(" + images_path + ")";
  ds.train.reserve(n_img);

  std::vector<unsigned char> pix(d_in);
  for (std::uint32_t i = 0; i < n_img; ++i) {
    if (!img.read(reinterpret_cast<char*>(pix.data()), static_cast<std::streamsize>(d_in)))
      throw std::runtime_error("idx: truncated image data at sample " + std::to_string(i));
    int label = lab.get();
    if (label == EOF)
      throw std::runtime_error("idx: truncated label data at sample " + std::to_string(i));
    if (label > 9) throw std::runtime_error("idx: label out of range at sample " + std::to_string(i));
    Sample s;
    s.x = Vec(d_in);
    for (std::size_t k = 0; k < d_in; ++k) s.x(k) = pix[k] / 255.0;
    s.y = Vec::Zero(10);
    s.y(label) = 1.0;
    ds.train.push_back(std::move(s));
  }
  return ds;
}

void export_csv(const Dataset& ds, const std::string& path) {
  CsvWriter csv(path);
  std::vector<std::string> header;
  for (int k = 0; k < ds.d_in; ++k) header.push_back("x" + std::to_string(k));
  header.push_back("label");
  csv.row(header);
  auto dump = [&](const std::vector<Sample>& samples) {
    for (const auto& s : samples) {
      std::vector<std::string> cells;
      cells.reserve(ds.d_in + 1);
      for (int k = 0; k < ds.d_in; ++k) cells.push_back(format_double(s.x(k)));
      if (ds.d_out == 1) {
        cells.push_back(format_double(s.y(0)));
      } else {
        Eigen::Index arg = 0;
        s.y.maxCoeff(&arg);
        cells.push_back(std::to_string(arg));
      }
      csv.row(cells);
    }
  };
  dump(ds.train);
  dump(ds.test);
}

Batch to_batch(const std::vector<Sample>& samples) {
  if (samples.empty()) throw std::invalid_argument("to_batch: empty sample list");
  Batch b;
  b.X = Mat(samples.size(), samples[0].x.size());
  b.Y = Mat(samples.size(), samples[0].y.size());
  for (std::size_t i = 0; i < samples.size(); ++i) {
    b.X.row(i) = samples[i].x.transpose();
    b.Y.row(i) = samples[i].y.transpose();
  }
  return b;
}

}  // namespace prd
