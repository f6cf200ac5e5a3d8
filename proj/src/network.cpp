#include "prd/network.hpp"

#include "prd/objective.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <stdexcept>

static_assert(std::endian::native == std::endian::little,
              "checkpoint format assumes a little-endian host");

namespace prd {

double GeneratorNet::scale() const { return 1.0 / std::sqrt(double(d_out) * m); }

GeneratorNet init_generator(int m, int d_in, int d_out, InitMode mode, SeededRng& rng) {
  if (m < 1 || d_in < 1 || d_out < 1)
    throw std::invalid_argument("init_generator: dimensions must be >= 1");
  GeneratorNet net;
  net.m = m;
  net.d_in = d_in;
  net.d_out = d_out;
  net.mode = mode;
  net.seed = rng.seed();
  net.U = Mat(m, d_in);
  net.V = Mat(d_out, m);
  rng.fill_gaussian(net.U);
  if (mode == InitMode::theory)
    rng.fill_rademacher(net.V);
  else
    rng.fill_gaussian(net.V);
  net.snapshot.U0 = net.U;
  net.snapshot.V0 = net.V;
  return net;
}

Vec forward_generator(const GeneratorNet& net, const Vec& x) {
  if (x.size() != net.d_in) throw std::invalid_argument("forward_generator: bad input length");
  Vec h = (net.U * x).cwiseMax(0.0);
  return net.scale() * (net.V * h);
}

Mat forward_generator(const GeneratorNet& net, const Mat& X) {
  return forward_parts(net, X).z;
}

ForwardParts forward_parts(const GeneratorNet& net, const Mat& X) {
  if (X.cols() != net.d_in) throw std::invalid_argument("forward_generator: bad input width");
  ForwardParts p;
  p.pre = X * net.U.transpose();                   // n x m
  p.h = p.pre.cwiseMax(0.0);
  p.z = net.scale() * (p.h * net.V.transpose());   // n x d_out
  return p;
}

DiscriminatorNet init_discriminator(int m, int d_out, double L, SeededRng& rng) {
  if (m < 1 || d_out < 1) throw std::invalid_argument("init_discriminator: dimensions must be >= 1");
  if (L <= 0.0) throw std::invalid_argument("init_discriminator: L must be positive");
  DiscriminatorNet disc;
  disc.m = m;
  disc.d_out = d_out;
  disc.L = L;
  disc.W = Mat(m, d_out);
  rng.fill_gaussian(disc.W);
  disc.W = project_row_norm(disc.W, L);
  Mat a(m, 1);
  rng.fill_rademacher(a);
  disc.a = a.col(0);
  return disc;
}

double forward_discriminator(const DiscriminatorNet& disc, const Vec& y) {
  if (y.size() != disc.d_out)
    throw std::invalid_argument("forward_discriminator: bad input length");
  Vec h = (disc.W * y).cwiseMax(0.0);
  return disc.a.dot(h) / std::sqrt(double(disc.m));
}

namespace {

constexpr std::uint32_t kMagic = 0x4e414c50u;  // "PLAN"
constexpr std::uint32_t kVersion = 1;

void put_u32(std::ostream& out, std::uint32_t v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof v);
}
void put_u64(std::ostream& out, std::uint64_t v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof v);
}
void put_mat(std::ostream& out, const Mat& m) {
  out.write(reinterpret_cast<const char*>(m.data()),
            static_cast<std::streamsize>(sizeof(double) * m.size()));
}
std::uint32_t get_u32(std::istream& in) {
  std::uint32_t v = 0;
  if (!in.read(reinterpret_cast<char*>(&v), sizeof v))
    throw std::runtime_error("checkpoint: truncated header");
  return v;
}
std::uint64_t get_u64(std::istream& in) {
  std::uint64_t v = 0;
  if (!in.read(reinterpret_cast<char*>(&v), sizeof v))
    throw std::runtime_error("checkpoint: truncated header");
  return v;
}
Mat get_mat(std::istream& in, Eigen::Index rows, Eigen::Index cols) {
  Mat m(rows, cols);
  if (!in.read(reinterpret_cast<char*>(m.data()),
               static_cast<std::streamsize>(sizeof(double) * m.size())))
    throw std::runtime_error("checkpoint: truncated payload");
  return m;
}

}  // namespace

void save_generator(const GeneratorNet& net, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("checkpoint: cannot open " + path);
  put_u32(out, kMagic);
  put_u32(out, kVersion);
  put_u32(out, static_cast<std::uint32_t>(net.m));
  put_u32(out, static_cast<std::uint32_t>(net.d_in));
  put_u32(out, static_cast<std::uint32_t>(net.d_out));
  put_u32(out, net.mode == InitMode::theory ? 0u : 1u);
  put_u64(out, net.seed);
  put_mat(out, net.U);
  put_mat(out, net.V);
  put_mat(out, net.snapshot.U0);
  put_mat(out, net.snapshot.V0);
  if (!out) throw std::runtime_error("checkpoint: write failed");
}

GeneratorNet load_generator(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("checkpoint: cannot open " + path);
  if (get_u32(in) != kMagic) throw std::runtime_error("checkpoint: wrong magic in " + path);
  if (get_u32(in) != kVersion) throw std::runtime_error("checkpoint: unsupported version");
  GeneratorNet net;
  net.m = static_cast<int>(get_u32(in));
  net.d_in = static_cast<int>(get_u32(in));
  net.d_out = static_cast<int>(get_u32(in));
  net.mode = get_u32(in) == 0 ? InitMode::theory : InitMode::xavier;
  net.seed = get_u64(in);
  net.U = get_mat(in, net.m, net.d_in);
  net.V = get_mat(in, net.d_out, net.m);
  net.snapshot.U0 = get_mat(in, net.m, net.d_in);
  net.snapshot.V0 = get_mat(in, net.d_out, net.m);
  return net;
}

}  // namespace prd
