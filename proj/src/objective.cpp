#include "prd/objective.hpp"

#include <cmath>
#include <stdexcept>

namespace prd {

namespace {

void check_dims(const GeneratorNet& net, const Mat& X, const Mat& Y) {
  if (X.cols() != net.d_in) throw std::invalid_argument("objective: X width != d_in");
  if (Y.cols() != net.d_out) throw std::invalid_argument("objective: Y width != d_out");
  if (X.rows() != Y.rows()) throw std::invalid_argument("objective: X/Y row mismatch");
}

}  // namespace

double supervised_loss(const GeneratorNet& net, const Mat& X, const Mat& Y) {
  check_dims(net, X, Y);
  Mat r = forward_generator(net, X) - Y;
  return 0.5 * r.squaredNorm();
}

double supervised_loss(const GeneratorNet& net, const std::vector<Sample>& data) {
  Batch b = to_batch(data);
  return supervised_loss(net, b.X, b.Y);
}

double adversarial_term(const GeneratorNet& net, const DiscriminatorNet& disc, const Mat& X) {
  if (disc.d_out != net.d_out) throw std::invalid_argument("objective: critic width != d_out");
  Mat z = forward_generator(net, X);
  Mat q = (z * disc.W.transpose()).cwiseMax(0.0);  // n x m
  return (q * disc.a).sum() / std::sqrt(double(disc.m));
}

double adversarial_term(const GeneratorNet& net, const DiscriminatorNet& disc,
                        const std::vector<Sample>& data) {
  Batch b = to_batch(data);
  return adversarial_term(net, disc, b.X);
}

LossBreakdown loss_breakdown(const GeneratorNet& net, const DiscriminatorNet& disc,
                             const Mat& X, const Mat& Y) {
  LossBreakdown lb;
  lb.supervised = supervised_loss(net, X, Y);
  lb.adversarial = adversarial_term(net, disc, X);
  lb.augmented = lb.supervised - lb.adversarial;
  return lb;
}

GeneratorGradientParts generator_gradient_parts(const GeneratorNet& net,
                                                const DiscriminatorNet& disc,
                                                const Mat& X, const Mat& Y) {
  check_dims(net, X, Y);
  const double sg = net.scale();
  const double sd = 1.0 / std::sqrt(double(disc.m));

  ForwardParts fp = forward_parts(net, X);
  Mat act = (fp.pre.array() >= 0.0).cast<double>();     // closed indicator 1{. >= 0}
  const Mat& h = fp.h;
  const Mat& z = fp.z;
  Mat r = z - Y;

  GeneratorGradientParts g;
  // dL_sup/dV_ij = sg sum_p r_pi h_pj ; dL_sup/du_j = sg sum_p (v_j.r_p) 1{u_j.x_p>=0} x_p
  g.dV_sup = sg * (r.transpose() * h);
  g.dU_sup = sg * (act.cwiseProduct(r * net.V)).transpose() * X;

  // Critic chain: alpha_p = sum_r a_r 1{w_r.z_p >= 0} w_r, dL_adv/dz_p = sd * alpha_p.
  Mat q = z * disc.W.transpose();                                            // n x m
  Mat ba = (q.array() >= 0.0).cast<double>().array().rowwise() *
           disc.a.transpose().array();                                       // n x m
  Mat alpha = ba * disc.W;                                                   // n x d_out
  g.dV_adv = (sg * sd) * (alpha.transpose() * h);
  g.dU_adv = (sg * sd) * (act.cwiseProduct(alpha * net.V)).transpose() * X;
  return g;
}

GeneratorGradients generator_gradients(const GeneratorNet& net, const DiscriminatorNet& disc,
                                       const Mat& X, const Mat& Y, GradientMode mode) {
  GeneratorGradients out;
  if (mode == GradientMode::supervised) {
    // Cheaper path: the critic chain is not needed.
    check_dims(net, X, Y);
    const double sg = net.scale();
    ForwardParts fp = forward_parts(net, X);
    Mat act = (fp.pre.array() >= 0.0).cast<double>();
    Mat r = fp.z - Y;
    out.dV = sg * (r.transpose() * fp.h);
    out.dU = sg * (act.cwiseProduct(r * net.V)).transpose() * X;
    return out;
  }
  GeneratorGradientParts g = generator_gradient_parts(net, disc, X, Y);
  out.dU = g.dU_sup - g.dU_adv;
  out.dV = g.dV_sup - g.dV_adv;
  return out;
}

GeneratorGradients generator_gradients(const GeneratorNet& net, const DiscriminatorNet& disc,
                                       const std::vector<Sample>& data, GradientMode mode) {
  Batch b = to_batch(data);
  return generator_gradients(net, disc, b.X, b.Y, mode);
}

DiscriminatorGradients discriminator_gradients(const DiscriminatorNet& disc,
                                               const Mat& realY, const Mat& fakeZ,
                                               double gp_coeff, SeededRng& rng) {
  if (realY.rows() != fakeZ.rows())
    throw std::invalid_argument("discriminator_gradients: real/fake count mismatch");
  if (realY.cols() != disc.d_out || fakeZ.cols() != disc.d_out)
    throw std::invalid_argument("discriminator_gradients: sample width != d_out");
  const Eigen::Index n = realY.rows();
  const double sd = 1.0 / std::sqrt(double(disc.m));
  const double inv_n = 1.0 / double(n);

  Mat qf = fakeZ * disc.W.transpose();  // n x m
  Mat qr = realY * disc.W.transpose();
  Mat bf = (qf.array() >= 0.0).cast<double>().array().rowwise() *
           disc.a.transpose().array();
  Mat br = (qr.array() >= 0.0).cast<double>().array().rowwise() *
           disc.a.transpose().array();

  DiscriminatorGradients out;
  out.dW = (sd * inv_n) * (bf.transpose() * fakeZ - br.transpose() * realY);
  out.da = (sd * inv_n) *
           (qf.cwiseMax(0.0).colwise().sum() - qr.cwiseMax(0.0).colwise().sum()).transpose();

  if (gp_coeff != 0.0) {
    Mat yhat(n, disc.d_out);
    for (Eigen::Index p = 0; p < n; ++p) {
      double eps = rng.uniform();
      yhat.row(p) = eps * fakeZ.row(p) + (1.0 - eps) * realY.row(p);
    }
    Mat qh = yhat * disc.W.transpose();
    Mat maskh = (qh.array() >= 0.0).cast<double>();
    Mat bh = maskh.array().rowwise() * disc.a.transpose().array();
    Mat G = sd * (bh * disc.W);  // n x d_out, row p = grad_y g(yhat_p)
    Vec gn = G.rowwise().norm();
    Vec S(n);
    for (Eigen::Index p = 0; p < n; ++p)
      S(p) = gn(p) > 1e-12 ? (gn(p) - 1.0) / gn(p) : 0.0;
    Mat SG = G.array().colwise() * S.array();
    const double c = gp_coeff * 2.0 * inv_n * sd;
    out.dW += c * (bh.transpose() * SG);
    out.da += c * maskh.cwiseProduct(SG * disc.W.transpose()).colwise().sum().transpose();
  }
  return out;
}

Mat project_row_norm(const Mat& W, double L) {
  if (L <= 0.0) throw std::invalid_argument("project_row_norm: L must be positive");
  Mat out = W;
  for (Eigen::Index r = 0; r < out.rows(); ++r) {
    double nrm = out.row(r).norm();
    if (nrm > L) out.row(r) *= L / nrm;
  }
  return out;
}

}  // namespace prd
