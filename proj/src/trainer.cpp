#include "prd/trainer.hpp"

#include "prd/io.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace prd {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::string cell(double v) { return std::isnan(v) ? std::string() : format_double(v); }

// Largest |entry| across both generator layers and, in augmented mode, the
// critic's Wasserstein gradient.
double max_gradient_entry(const GeneratorNet& net, const DiscriminatorNet* disc,
                          const Mat& X, const Mat& Y, GradientMode mode) {
  static DiscriminatorNet dummy;  // unused in supervised mode
  const DiscriminatorNet& d = disc ? *disc : dummy;
  if (mode == GradientMode::augmented && !disc)
    throw std::invalid_argument("max_gradient_entry: augmented mode needs a critic");
  GeneratorGradients g = generator_gradients(net, d, X, Y, mode);
  double mx = std::max(g.dU.cwiseAbs().maxCoeff(), g.dV.cwiseAbs().maxCoeff());
  if (mode == GradientMode::augmented) {
    SeededRng unused(0);
    Mat fake = forward_generator(net, X);
    DiscriminatorGradients dg = discriminator_gradients(*disc, Y, fake, 0.0, unused);
    mx = std::max({mx, dg.dW.cwiseAbs().maxCoeff(), dg.da.cwiseAbs().maxCoeff()});
  }
  return mx;
}

}  // namespace

StationarityCheck is_epsilon_stationary(const GeneratorNet& net, const DiscriminatorNet* disc,
                                        const Mat& X, const Mat& Y, GradientMode mode,
                                        double epsilon) {
  StationarityCheck sc;
  sc.max_abs_grad = max_gradient_entry(net, disc, X, Y, mode);
  sc.stationary = sc.max_abs_grad < epsilon;
  return sc;
}

RDTerms reaction_diffusion_terms(const GeneratorNet& net, const DiscriminatorNet& disc,
                                 const Mat& X, const Mat& Y) {
  GeneratorGradientParts p = generator_gradient_parts(net, disc, X, Y);
  RDTerms t;
  t.R_u = -p.dU_sup;
  t.D_u = p.dU_adv;
  t.R_v = -p.dV_sup;
  t.D_v = p.dV_adv;
  return t;
}

double dynamics_residual(const GeneratorNet& net, const DiscriminatorNet& disc,
                         const Mat& X, const Mat& Y, double eta, bool with_adversary) {
  if (net.d_out != 1) throw std::invalid_argument("dynamics_residual: scalar-mode network required");
  if (eta <= 0.0) throw std::invalid_argument("dynamics_residual: eta must be positive");

  Vec z_before = forward_generator(net, X).col(0);
  Mat H = gram_at(net.U, X);

  Vec field_src = Y.col(0) - z_before;
  if (with_adversary) {
    // grad_z g(z_p) = (1/sqrt(m)) sum_r a_r 1{w_r z_p >= 0} w_r  (scalar output)
    Mat q = z_before * disc.W.col(0).transpose();  // n x m
    Mat ba = (q.array() >= 0.0).cast<double>().array().rowwise() *
             disc.a.transpose().array();
    field_src += (ba * disc.W.col(0)) / std::sqrt(double(disc.m));
  }
  Vec field = H * field_src;

  GeneratorNet stepped = net;
  GeneratorGradients g = generator_gradients(
      net, disc, X, Y, with_adversary ? GradientMode::augmented : GradientMode::supervised);
  stepped.U -= eta * g.dU;  // hidden layer only; V stays fixed
  Vec z_after = forward_generator(stepped, X).col(0);

  return ((z_after - z_before) / eta - field).norm() / z_before.norm();
}

void trajectory_to_csv(const TrajectoryLog& log, const std::string& path) {
  CsvWriter csv(path);
  csv.row({"step", "sup_loss", "adv_term", "pred_err", "max_neuron_dist", "u_dist_f",
           "v_dist_f", "gram_lmin", "gram_lmax", "max_grad", "ru_max", "du_max",
           "rv_max", "dv_max"});
  for (const auto& r : log.rows) {
    csv.row({std::to_string(r.step), cell(r.sup_loss), cell(r.adv_term), cell(r.pred_err),
             cell(r.max_neuron_dist), cell(r.u_dist_f), cell(r.v_dist_f), cell(r.gram_lmin),
             cell(r.gram_lmax), cell(r.max_grad), cell(r.ru_max), cell(r.du_max),
             cell(r.rv_max), cell(r.dv_max)});
  }
}

TrajectoryLog run_training(const TrainConfig& cfg, const Dataset& ds, GeneratorNet& net,
                           DiscriminatorNet* disc) {
  // learning_rate 0 is allowed as an explicitly frozen run (all logged
  // quantities constant); only negative rates are rejected.
  if (cfg.learning_rate < 0.0) throw std::invalid_argument("run_training: learning_rate >= 0");
  if (cfg.disc_steps_per_gen_step < 1)
    throw std::invalid_argument("run_training: disc_steps_per_gen_step >= 1");
  if (cfg.mode == TrainMode::adversarial && !disc)
    throw std::invalid_argument("run_training: adversarial mode needs a critic");
  if (ds.train.empty()) throw std::invalid_argument("run_training: empty train split");

  const Batch full = to_batch(ds.train);
  const long n = full.X.rows();
  const long bs = (cfg.batch_size <= 0 || cfg.batch_size >= n) ? n : cfg.batch_size;
  const long steps_per_epoch = (n + bs - 1) / bs;
  const long total_steps = cfg.max_epochs * steps_per_epoch;
  const double eta = cfg.learning_rate;
  const double eta_c = cfg.critic_learning_rate > 0.0 ? cfg.critic_learning_rate : eta;
  const bool adv = cfg.mode == TrainMode::adversarial;
  const GradientMode gmode = adv ? GradientMode::augmented : GradientMode::supervised;

  SeededRng gp_rng(cfg.seed, 0x6f70);       // penalty interpolates
  SeededRng shuffle_rng(cfg.seed, 0x7368);  // batch order

  Mat mU = Mat::Zero(net.U.rows(), net.U.cols());
  Mat mV = Mat::Zero(net.V.rows(), net.V.cols());
  Mat mW, mA;
  if (adv) {
    mW = Mat::Zero(disc->W.rows(), disc->W.cols());
    mA = Mat::Zero(disc->a.size(), 1);
  }

  std::vector<long> order(n);
  for (long i = 0; i < n; ++i) order[i] = i;

  TrajectoryLog log;
  double initial_loss = -1.0;

  auto log_state = [&](long step) {
    TrajectoryRow row;
    row.step = step;
    row.sup_loss = supervised_loss(net, full.X, full.Y);
    row.adv_term = adv ? adversarial_term(net, *disc, full.X) : kNaN;
    row.pred_err = std::sqrt(2.0 * row.sup_loss);
    Mat dU = net.U - net.snapshot.U0;
    row.max_neuron_dist = dU.rowwise().norm().maxCoeff();
    row.u_dist_f = dU.norm();
    row.v_dist_f = (net.V - net.snapshot.V0).norm();
    row.max_grad = max_gradient_entry(net, disc, full.X, full.Y, gmode);
    row.gram_lmin = row.gram_lmax = kNaN;
    if (cfg.gram_every > 0 && step % cfg.gram_every == 0) {
      Spectrum s = spectral_extremes(gram_at(net.U, full.X), 1e-9, 100000);
      row.gram_lmin = s.lambda_min;
      row.gram_lmax = s.lambda_max;
    }
    row.ru_max = row.du_max = row.rv_max = row.dv_max = kNaN;
    if (cfg.rd_every > 0 && disc && step % cfg.rd_every == 0) {
      RDTerms t = reaction_diffusion_terms(net, *disc, full.X, full.Y);
      row.ru_max = t.R_u.rowwise().norm().maxCoeff();
      row.du_max = t.D_u.rowwise().norm().maxCoeff();
      row.rv_max = t.R_v.colwise().norm().maxCoeff();
      row.dv_max = t.D_v.colwise().norm().maxCoeff();
    }
    if (initial_loss < 0.0) initial_loss = std::max(row.sup_loss, 1e-12);
    if (!std::isfinite(row.sup_loss))
      throw std::runtime_error("run_training: non-finite loss at step " + std::to_string(step));
    if (row.sup_loss > 1e6 * initial_loss)
      throw std::runtime_error("run_training: divergence guard tripped at step " +
                               std::to_string(step));
    log.rows.push_back(row);
    return row;
  };

  long step = 0;
  for (long epoch = 0; epoch < cfg.max_epochs && step < total_steps; ++epoch) {
    if (bs < n) {  // fresh seeded order each epoch
      for (long i = n - 1; i > 0; --i) {
        long j = static_cast<long>(shuffle_rng.next_u64() % static_cast<std::uint64_t>(i + 1));
        std::swap(order[i], order[j]);
      }
    }
    for (long b = 0; b < steps_per_epoch && step < total_steps; ++b, ++step) {
      if (step % cfg.log_every == 0) {
        TrajectoryRow row = log_state(step);
        if (cfg.epsilon_stationary > 0.0 && row.max_grad < cfg.epsilon_stationary) {
          log.stopped_stationary = true;
          log.steps_run = step;
          return log;
        }
      }

      const Mat* Xb = &full.X;
      const Mat* Yb = &full.Y;
      Mat Xs, Ys;
      if (bs < n) {
        long lo = b * bs;
        long count = std::min(bs, n - lo);
        Xs = Mat(count, full.X.cols());
        Ys = Mat(count, full.Y.cols());
        for (long i = 0; i < count; ++i) {
          Xs.row(i) = full.X.row(order[lo + i]);
          Ys.row(i) = full.Y.row(order[lo + i]);
        }
        Xb = &Xs;
        Yb = &Ys;
      }

      if (adv) {
        for (int distep = 0; distep < cfg.disc_steps_per_gen_step; ++distep) {
          Mat fake = forward_generator(net, *Xb);
          DiscriminatorGradients dg =
              discriminator_gradients(*disc, *Yb, fake, cfg.gp_coeff, gp_rng);
          mW = cfg.momentum * mW + dg.dW;
          mA.col(0) = cfg.momentum * mA.col(0) + dg.da;
          disc->W -= eta_c * mW;
          disc->a -= eta_c * mA.col(0);
          disc->W = project_row_norm(disc->W, cfg.L);
        }
      }

      static DiscriminatorNet dummy;
      GeneratorGradients g =
          generator_gradients(net, disc ? *disc : dummy, *Xb, *Yb, gmode);
      mU = cfg.momentum * mU + g.dU;
      net.U -= eta * mU;
      if (cfg.train_output_layer) {
        mV = cfg.momentum * mV + g.dV;
        net.V -= eta * mV;
      }
      if (!std::isfinite(net.U(0, 0)))
        throw std::runtime_error("run_training: non-finite weights at step " +
                                 std::to_string(step + 1));
    }
  }
  log_state(step);
  log.steps_run = step;
  return log;
}

}  // namespace prd
