#include "prd/theory.hpp"

#include "prd/io.hpp"

#include <json.hpp>

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace prd {

Mat gram_infinity(const Mat& X, long mc_samples, SeededRng& rng) {
  if (mc_samples < 10000)
    throw std::invalid_argument("gram_infinity: need at least 1e4 samples");
  const Eigen::Index n = X.rows();
  const Eigen::Index d = X.cols();
  Mat counts = Mat::Zero(n, n);
  // Joint-activation counts in batches: one GEMM per batch of Gaussian draws.
  const Eigen::Index batch = 256;
  Mat u(batch, d);
  long done = 0;
  while (done < mc_samples) {
    Eigen::Index take = std::min<long>(batch, mc_samples - done);
    for (Eigen::Index i = 0; i < take; ++i)
      for (Eigen::Index j = 0; j < d; ++j) u(i, j) = rng.gaussian();
    Mat act = ((X * u.topRows(take).transpose()).array() >= 0.0).cast<double>();  // n x take
    counts.noalias() += act * act.transpose();
    done += take;
  }
  Mat H = (X * X.transpose()).cwiseProduct(counts / double(mc_samples));
  return 0.5 * (H + H.transpose());  // exact symmetry despite rounding
}

Mat gram_at(const Mat& U, const Mat& X) {
  if (U.cols() != X.cols()) throw std::invalid_argument("gram_at: dimension mismatch");
  Mat act = ((X * U.transpose()).array() >= 0.0).cast<double>();  // n x m
  Mat H = (X * X.transpose()).cwiseProduct(act * act.transpose() / double(U.rows()));
  return 0.5 * (H + H.transpose());
}

Mat gram_at(const GeneratorNet& net, const Mat& X) {
  if (net.d_out != 1) throw std::invalid_argument("gram_at: scalar-output network required");
  return gram_at(net.U, X);
}

GramReport gram_stability_report(const GeneratorNet& net_t, const GeneratorNet& net_0,
                                 const Mat& X, double lambda0, double lambda1_inf) {
  if (net_t.m != net_0.m || net_t.d_in != net_0.d_in)
    throw std::invalid_argument("gram_stability_report: mismatched networks");
  Mat H0 = gram_at(net_0.U, X);
  Mat Ht = gram_at(net_t.U, X);
  GramReport rep;
  rep.H0_spectrum = spectral_extremes(H0, 1e-10, 200000);
  rep.Ht_spectrum = spectral_extremes(Ht, 1e-10, 200000);
  Spectrum diff = spectral_extremes(Ht - H0, 1e-10, 200000);
  rep.drift_norm = std::max(std::abs(diff.lambda_min), std::abs(diff.lambda_max));
  rep.lambda0_hat = rep.H0_spectrum.lambda_min;
  if (rep.lambda0_hat > 0.0)
    rep.kappa_hat = 2.0 * (rep.H0_spectrum.lambda_max + rep.lambda0_hat / 2.0) / rep.lambda0_hat;
  double lambda1 = 2.0 * (lambda1_inf + lambda0 / 2.0);
  rep.lmin_floor_violated = rep.Ht_spectrum.lambda_min < lambda0 / 2.0;
  rep.lmax_ceiling_violated = rep.Ht_spectrum.lambda_max > lambda1 / 2.0;
  return rep;
}

ConstantsReport compute_constants(long n, long m, long d_in, double lambda0,
                                  double lambda1_inf, double L, double delta,
                                  double epsilon, double z0_err) {
  if (n < 1 || m < 1 || d_in < 1) throw std::invalid_argument("compute_constants: bad counts");
  if (delta <= 0.0 || delta >= 1.0)
    throw std::invalid_argument("compute_constants: delta must lie in (0,1)");
  if (lambda0 <= 0.0 || lambda1_inf < 0.0 || L <= 0.0 || epsilon <= 0.0 || z0_err <= 0.0)
    throw std::invalid_argument("compute_constants: inputs must be positive");

  ConstantsReport c;
  const double root_log = std::sqrt(2.0 * std::log(2.0 / delta));
  c.mu = L * double(n) * root_log / std::sqrt(double(m));
  c.lambda1 = 2.0 * (lambda1_inf + lambda0 / 2.0);
  c.kappa = c.lambda1 / lambda0;
  c.zeta = 2.0 * std::sqrt(double(m) * double(d_in)) /
           (std::sqrt(2.0 * std::numbers::pi) * delta);
  c.hoeffding_bound = L * root_log;
  c.L_max = epsilon * std::sqrt(double(m)) / (c.kappa * double(n) * root_log);

  const double floor = c.kappa * c.mu;
  if (floor >= epsilon) {
    c.T0_failure = "kappa*mu >= epsilon";
  } else if (epsilon >= z0_err) {
    c.T0_failure = "epsilon >= initial error";
  } else {
    c.T0 = (2.0 / lambda0) * std::log((z0_err - floor) / (epsilon - floor));
    c.T0_valid = true;
  }

  const double dn = double(n);
  double t0_for_m = c.T0_valid ? c.T0 : 0.0;
  double adv = std::pow(dn, 3.5) / (lambda0 * lambda0 * delta * delta) +
               dn * dn * c.mu * (1.0 + c.kappa * std::sqrt(dn)) * t0_for_m / (lambda0 * delta);
  c.m_min_adversarial = adv * adv;
  c.m_min_supervised = std::pow(dn, 7.0) / std::pow(lambda0, 4.0) / std::pow(delta, 4.0);
  return c;
}

double prediction_error_envelope(double t, double z0_err, double kappa, double mu,
                                 double lambda0) {
  const double floor = kappa * mu;
  if (z0_err < floor)
    throw std::domain_error("prediction_error_envelope: initial error below kappa*mu floor");
  return (z0_err - floor) * std::exp(-lambda0 * t / 2.0) + floor;
}

double bde_compare(double lambda0, double lambda1, double mu, double psi0,
                   double t_end, long steps) {
  if (psi0 <= 0.0) throw std::invalid_argument("bde_compare: psi0 must be positive");
  if (steps < 1) throw std::invalid_argument("bde_compare: steps must be >= 1");
  const double kappa_mu = (lambda1 / lambda0) * mu;
  const double C = std::sqrt(psi0) - kappa_mu;
  auto deriv = [&](double psi) {
    return -lambda0 * psi + lambda1 * mu * std::sqrt(std::max(psi, 0.0));
  };
  const double dt = t_end / double(steps);
  double psi = psi0;
  double max_rel = 0.0;
  for (long s = 1; s <= steps; ++s) {
    double k1 = deriv(psi);
    double k2 = deriv(psi + 0.5 * dt * k1);
    double k3 = deriv(psi + 0.5 * dt * k2);
    double k4 = deriv(psi + dt * k3);
    psi += dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    double t = dt * double(s);
    double closed = C * std::exp(-lambda0 * t / 2.0) + kappa_mu;
    double numeric = std::sqrt(std::max(psi, 0.0));
    double rel = std::abs(numeric - closed) / std::max(std::abs(closed), 1e-300);
    max_rel = std::max(max_rel, rel);
  }
  return max_rel;
}

DistanceBounds supervised_distance_bounds(long n, long m, double lambda0, double delta,
                                          double z0_err) {
  if (n < 1 || m < 1 || lambda0 <= 0.0 || delta <= 0.0)
    throw std::invalid_argument("supervised_distance_bounds: inputs must be positive");
  DistanceBounds b;
  b.frobenius = 2.0 * std::sqrt(double(n)) * z0_err / (lambda0 * delta);
  b.per_neuron = b.frobenius / std::sqrt(double(m));
  return b;
}

DistanceBounds adversarial_distance_bounds(long n, long m, double lambda0, double delta,
                                           double z0_err, double mu, double kappa, double t) {
  DistanceBounds b = supervised_distance_bounds(n, m, lambda0, delta, z0_err);
  const double drift = mu * (1.0 + kappa * std::sqrt(double(n))) * t;
  b.per_neuron += drift / std::sqrt(double(m));
  b.frobenius += drift;
  return b;
}

RdScales rd_scale_magnitudes(long n, long m, long d_in, long d_out) {
  if (n < 1 || m < 1 || d_in < 1 || d_out < 1)
    throw std::invalid_argument("rd_scale_magnitudes: inputs must be positive");
  RdScales s;
  const double dn = double(n), dm = double(m), di = double(d_in), dd = double(d_out);
  s.r_u = dn * di * std::sqrt(dd / dm);
  s.d_u = dn * dm * dm * di * dd * std::sqrt(dd);
  s.r_v = dn * di * std::sqrt(dd / dm);
  s.d_v = dn * dm * dm * di * std::sqrt(dd);
  return s;
}

std::string constants_to_json(const ConstantsReport& c) {
  nlohmann::json j;
  j["mu"] = c.mu;
  j["kappa"] = c.kappa;
  j["lambda1"] = c.lambda1;
  j["zeta"] = c.zeta;
  j["hoeffding_bound"] = c.hoeffding_bound;
  j["L_max"] = c.L_max;
  j["T0"] = c.T0;
  j["T0_valid"] = c.T0_valid;
  j["T0_failure"] = c.T0_failure;
  j["m_min_adversarial"] = c.m_min_adversarial;
  j["m_min_supervised"] = c.m_min_supervised;
  j["constant_convention"] = "explicit proof constants where stated, unit constants elsewhere";
  return j.dump(2);
}

std::string gram_report_to_json(const GramReport& g) {
  nlohmann::json j;
  j["H0"] = {{"lambda_min", g.H0_spectrum.lambda_min},
             {"lambda_max", g.H0_spectrum.lambda_max},
             {"iterations", g.H0_spectrum.iterations_used}};
  j["Ht"] = {{"lambda_min", g.Ht_spectrum.lambda_min},
             {"lambda_max", g.Ht_spectrum.lambda_max},
             {"iterations", g.Ht_spectrum.iterations_used}};
  j["drift_norm"] = g.drift_norm;
  j["lambda0_hat"] = g.lambda0_hat;
  j["kappa_hat"] = g.kappa_hat;
  j["lmin_floor_violated"] = g.lmin_floor_violated;
  j["lmax_ceiling_violated"] = g.lmax_ceiling_violated;
  return j.dump(2);
}

}  // namespace prd
