#pragma once

#include "prd/dataset.hpp"
#include "prd/network.hpp"

#include <string>

namespace prd {

// Monte-Carlo estimate of the infinite-width kernel
//   H_inf_ij = E_u[x_i.x_j 1{u.x_i >= 0, u.x_j >= 0}],  u ~ N(0, I).
// Exactly symmetric by construction. X is n x d with unit-norm rows.
Mat gram_infinity(const Mat& X, long mc_samples, SeededRng& rng);

// Finite-width kernel at the current hidden layer:
//   H_ij = x_i.x_j (1/m) sum_r 1{u_r.x_i >= 0} 1{u_r.x_j >= 0}.
Mat gram_at(const Mat& U, const Mat& X);
Mat gram_at(const GeneratorNet& net, const Mat& X);  // requires d_out == 1

struct GramReport {
  Spectrum H0_spectrum;
  Spectrum Ht_spectrum;
  double drift_norm = 0.0;  // ||H(t) - H(0)||_2
  double lambda0_hat = 0.0;  // lambda_min(H(0))
  double kappa_hat = 0.0;    // 2(lambda_max(H(0)) + lambda0_hat/2) / lambda0_hat
  bool lmin_floor_violated = false;  // lambda_min(H(t)) < lambda0 / 2
  bool lmax_ceiling_violated = false;  // lambda_max(H(t)) > lambda1 / 2
};

// Spectra of H(0) and H(t), spectral-norm drift between them, and flags
// against the lambda0/2 floor and lambda1/2 ceiling for caller-supplied
// lambda0 and lambda1_inf (lambda1 = 2(lambda1_inf + lambda0/2)).
GramReport gram_stability_report(const GeneratorNet& net_t, const GeneratorNet& net_0,
                                 const Mat& X, double lambda0, double lambda1_inf);

struct ConstantsReport {
  double mu = 0.0;             // L n sqrt(2 log(2/delta)) / sqrt(m)
  double kappa = 0.0;          // lambda1 / lambda0
  double lambda1 = 0.0;        // 2 (lambda1_inf + lambda0 / 2)
  double zeta = 0.0;           // 2 sqrt(m d_in) / (sqrt(2 pi) delta)
  double hoeffding_bound = 0.0;  // L sqrt(2 ln(2/delta)), per unit ||w||
  double L_max = 0.0;          // eps sqrt(m) / (kappa n sqrt(2 ln(2/delta)))
  double T0 = 0.0;             // (2/lambda0) ln((z0_err - kappa mu)/(eps - kappa mu))
  bool T0_valid = false;       // requires kappa mu < eps < z0_err
  std::string T0_failure;      // empty when valid
  double m_min_adversarial = 0.0;
  double m_min_supervised = 0.0;
};

ConstantsReport compute_constants(long n, long m, long d_in, double lambda0,
                                  double lambda1_inf, double L, double delta,
                                  double epsilon, double z0_err);

// (z0_err - kappa mu) exp(-lambda0 t / 2) + kappa mu. Requires z0_err >= kappa mu.
double prediction_error_envelope(double t, double z0_err, double kappa, double mu,
                                 double lambda0);

// Integrates d(psi)/dt = -lambda0 psi + lambda1 mu sqrt(psi) with RK4 and
// returns the max relative deviation of sqrt(psi) from the closed form
// (sqrt(psi0) - kappa mu) exp(-lambda0 t / 2) + kappa mu over the time grid.
double bde_compare(double lambda0, double lambda1, double mu, double psi0,
                   double t_end, long steps);

struct DistanceBounds {
  double per_neuron = 0.0;  // max_j ||u_j(t) - u_j(0)||
  double frobenius = 0.0;   // ||U(t) - U(0)||_F
};

// Supervised-regime bounds: per-neuron 2 sqrt(n) z0_err / (sqrt(m) lambda0 delta),
// Frobenius 2 sqrt(n) z0_err / (lambda0 delta).
DistanceBounds supervised_distance_bounds(long n, long m, double lambda0, double delta,
                                          double z0_err);

// Adversarial-regime bounds: the supervised terms plus the linear drift
// mu (1 + kappa sqrt(n)) t / sqrt(m) per neuron and mu (1 + kappa sqrt(n)) t
// in Frobenius norm (unit constants).
DistanceBounds adversarial_distance_bounds(long n, long m, double lambda0, double delta,
                                           double z0_err, double mu, double kappa, double t);

struct RdScales {
  double r_u = 0.0;  // n d_in sqrt(d_out / m)
  double d_u = 0.0;  // n m^2 d_in d_out^(3/2)
  double r_v = 0.0;  // n d_in sqrt(d_out / m)
  double d_v = 0.0;  // n m^2 d_in d_out^(1/2)
};

// Asymptotic magnitudes of the reaction and diffusion terms per layer,
// with unit constants.
RdScales rd_scale_magnitudes(long n, long m, long d_in, long d_out);

std::string constants_to_json(const ConstantsReport& c);
std::string gram_report_to_json(const GramReport& g);

}  // namespace prd
