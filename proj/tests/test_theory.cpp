#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "prd/network.hpp"
#include "prd/theory.hpp"

#include <json.hpp>

#include <cmath>
#include <numbers>

using prd::Mat;
using prd::SeededRng;
using prd::Vec;

namespace {

// Closed form for unit vectors: H_ij = <x_i, x_j> (pi - angle_ij) / (2 pi).
double arc_cos_kernel(const Vec& xi, const Vec& xj) {
  double c = xi.dot(xj);
  double theta = std::acos(std::clamp(c, -1.0, 1.0));
  return c * (std::numbers::pi - theta) / (2.0 * std::numbers::pi);
}

}  // namespace

TEST_CASE("infinite-width kernel at pinned angles") {
  Mat X(3, 2);
  X << 1.0, 0.0,                    // 0 degrees vs itself -> 0.5
      0.5, std::sqrt(3.0) / 2.0,    // 60 degrees vs row 0 -> 1/6
      0.0, 1.0;                     // 90 degrees vs row 0 -> 0
  SeededRng rng(42);
  Mat H = prd::gram_infinity(X, 1000000, rng);
  CHECK(std::abs(H(0, 0) - 0.5) <= 2e-3);
  CHECK(std::abs(H(0, 1) - 1.0 / 6.0) <= 2e-3);
  CHECK(H(0, 2) == 0.0);  // zero inner product kills the entry exactly
  CHECK(H == H.transpose());
}

TEST_CASE("infinite-width kernel matches the arc-cosine closed form") {
  SeededRng rng(7);
  Mat X(4, 5);
  rng.fill_gaussian(X);
  X.rowwise().normalize();
  Mat H = prd::gram_infinity(X, 400000, rng);
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) {
      double want = arc_cos_kernel(X.row(i).transpose(), X.row(j).transpose());
      CHECK(std::abs(H(i, j) - want) <= 4e-3);
    }
  prd::Spectrum s = prd::spectral_extremes(H);
  CHECK(s.lambda_min >= -1e-6);  // PSD up to Monte-Carlo noise
}

TEST_CASE("kernel estimator rejects tiny sample budgets") {
  Mat X = Mat::Identity(2, 2);
  SeededRng rng(1);
  CHECK_THROWS_AS(prd::gram_infinity(X, 9999, rng), std::invalid_argument);
}

TEST_CASE("finite-width kernel: hand-counted activation overlaps") {
  // Two neurons: one active on x0 only, one active on both inputs.
  Mat U(2, 2);
  U << 1.0, -0.2,
      1.0, 1.0;
  Mat X(2, 2);
  X << 1.0, 0.0,
      0.0, 1.0;
  Mat H = prd::gram_at(U, X);
  // H_00 = 1 * (2/2) = 1; H_11 = 1 * (1/2); H_01 = 0 * anything = 0.
  CHECK(H(0, 0) == doctest::Approx(1.0));
  CHECK(H(1, 1) == doctest::Approx(0.5));
  CHECK(H(0, 1) == 0.0);
}

TEST_CASE("finite-width kernel concentrates on the infinite-width one") {
  SeededRng rng(9);
  Mat X(4, 6);
  rng.fill_gaussian(X);
  X.rowwise().normalize();
  prd::GeneratorNet net = prd::init_generator(8192, 6, 1, prd::InitMode::theory, rng);
  Mat H0 = prd::gram_at(net, X);
  SeededRng mc(10);
  Mat Hinf = prd::gram_infinity(X, 1000000, mc);
  CHECK((H0 - Hinf).array().abs().maxCoeff() <= 0.05);
}

TEST_CASE("network-facing kernel requires scalar output") {
  SeededRng rng(3);
  prd::GeneratorNet net = prd::init_generator(8, 3, 2, prd::InitMode::theory, rng);
  Mat X(2, 3);
  rng.fill_gaussian(X);
  CHECK_THROWS_AS(prd::gram_at(net, X), std::invalid_argument);
}

TEST_CASE("gram stability report: identical nets have zero drift and sane flags") {
  SeededRng rng(12);
  Mat X(5, 4);
  rng.fill_gaussian(X);
  X.rowwise().normalize();
  prd::GeneratorNet net = prd::init_generator(512, 4, 1, prd::InitMode::theory, rng);
  prd::GramReport rep = prd::gram_stability_report(net, net, X, 0.01, 1.0);
  CHECK(rep.drift_norm <= 1e-12);
  CHECK(rep.lambda0_hat == doctest::Approx(rep.H0_spectrum.lambda_min));
  double lambda1 = 2.0 * (rep.H0_spectrum.lambda_max + rep.lambda0_hat / 2.0);
  CHECK(rep.kappa_hat == doctest::Approx(lambda1 / rep.lambda0_hat));
  CHECK_FALSE(rep.lmin_floor_violated);   // floor 0.005 is tiny
  CHECK_FALSE(rep.lmax_ceiling_violated); // ceiling with lambda1_inf=1 is generous

  // An absurd floor flags; a crushed ceiling (lambda1 also scales with the
  // caller's lambda0, so both must be tiny) flags on a separate call.
  prd::GramReport floor_bad = prd::gram_stability_report(net, net, X, 1e9, 1e-12);
  CHECK(floor_bad.lmin_floor_violated);
  prd::GramReport ceil_bad = prd::gram_stability_report(net, net, X, 1e-12, 1e-12);
  CHECK(ceil_bad.lmax_ceiling_violated);
  CHECK_FALSE(ceil_bad.lmin_floor_violated);
}

TEST_CASE("constants: pinned oracle values") {
  // mu = L n sqrt(2 log(2/delta)) / sqrt(m) at (0.01, 100, 0.05, 8192).
  prd::ConstantsReport c =
      prd::compute_constants(100, 8192, 784, 0.5, 1.0, 0.01, 0.05, 0.2, 10.0);
  CHECK(c.mu == doctest::Approx(0.0300107).epsilon(1e-4));
  CHECK(c.lambda1 == doctest::Approx(2.0 * (1.0 + 0.25)));
  CHECK(c.kappa == doctest::Approx(2.5 / 0.5));
  // zeta at m=4, d_in=4, delta=0.1 on a separate call.
  prd::ConstantsReport z = prd::compute_constants(4, 4, 4, 0.5, 1.0, 0.01, 0.1, 0.2, 10.0);
  CHECK(z.zeta == doctest::Approx(2.0 * 4.0 / (std::sqrt(2.0 * std::numbers::pi) * 0.1))
                      .epsilon(1e-10));
  CHECK(c.hoeffding_bound ==
        doctest::Approx(0.01 * std::sqrt(2.0 * std::log(2.0 / 0.05))));
  CHECK(c.L_max == doctest::Approx(0.2 * std::sqrt(8192.0) /
                                   (5.0 * 100.0 * std::sqrt(2.0 * std::log(2.0 / 0.05)))));
}

TEST_CASE("constants: escape time hits the pinned 2 ln 99") {
  // delta = 2/e^2 makes sqrt(2 ln(2/delta)) = 2 exactly; with L=0.1, n=2, m=16
  // mu = 0.1, and lambda1_inf = 0, lambda0 = 1 give kappa = 1, so kappa mu = 0.1.
  const double delta = 2.0 * std::exp(-2.0);
  prd::ConstantsReport c = prd::compute_constants(2, 16, 3, 1.0, 0.0, 0.1, delta, 0.2, 10.0);
  CHECK(c.mu == doctest::Approx(0.1).epsilon(1e-12));
  CHECK(c.kappa == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(c.T0_valid);
  CHECK(c.T0 == doctest::Approx(2.0 * std::log(99.0)).epsilon(1e-10));
  CHECK(c.T0_failure.empty());

  // Node complexities with unit constants, recomputed inline.
  double inner_adv = std::pow(2.0, 3.5) / (1.0 * delta * delta) +
                     4.0 * c.mu * (1.0 + c.kappa * std::sqrt(2.0)) * c.T0 / (1.0 * delta);
  CHECK(c.m_min_adversarial == doctest::Approx(inner_adv * inner_adv).epsilon(1e-9));
  CHECK(c.m_min_supervised ==
        doctest::Approx(std::pow(2.0, 7) / (1.0 * std::pow(delta, 4))).epsilon(1e-9));
}

TEST_CASE("constants: escape-time preconditions reported, not thrown") {
  // epsilon below kappa*mu.
  const double delta = 2.0 * std::exp(-2.0);
  prd::ConstantsReport low = prd::compute_constants(2, 16, 3, 1.0, 0.0, 0.1, delta, 0.05, 10.0);
  CHECK_FALSE(low.T0_valid);
  CHECK_FALSE(low.T0_failure.empty());
  // epsilon above the initial error.
  prd::ConstantsReport high = prd::compute_constants(2, 16, 3, 1.0, 0.0, 0.1, delta, 11.0, 10.0);
  CHECK_FALSE(high.T0_valid);

  CHECK_THROWS_AS(prd::compute_constants(2, 16, 3, 1.0, 0.0, 0.1, 1.5, 0.2, 10.0),
                  std::invalid_argument);
}

TEST_CASE("prediction-error envelope endpoints") {
  CHECK(prd::prediction_error_envelope(0.0, 3.0, 2.0, 0.1, 0.7) == doctest::Approx(3.0));
  // mu = 0: pure exponential decay.
  CHECK(prd::prediction_error_envelope(4.0, 3.0, 2.0, 0.0, 0.7) ==
        doctest::Approx(3.0 * std::exp(-0.7 * 4.0 / 2.0)));
  // Long horizon settles at kappa*mu.
  CHECK(prd::prediction_error_envelope(1e4, 3.0, 2.0, 0.1, 0.7) == doctest::Approx(0.2));
  CHECK_THROWS_AS(prd::prediction_error_envelope(1.0, 0.1, 2.0, 0.1, 0.7),
                  std::domain_error);
}

TEST_CASE("squared-error ODE: RK4 tracks the closed form") {
  // mu = 0 reduces to plain exponential decay.
  CHECK(prd::bde_compare(0.8, 1.6, 0.0, 4.0, 10.0, 10000) <= 1e-6);
  // Starting exactly at the fixed point (kappa*mu)^2 nothing moves.
  double kappa_mu = (1.6 / 0.8) * 0.25;
  CHECK(prd::bde_compare(0.8, 1.6, 0.25, kappa_mu * kappa_mu, 10.0, 10000) <= 1e-9);
  // Random parameter draws above and below the fixed point.
  SeededRng rng(77);
  for (int draw = 0; draw < 20; ++draw) {
    double lambda0 = 0.1 + 1.9 * rng.uniform();
    double lambda1 = lambda0 * (1.0 + 3.0 * rng.uniform());
    double mu = 0.01 + 0.49 * rng.uniform();
    double fp = (lambda1 / lambda0) * mu;
    double psi0 = fp * fp * (0.25 + 8.75 * rng.uniform());
    CHECK(prd::bde_compare(lambda0, lambda1, mu, psi0, 10.0, 10000) <= 1e-6);
  }
}

TEST_CASE("distance bounds: pinned example and scalings") {
  prd::DistanceBounds b = prd::supervised_distance_bounds(4, 100, 0.5, 0.1, 2.0);
  CHECK(b.per_neuron == doctest::Approx(16.0));
  CHECK(b.frobenius == doctest::Approx(160.0));
  // Per-neuron bound decays like 1/sqrt(m).
  prd::DistanceBounds b4 = prd::supervised_distance_bounds(4, 400, 0.5, 0.1, 2.0);
  CHECK(b4.per_neuron == doctest::Approx(8.0));
  CHECK(b4.frobenius == doctest::Approx(160.0));

  prd::DistanceBounds a1 = prd::adversarial_distance_bounds(4, 100, 0.5, 0.1, 2.0, 0.3, 2.0, 1.0);
  prd::DistanceBounds a2 = prd::adversarial_distance_bounds(4, 100, 0.5, 0.1, 2.0, 0.3, 2.0, 2.0);
  prd::DistanceBounds a3 = prd::adversarial_distance_bounds(4, 100, 0.5, 0.1, 2.0, 0.3, 2.0, 3.0);
  // Affine in t with slope mu (1 + kappa sqrt(n)) (per sqrt(m) for a neuron).
  double slope_f = a2.frobenius - a1.frobenius;
  CHECK(slope_f == doctest::Approx(0.3 * (1.0 + 2.0 * 2.0)));
  CHECK(a3.frobenius - a2.frobenius == doctest::Approx(slope_f));
  CHECK(a2.per_neuron - a1.per_neuron == doctest::Approx(slope_f / 10.0));
  // t = 0 collapses onto the supervised bounds.
  prd::DistanceBounds a0 = prd::adversarial_distance_bounds(4, 100, 0.5, 0.1, 2.0, 0.3, 2.0, 0.0);
  CHECK(a0.per_neuron == doctest::Approx(b.per_neuron));
  CHECK(a0.frobenius == doctest::Approx(b.frobenius));
}

TEST_CASE("reaction/diffusion scale magnitudes") {
  prd::RdScales s = prd::rd_scale_magnitudes(2, 4, 3, 1);
  CHECK(s.r_u == doctest::Approx(3.0));
  CHECK(s.d_u == doctest::Approx(96.0));
  CHECK(s.r_v == doctest::Approx(3.0));
  CHECK(s.d_v == doctest::Approx(96.0));
  // Scalar output keeps both diffusion magnitudes equal.
  prd::RdScales t = prd::rd_scale_magnitudes(7, 32, 5, 1);
  CHECK(t.d_u == doctest::Approx(t.d_v));
  CHECK(t.r_u == doctest::Approx(7.0 * 5.0 * std::sqrt(1.0 / 32.0)));
}

TEST_CASE("reports serialize to parseable JSON with the headline fields") {
  prd::ConstantsReport c = prd::compute_constants(4, 64, 4, 0.5, 1.0, 0.01, 0.1, 0.2, 10.0);
  nlohmann::json cj = nlohmann::json::parse(prd::constants_to_json(c));
  CHECK(cj.contains("mu"));
  CHECK(cj.contains("kappa"));
  CHECK(cj.contains("m_min_supervised"));
  CHECK(cj["mu"].get<double>() == doctest::Approx(c.mu));

  SeededRng rng(5);
  Mat X(3, 4);
  rng.fill_gaussian(X);
  X.rowwise().normalize();
  prd::GeneratorNet net = prd::init_generator(128, 4, 1, prd::InitMode::theory, rng);
  prd::GramReport g = prd::gram_stability_report(net, net, X, 0.01, 1.0);
  nlohmann::json gj = nlohmann::json::parse(prd::gram_report_to_json(g));
  CHECK(gj.contains("lambda0_hat"));
  CHECK(gj["drift_norm"].get<double>() == doctest::Approx(0.0));
}
