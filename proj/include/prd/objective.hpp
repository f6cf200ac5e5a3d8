#pragma once

#include "prd/dataset.hpp"
#include "prd/network.hpp"

namespace prd {

struct LossBreakdown {
  double supervised = 0.0;
  double adversarial = 0.0;
  double augmented = 0.0;  // supervised - adversarial
};

struct GeneratorGradients {
  Mat dU;  // m x d_in
  Mat dV;  // d_out x m
};

// Both objective pieces split per layer; the augmented gradient is
// (sup - adv) and the reaction/diffusion instrumentation reads the pieces
// directly (reaction = -sup piece, diffusion = +adv piece).
struct GeneratorGradientParts {
  Mat dU_sup, dV_sup;
  Mat dU_adv, dV_adv;
};

struct DiscriminatorGradients {
  Mat dW;  // m x d_out
  Vec da;  // m
};

enum class GradientMode { supervised, augmented };

// 1/2 sum_p ||f(x_p) - y_p||^2.
double supervised_loss(const GeneratorNet& net, const Mat& X, const Mat& Y);
double supervised_loss(const GeneratorNet& net, const std::vector<Sample>& data);

// sum_p (1/sqrt(m)) a^T relu(W f(x_p)). Evaluated on the scaled generator
// output this is identical to the raw-hidden-activation form with its
// 1/(m sqrt(d_out)) factor, by positive homogeneity of relu.
double adversarial_term(const GeneratorNet& net, const DiscriminatorNet& disc,
                        const Mat& X);
double adversarial_term(const GeneratorNet& net, const DiscriminatorNet& disc,
                        const std::vector<Sample>& data);

LossBreakdown loss_breakdown(const GeneratorNet& net, const DiscriminatorNet& disc,
                             const Mat& X, const Mat& Y);

GeneratorGradientParts generator_gradient_parts(const GeneratorNet& net,
                                                const DiscriminatorNet& disc,
                                                const Mat& X, const Mat& Y);

GeneratorGradients generator_gradients(const GeneratorNet& net, const DiscriminatorNet& disc,
                                       const Mat& X, const Mat& Y, GradientMode mode);
GeneratorGradients generator_gradients(const GeneratorNet& net, const DiscriminatorNet& disc,
                                       const std::vector<Sample>& data, GradientMode mode);

// Gradients of  mean_p g(fake_p) - mean_p g(real_p)
//             + gp_coeff * mean_p (||grad_y g(yhat_p)||_2 - 1)^2
// where yhat_p interpolates real/fake with one uniform draw per pair and
// grad_y g(y) = (1/sqrt(m)) sum_r a_r 1{w_r.y >= 0} w_r. A zero-norm critic
// input gradient contributes zero parameter gradient (subgradient choice).
DiscriminatorGradients discriminator_gradients(const DiscriminatorNet& disc,
                                               const Mat& realY, const Mat& fakeZ,
                                               double gp_coeff, SeededRng& rng);

// Rows with ||w_r|| > L rescaled onto the ball boundary; others untouched.
Mat project_row_norm(const Mat& W, double L);

}  // namespace prd
