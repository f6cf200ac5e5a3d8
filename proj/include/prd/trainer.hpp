#pragma once

#include "prd/objective.hpp"
#include "prd/theory.hpp"

#include <string>
#include <vector>

namespace prd {

enum class TrainMode { supervised, adversarial };

struct TrainConfig {
  TrainMode mode = TrainMode::supervised;
  double learning_rate = 1e-2;
  double critic_learning_rate = 0.0;  // 0 -> same as learning_rate
  double momentum = 0.9;
  long batch_size = 0;  // 0 -> full batch
  long max_epochs = 1;  // full batch: one step per epoch
  double epsilon_stationary = 0.0;  // 0 -> never stop early
  int disc_steps_per_gen_step = 1;
  double L = 0.01;
  double gp_coeff = 0.0;
  std::uint64_t seed = 1;
  long log_every = 1;
  bool train_output_layer = true;  // theory runs freeze V
  long gram_every = 0;  // extra cadence (in steps) for kernel spectra, 0 = off
  long rd_every = 0;    // extra cadence for reaction/diffusion norms, 0 = off
};

struct TrajectoryRow {
  long step = 0;
  double sup_loss = 0.0;
  double adv_term = 0.0;       // NaN outside adversarial mode
  double pred_err = 0.0;       // ||z - y||_F on the full train split
  double max_neuron_dist = 0.0;
  double u_dist_f = 0.0;
  double v_dist_f = 0.0;
  double gram_lmin = 0.0;      // NaN when not computed at this step
  double gram_lmax = 0.0;
  double max_grad = 0.0;
  double ru_max = 0.0;         // NaN when not computed: max_j ||R_u_j||
  double du_max = 0.0;
  double rv_max = 0.0;
  double dv_max = 0.0;
};

struct TrajectoryLog {
  std::vector<TrajectoryRow> rows;
  long steps_run = 0;
  bool stopped_stationary = false;
};

// Column order is fixed; unset (NaN) cells are written empty.
void trajectory_to_csv(const TrajectoryLog& log, const std::string& path);

// Supervised mode: gradient steps on the supervised loss. Adversarial mode:
// disc_steps_per_gen_step critic updates (with row projection after each)
// followed by one generator step on the augmented loss. Aborts with
// std::runtime_error if the loss turns non-finite or exceeds 1e6x its
// initial value. disc may be null in supervised mode.
TrajectoryLog run_training(const TrainConfig& config, const Dataset& ds,
                           GeneratorNet& net, DiscriminatorNet* disc);

struct StationarityCheck {
  bool stationary = false;
  double max_abs_grad = 0.0;
};

// True iff every parameter gradient magnitude is strictly below epsilon.
// Supervised mode measures the supervised generator gradient; augmented mode
// also measures the critic's Wasserstein gradient (the stochastic penalty
// term is excluded so the check is deterministic).
StationarityCheck is_epsilon_stationary(const GeneratorNet& net, const DiscriminatorNet* disc,
                                        const Mat& X, const Mat& Y, GradientMode mode,
                                        double epsilon);

// Per-neuron reaction (supervised residual source) and diffusion (critic
// chain source) terms: du_j/dt = R_u_j + D_u_j and dv_j/dt = R_v_j + D_v_j
// under the augmented objective.
struct RDTerms {
  Mat R_u;  // m x d_in, row j = R_u_j
  Mat D_u;  // m x d_in
  Mat R_v;  // d_out x m, column j = R_v_j
  Mat D_v;  // d_out x m
};

RDTerms reaction_diffusion_terms(const GeneratorNet& net, const DiscriminatorNet& disc,
                                 const Mat& X, const Mat& Y);

// One explicit Euler step of size eta on the hidden layer (output layer
// fixed, scalar-mode network) compared against the kernel-space field
// H(t) [(y - z) + grad_z g]; returns ||(z_after - z_before)/eta - field|| /
// ||z_before||. with_adversary=false drops the critic term from the field
// and the step.
double dynamics_residual(const GeneratorNet& net, const DiscriminatorNet& disc,
                         const Mat& X, const Mat& Y, double eta, bool with_adversary = true);

}  // namespace prd
