// prdlab: reproducible command-line runs over the library. Every subcommand
// resolves its configuration (flags > --config JSON > defaults), writes its
// artifacts into --out, and finishes with a manifest listing every file and
// its digest, so any run can be repeated byte-for-byte from the manifest.

#include <CLI11.hpp>
#include <json.hpp>

#include "prd/dataset.hpp"
#include "prd/featviz.hpp"
#include "prd/io.hpp"
#include "prd/manifest.hpp"
#include "prd/network.hpp"
#include "prd/rdsim.hpp"
#include "prd/theory.hpp"
#include "prd/trainer.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <limits>
#include <string>
#include <vector>

namespace {

using nlohmann::ordered_json;
using prd::Dataset;
using prd::GeneratorNet;
using prd::Mat;
using prd::SeededRng;
using prd::Vec;

std::string default_out_dir() {
  const char* env = std::getenv("PRDLAB_OUT");
  return (env != nullptr && *env != '\0') ? env : ".";
}

std::string join_path(const std::string& dir, const std::string& name) {
  return (std::filesystem::path(dir) / name).string();
}

// Collects artifacts as they are produced; the manifest goes last.
struct RunContext {
  std::string command;
  std::string out;
  ordered_json config;
  std::vector<std::uint64_t> seeds;
  std::vector<prd::ArtifactEntry> inputs;
  std::vector<std::string> artifact_names;
  std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();

  explicit RunContext(std::string cmd, std::string out_dir)
      : command(std::move(cmd)), out(std::move(out_dir)) {
    std::filesystem::create_directories(out);
  }

  std::string path(const std::string& name) const { return join_path(out, name); }
  void add_input(const std::string& file) { inputs.push_back({file, prd::sha256_file(file)}); }
  void add_artifact(const std::string& name) { artifact_names.push_back(name); }

  void finish() {
    prd::RunManifest m;
    m.command = command;
    m.config_json = config.dump();
    m.seeds = seeds;
    m.inputs = inputs;
    for (const auto& name : artifact_names)
      m.artifacts.push_back({name, prd::sha256_file(path(name))});
    m.duration_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    prd::write_manifest(m, path("manifest.json"));
  }
};

// Reads a value out of the loaded config; absent or null keys keep the default.
template <typename T>
void jget(const ordered_json& j, const char* key, T& var) {
  if (j.contains(key) && !j.at(key).is_null()) var = j.at(key).get<T>();
}

// --config is applied before flag parsing so flags win; a manifest file works
// as a config (its "config" object is extracted).
ordered_json load_config(int argc, char** argv) {
  std::string path;
  for (int i = 1; i < argc; ++i) {
    std::string arg = argv[i];
    if (arg == "--config" && i + 1 < argc) path = argv[i + 1];
    else if (arg.rfind("--config=", 0) == 0) path = arg.substr(9);
  }
  if (path.empty()) return ordered_json::object();
  return ordered_json::parse(prd::read_config_json(path));
}

// ---------------------------------------------------------------------------
// Shared dataset flags (synthetic manifold mixture or an IDX pair).

struct DataFlags {
  long n_total = 1200;
  long n_train = 1000;
  int d_in = 10;
  int modes = 4;
  int manifold_dim = 2;
  double fill_value = 1.0;
  std::uint64_t data_seed = 1;
  bool scalar_labels = false;
  double center_box = 10.0;
  bool normalize = true;
  std::string images;
  std::string labels;
};

void add_data_flags(CLI::App* sc, DataFlags& df) {
  sc->add_option("--n-total", df.n_total, "Synthetic sample count");
  sc->add_option("--n-train", df.n_train, "Training split size");
  sc->add_option("--d-in", df.d_in, "Input dimension");
  sc->add_option("--modes", df.modes, "Mixture mode count");
  sc->add_option("--manifold-dim", df.manifold_dim, "Leading coordinates carrying the mixture");
  sc->add_option("--fill", df.fill_value, "Value of the trailing coordinates");
  sc->add_option("--data-seed", df.data_seed, "Dataset generator seed");
  sc->add_flag("--scalar-labels,!--onehot-labels", df.scalar_labels,
               "Map class index onto [-1,1] instead of one-hot");
  sc->add_option("--center-box", df.center_box, "Half-width of the mode-center box");
  sc->add_flag("--normalize,!--no-normalize", df.normalize, "Scale inputs to unit l2 norm");
  sc->add_option("--images", df.images, "IDX image file (overrides synthetic flags)");
  sc->add_option("--labels", df.labels, "IDX label file");
}

void apply_data_config(const ordered_json& j, DataFlags& df) {
  jget(j, "n_total", df.n_total);
  jget(j, "n_train", df.n_train);
  jget(j, "d_in", df.d_in);
  jget(j, "modes", df.modes);
  jget(j, "manifold_dim", df.manifold_dim);
  jget(j, "fill_value", df.fill_value);
  jget(j, "data_seed", df.data_seed);
  jget(j, "scalar_labels", df.scalar_labels);
  jget(j, "center_box", df.center_box);
  jget(j, "normalize", df.normalize);
  jget(j, "images", df.images);
  jget(j, "labels", df.labels);
}

void record_data_config(ordered_json& j, const DataFlags& df) {
  j["n_total"] = df.n_total;
  j["n_train"] = df.n_train;
  j["d_in"] = df.d_in;
  j["modes"] = df.modes;
  j["manifold_dim"] = df.manifold_dim;
  j["fill_value"] = df.fill_value;
  j["data_seed"] = df.data_seed;
  j["scalar_labels"] = df.scalar_labels;
  j["center_box"] = df.center_box;
  j["normalize"] = df.normalize;
  j["images"] = df.images;
  j["labels"] = df.labels;
}

Dataset build_dataset(const DataFlags& df, RunContext& ctx) {
  Dataset ds;
  if (!df.images.empty() || !df.labels.empty()) {
    if (df.images.empty() || df.labels.empty())
      throw std::invalid_argument("--images and --labels must be given together");
    ctx.add_input(df.images);
    ctx.add_input(df.labels);
    ds = prd::load_idx(df.images, df.labels);
  } else {
    prd::ManifoldSpec spec;
    spec.n_total = df.n_total;
    spec.n_train = df.n_train;
    spec.d_in = df.d_in;
    spec.modes = df.modes;
    spec.manifold_dim = df.manifold_dim;
    spec.fill_value = df.fill_value;
    spec.seed = df.data_seed;
    spec.scalar_labels = df.scalar_labels;
    spec.center_box = df.center_box;
    ds = prd::generate_manifold_dataset(spec);
    ctx.seeds.push_back(df.data_seed);
  }
  if (df.normalize) ds = prd::normalize_unit(ds);
  return ds;
}

// ---------------------------------------------------------------------------
// Shared training flags.

struct TrainFlags {
  std::string mode = "sup";
  int m = 512;
  int critic_m = 0;  // 0 -> same as m
  std::string init = "theory";
  std::uint64_t seed = 1;
  double lr = 1e-2;
  double critic_lr = 0.0;  // 0 -> same as lr
  double momentum = 0.9;
  long batch_size = 0;
  long epochs = 1000;
  long log_every = 10;
  long gram_every = 0;
  long rd_every = 0;
  double epsilon_stationary = 0.0;
  double L = 0.01;
  double gp = 0.0;
  int disc_steps = 1;
  bool train_output_layer = true;
};

void add_train_flags(CLI::App* sc, TrainFlags& tf) {
  sc->add_option("--mode", tf.mode, "Training mode")->check(CLI::IsMember({"sup", "adv"}));
  sc->add_option("--m", tf.m, "Generator hidden width");
  sc->add_option("--critic-m", tf.critic_m, "Critic hidden width (0 = same as --m)");
  sc->add_option("--init", tf.init, "Initialization scheme")
      ->check(CLI::IsMember({"theory", "xavier"}));
  sc->add_option("--seed", tf.seed, "Network init / shuffle seed");
  sc->add_option("--lr", tf.lr, "Generator learning rate");
  sc->add_option("--critic-lr", tf.critic_lr, "Critic learning rate (0 = same as --lr)");
  sc->add_option("--momentum", tf.momentum, "Momentum coefficient");
  sc->add_option("--batch-size", tf.batch_size, "Minibatch size (0 = full batch)");
  sc->add_option("--epochs", tf.epochs, "Epoch count (one step per epoch at full batch)");
  sc->add_option("--log-every", tf.log_every, "Logging cadence in steps");
  sc->add_option("--gram-every", tf.gram_every, "Kernel-spectrum cadence (0 = off)");
  sc->add_option("--rd-every", tf.rd_every, "Reaction/diffusion-norm cadence (0 = off)");
  sc->add_option("--epsilon-stationary", tf.epsilon_stationary,
                 "Early-stop gradient threshold (0 = never)");
  sc->add_option("--L", tf.L, "Critic row-norm cap");
  sc->add_option("--gp", tf.gp, "Gradient-penalty coefficient");
  sc->add_option("--disc-steps", tf.disc_steps, "Critic steps per generator step");
  sc->add_flag("--train-output-layer,!--freeze-output", tf.train_output_layer,
               "Update the output layer (disable for kernel-regime runs)");
}

void apply_train_config(const ordered_json& j, TrainFlags& tf) {
  jget(j, "mode", tf.mode);
  jget(j, "m", tf.m);
  jget(j, "critic_m", tf.critic_m);
  jget(j, "init", tf.init);
  jget(j, "seed", tf.seed);
  jget(j, "lr", tf.lr);
  jget(j, "critic_lr", tf.critic_lr);
  jget(j, "momentum", tf.momentum);
  jget(j, "batch_size", tf.batch_size);
  jget(j, "epochs", tf.epochs);
  jget(j, "log_every", tf.log_every);
  jget(j, "gram_every", tf.gram_every);
  jget(j, "rd_every", tf.rd_every);
  jget(j, "epsilon_stationary", tf.epsilon_stationary);
  jget(j, "L", tf.L);
  jget(j, "gp", tf.gp);
  jget(j, "disc_steps", tf.disc_steps);
  jget(j, "train_output_layer", tf.train_output_layer);
}

void record_train_config(ordered_json& j, const TrainFlags& tf) {
  j["mode"] = tf.mode;
  j["m"] = tf.m;
  j["critic_m"] = tf.critic_m;
  j["init"] = tf.init;
  j["seed"] = tf.seed;
  j["lr"] = tf.lr;
  j["critic_lr"] = tf.critic_lr;
  j["momentum"] = tf.momentum;
  j["batch_size"] = tf.batch_size;
  j["epochs"] = tf.epochs;
  j["log_every"] = tf.log_every;
  j["gram_every"] = tf.gram_every;
  j["rd_every"] = tf.rd_every;
  j["epsilon_stationary"] = tf.epsilon_stationary;
  j["L"] = tf.L;
  j["gp"] = tf.gp;
  j["disc_steps"] = tf.disc_steps;
  j["train_output_layer"] = tf.train_output_layer;
}

prd::TrainConfig to_train_config(const TrainFlags& tf) {
  prd::TrainConfig cfg;
  cfg.mode = (tf.mode == "adv") ? prd::TrainMode::adversarial : prd::TrainMode::supervised;
  cfg.learning_rate = tf.lr;
  cfg.critic_learning_rate = tf.critic_lr;
  cfg.momentum = tf.momentum;
  cfg.batch_size = tf.batch_size;
  cfg.max_epochs = tf.epochs;
  cfg.epsilon_stationary = tf.epsilon_stationary;
  cfg.disc_steps_per_gen_step = tf.disc_steps;
  cfg.L = tf.L;
  cfg.gp_coeff = tf.gp;
  cfg.seed = tf.seed;
  cfg.log_every = tf.log_every;
  cfg.train_output_layer = tf.train_output_layer;
  cfg.gram_every = tf.gram_every;
  cfg.rd_every = tf.rd_every;
  return cfg;
}

prd::InitMode to_init_mode(const std::string& s) {
  return s == "xavier" ? prd::InitMode::xavier : prd::InitMode::theory;
}

// Trains per the flags; returns the log and leaves the final net in `net`.
prd::TrajectoryLog run_train(const DataFlags& df, const TrainFlags& tf, RunContext& ctx,
                             GeneratorNet& net) {
  Dataset ds = build_dataset(df, ctx);
  SeededRng rng(tf.seed);
  net = prd::init_generator(tf.m, ds.d_in, ds.d_out, to_init_mode(tf.init), rng);
  ctx.seeds.push_back(tf.seed);
  prd::TrainConfig cfg = to_train_config(tf);
  if (cfg.mode == prd::TrainMode::adversarial) {
    int critic_m = tf.critic_m > 0 ? tf.critic_m : tf.m;
    prd::DiscriminatorNet disc = prd::init_discriminator(critic_m, ds.d_out, tf.L, rng);
    return prd::run_training(cfg, ds, net, &disc);
  }
  return prd::run_training(cfg, ds, net, nullptr);
}

// ---------------------------------------------------------------------------
// Subcommand bodies. Each returns after queueing artifacts; the caller writes
// the manifest.

void cmd_gen_data(const DataFlags& df, RunContext& ctx) {
  record_data_config(ctx.config, df);
  Dataset ds = build_dataset(df, ctx);
  prd::export_csv(ds, ctx.path("data.csv"));
  ctx.add_artifact("data.csv");
}

void cmd_train(const DataFlags& df, const TrainFlags& tf, RunContext& ctx) {
  record_data_config(ctx.config, df);
  record_train_config(ctx.config, tf);
  GeneratorNet net;
  prd::TrajectoryLog log = run_train(df, tf, ctx, net);
  prd::trajectory_to_csv(log, ctx.path("trajectory.csv"));
  ctx.add_artifact("trajectory.csv");
  prd::save_generator(net, ctx.path("checkpoint.bin"));
  ctx.add_artifact("checkpoint.bin");
  std::printf("steps=%ld final_sup_loss=%s%s\n", log.steps_run,
              prd::format_double(log.rows.back().sup_loss).c_str(),
              log.stopped_stationary ? " (stationary stop)" : "");
}

struct GramFlags {
  std::string checkpoint;
  long mc_samples = 0;
  std::uint64_t mc_seed = 7;
  double lambda0 = std::nan("");      // default: lambda_min of H(0)
  double lambda1_inf = std::nan("");  // default: lambda_max of H(0)
};

void cmd_gram(const DataFlags& df, const GramFlags& gf, RunContext& ctx) {
  record_data_config(ctx.config, df);
  ctx.config["checkpoint"] = gf.checkpoint;
  ctx.config["mc_samples"] = gf.mc_samples;
  ctx.config["mc_seed"] = gf.mc_seed;
  if (std::isfinite(gf.lambda0)) ctx.config["lambda0"] = gf.lambda0;
  if (std::isfinite(gf.lambda1_inf)) ctx.config["lambda1_inf"] = gf.lambda1_inf;

  ctx.add_input(gf.checkpoint);
  GeneratorNet net = prd::load_generator(gf.checkpoint);
  GeneratorNet net0 = net;
  net0.U = net.snapshot.U0;
  net0.V = net.snapshot.V0;

  Dataset ds = build_dataset(df, ctx);
  Mat X = prd::to_batch(ds.train).X;

  prd::Spectrum s0 = prd::spectral_extremes(prd::gram_at(net0.U, X), 1e-9, 100000);
  double l0 = std::isfinite(gf.lambda0) ? gf.lambda0 : s0.lambda_min;
  double l1inf = std::isfinite(gf.lambda1_inf) ? gf.lambda1_inf : s0.lambda_max;
  prd::GramReport report = prd::gram_stability_report(net, net0, X, l0, l1inf);

  std::ofstream(ctx.path("gram_report.json")) << prd::gram_report_to_json(report) << "\n";
  ctx.add_artifact("gram_report.json");

  if (gf.mc_samples > 0) {
    SeededRng rng(gf.mc_seed);
    ctx.seeds.push_back(gf.mc_seed);
    Mat hinf = prd::gram_infinity(X, gf.mc_samples, rng);
    prd::CsvWriter csv(ctx.path("gram_infinity.csv"));
    for (Eigen::Index i = 0; i < hinf.rows(); ++i) {
      std::vector<std::string> cells;
      for (Eigen::Index j = 0; j < hinf.cols(); ++j)
        cells.push_back(prd::format_double(hinf(i, j)));
      csv.row(cells);
    }
    ctx.add_artifact("gram_infinity.csv");
    prd::Spectrum si = prd::spectral_extremes(hinf, 1e-9, 100000);
    ordered_json hj;
    hj["mc_samples"] = gf.mc_samples;
    hj["lambda_min"] = si.lambda_min;
    hj["lambda_max"] = si.lambda_max;
    std::ofstream(ctx.path("gram_infinity_summary.json")) << hj.dump(2) << "\n";
    ctx.add_artifact("gram_infinity_summary.json");
  }
}

struct BoundsFlags {
  double delta = 0.1;
  double epsilon = 0.1;
  long mc_samples = 0;
  std::uint64_t mc_seed = 7;
};

void cmd_verify_bounds(const DataFlags& df, const TrainFlags& tf, const BoundsFlags& bf,
                       RunContext& ctx) {
  if (!df.images.empty()) throw std::invalid_argument("verify-bounds expects synthetic data");
  record_data_config(ctx.config, df);
  record_train_config(ctx.config, tf);
  ctx.config["delta"] = bf.delta;
  ctx.config["epsilon"] = bf.epsilon;
  ctx.config["mc_samples"] = bf.mc_samples;
  ctx.config["mc_seed"] = bf.mc_seed;

  TrainFlags run_tf = tf;
  run_tf.gram_every = tf.gram_every > 0 ? tf.gram_every : tf.log_every;
  GeneratorNet net;
  prd::TrajectoryLog log = run_train(df, run_tf, ctx, net);
  prd::trajectory_to_csv(log, ctx.path("trajectory.csv"));
  ctx.add_artifact("trajectory.csv");

  // lambda0 from the infinite-width kernel when sampled, else the measured
  // floor of lambda_min(H(t)); lambda1_inf from the matching lambda_max.
  double lmin_hat = std::numeric_limits<double>::infinity();
  double lmax_hat = 0.0;
  for (const auto& row : log.rows) {
    if (std::isfinite(row.gram_lmin)) lmin_hat = std::min(lmin_hat, row.gram_lmin);
    if (std::isfinite(row.gram_lmax)) lmax_hat = std::max(lmax_hat, row.gram_lmax);
  }
  double l0 = lmin_hat;
  double l1inf = lmax_hat;
  if (bf.mc_samples > 0) {
    Dataset ds = build_dataset(df, ctx);  // same flags: identical dataset
    SeededRng rng(bf.mc_seed);
    ctx.seeds.push_back(bf.mc_seed);
    prd::Spectrum si = prd::spectral_extremes(
        prd::gram_infinity(prd::to_batch(ds.train).X, bf.mc_samples, rng), 1e-9, 100000);
    l0 = si.lambda_min;
    l1inf = si.lambda_max;
  }

  long n = df.n_train;
  double z0 = log.rows.front().pred_err;
  prd::ConstantsReport c =
      prd::compute_constants(n, tf.m, df.d_in, l0, l1inf, tf.L, bf.delta, bf.epsilon, z0);
  std::ofstream(ctx.path("constants.json")) << prd::constants_to_json(c) << "\n";
  ctx.add_artifact("constants.json");

  const bool adv = tf.mode == "adv";
  const double mu_used = adv ? c.mu : 0.0;
  prd::DistanceBounds sup_b = prd::supervised_distance_bounds(n, tf.m, l0, bf.delta, z0);
  prd::CsvWriter csv(ctx.path("bounds.csv"));
  csv.row({"step", "time", "pred_err", "pred_err_envelope", "u_dist_f", "u_dist_f_bound",
           "max_neuron_dist", "max_neuron_dist_bound"});
  for (const auto& row : log.rows) {
    double t = tf.lr * double(row.step);
    prd::DistanceBounds b =
        adv ? prd::adversarial_distance_bounds(n, tf.m, l0, bf.delta, z0, c.mu, c.kappa, t)
            : sup_b;
    std::string env;
    if (z0 >= c.kappa * mu_used)
      env = prd::format_double(prd::prediction_error_envelope(t, z0, c.kappa, mu_used, l0));
    csv.row({std::to_string(row.step), prd::format_double(t), prd::format_double(row.pred_err),
             env, prd::format_double(row.u_dist_f), prd::format_double(b.frobenius),
             prd::format_double(row.max_neuron_dist), prd::format_double(b.per_neuron)});
  }
  ctx.add_artifact("bounds.csv");
}

struct SimFlags {
  std::string model;
  std::string preset;
  int height = 100;
  int width = 100;
  long steps = 10000;
  long snapshot_every = 1000;
  double amplitude = 0.03;
  std::uint64_t init_seed = 1;
  int patch = 25;
  // NaN = not set; resolved against the preset / model defaults.
  double a = std::nan(""), b = std::nan(""), c = std::nan(""), d = std::nan("");
  double h = std::nan(""), k = std::nan(""), F = std::nan("");
  double mu = std::nan(""), nu = std::nan(""), dt = std::nan(""), dx = std::nan("");
};

void apply_sim_config(const ordered_json& j, SimFlags& sf) {
  jget(j, "model", sf.model);
  jget(j, "height", sf.height);
  jget(j, "width", sf.width);
  jget(j, "steps", sf.steps);
  jget(j, "snapshot_every", sf.snapshot_every);
  jget(j, "amplitude", sf.amplitude);
  jget(j, "init_seed", sf.init_seed);
  jget(j, "patch", sf.patch);
  jget(j, "a", sf.a);
  jget(j, "b", sf.b);
  jget(j, "c", sf.c);
  jget(j, "d", sf.d);
  jget(j, "h", sf.h);
  jget(j, "k", sf.k);
  jget(j, "F", sf.F);
  jget(j, "mu", sf.mu);
  jget(j, "nu", sf.nu);
  jget(j, "dt", sf.dt);
  jget(j, "dx", sf.dx);
}

void cmd_simulate(const SimFlags& sf, RunContext& ctx) {
  auto setp = [](double& target, double flag) {
    if (std::isfinite(flag)) target = flag;
  };
  prd::RDRunParams params;
  prd::RDGrid grid;
  ordered_json& cj = ctx.config;
  cj["model"] = sf.model;
  cj["height"] = sf.height;
  cj["width"] = sf.width;
  cj["steps"] = sf.steps;
  cj["snapshot_every"] = sf.snapshot_every;

  if (sf.model == "turing") {
    params.model = prd::RDModel::turing;
    prd::TuringParams& tp = params.turing;
    if (sf.preset == "patterned") {
      // Finer grid and weaker u->v coupling: the linearization admits growing
      // wavenumbers, so the uniform state develops visible structure.
      tp.c = 2.0;
      tp.dx = 0.01;
    } else if (!sf.preset.empty() && sf.preset != "default") {
      throw std::invalid_argument("unknown turing preset: " + sf.preset);
    }
    setp(tp.a, sf.a);
    setp(tp.b, sf.b);
    setp(tp.c, sf.c);
    setp(tp.d, sf.d);
    setp(tp.h, sf.h);
    setp(tp.k, sf.k);
    setp(tp.mu, sf.mu);
    setp(tp.nu, sf.nu);
    setp(tp.dt, sf.dt);
    setp(tp.dx, sf.dx);
    cj["a"] = tp.a;
    cj["b"] = tp.b;
    cj["c"] = tp.c;
    cj["d"] = tp.d;
    cj["h"] = tp.h;
    cj["k"] = tp.k;
    cj["mu"] = tp.mu;
    cj["nu"] = tp.nu;
    cj["dt"] = tp.dt;
    cj["dx"] = tp.dx;
    cj["amplitude"] = sf.amplitude;
    cj["init_seed"] = sf.init_seed;
    SeededRng rng(sf.init_seed);
    ctx.seeds.push_back(sf.init_seed);
    grid = prd::init_turing(sf.height, sf.width, tp.h, tp.k, sf.amplitude, rng);
  } else {
    params.model = prd::RDModel::grayscott;
    prd::GrayScottParams& gp = params.grayscott;
    if (!sf.preset.empty()) {
      // Feed/kill presets on the fine grid; each sustains a growing spot or
      // stripe region from the central square seed.
      if (sf.preset == "f025k055") {
        gp.F = 0.025;
        gp.k = 0.055;
      } else if (sf.preset == "f025k060") {
        gp.F = 0.025;
        gp.k = 0.060;
      } else if (sf.preset == "f040k060") {
        gp.F = 0.040;
        gp.k = 0.060;
      } else if (sf.preset == "f035k065") {
        gp.F = 0.035;
        gp.k = 0.065;
      } else {
        throw std::invalid_argument("unknown gs preset: " + sf.preset);
      }
      gp.dx = 0.01;
    }
    setp(gp.F, sf.F);
    setp(gp.k, sf.k);
    setp(gp.mu, sf.mu);
    setp(gp.nu, sf.nu);
    setp(gp.dt, sf.dt);
    setp(gp.dx, sf.dx);
    cj["F"] = gp.F;
    cj["k"] = gp.k;
    cj["mu"] = gp.mu;
    cj["nu"] = gp.nu;
    cj["dt"] = gp.dt;
    cj["dx"] = gp.dx;
    cj["patch"] = sf.patch;
    grid = prd::init_grayscott(sf.height, sf.width, sf.patch);
  }

  prd::RDRunResult res = prd::run_rd(grid, params, sf.steps, sf.snapshot_every);
  for (size_t i = 0; i < res.snapshot_steps.size(); ++i) {
    char name[32];
    std::snprintf(name, sizeof name, "u_%06ld.pgm", res.snapshot_steps[i]);
    prd::write_pgm(prd::to_gray8(res.snapshots_u[i]), sf.height, sf.width, ctx.path(name));
    ctx.add_artifact(name);
    std::snprintf(name, sizeof name, "v_%06ld.pgm", res.snapshot_steps[i]);
    prd::write_pgm(prd::to_gray8(res.snapshots_v[i]), sf.height, sf.width, ctx.path(name));
    ctx.add_artifact(name);
  }
  prd::stats_to_csv(res.stats, ctx.path("stats.csv"));
  ctx.add_artifact("stats.csv");
}

struct FeatvizFlags {
  std::string checkpoint;
  int image_height = 0;  // 0 -> square root of d_in when square
  int image_width = 0;
  int top_k = 16;
  double epsilon = 0.007;
  int ascent_steps = 100;
  double ascent_step_size = 0.1;
  double x0_fill = 0.0;
};

void cmd_featviz(const FeatvizFlags& ff, RunContext& ctx) {
  ctx.add_input(ff.checkpoint);
  GeneratorNet net = prd::load_generator(ff.checkpoint);

  int ih = ff.image_height;
  int iw = ff.image_width;
  if (ih == 0 || iw == 0) {
    int root = int(std::lround(std::sqrt(double(net.d_in))));
    if (root * root != net.d_in)
      throw std::invalid_argument("--image-height/--image-width required: d_in is not square");
    ih = iw = root;
  }
  int top_k = std::min<int>(ff.top_k, net.m);

  ordered_json& cj = ctx.config;
  cj["checkpoint"] = ff.checkpoint;
  cj["image_height"] = ih;
  cj["image_width"] = iw;
  cj["top_k"] = top_k;
  cj["epsilon"] = ff.epsilon;
  cj["ascent_steps"] = ff.ascent_steps;
  cj["ascent_step_size"] = ff.ascent_step_size;
  cj["x0_fill"] = ff.x0_fill;

  prd::variances_to_csv(prd::neuron_variances(net.U), ctx.path("variances.csv"));
  ctx.add_artifact("variances.csv");

  std::vector<prd::GrayImage> imgs = prd::export_weight_images(net.U, ih, iw, top_k);
  for (size_t i = 0; i < imgs.size(); ++i) {
    char name[32];
    std::snprintf(name, sizeof name, "weight_%02zu.pgm", i);
    prd::write_pgm(imgs[i].pixels, imgs[i].height, imgs[i].width, ctx.path(name));
    ctx.add_artifact(name);
  }

  prd::AscentConfig acfg;
  acfg.epsilon = ff.epsilon;
  acfg.iterations = ff.ascent_steps;
  acfg.step_size = ff.ascent_step_size;
  Vec x0 = Vec::Constant(net.d_in, ff.x0_fill);
  prd::CsvWriter csv(ctx.path("ascent.csv"));
  csv.row({"neuron", "excitation_gain", "dead"});
  for (int j = 0; j < net.m; ++j) {
    Vec u = net.U.row(j).transpose();
    prd::AscentResult r = prd::maximize_excitation(u, x0, acfg);
    csv.row({std::to_string(j), prd::format_double(u.dot(r.delta)),
             r.dead_within_ball ? "1" : "0"});
  }
  ctx.add_artifact("ascent.csv");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"pseudo-reaction-diffusion training laboratory"};
  app.require_subcommand(1);
  app.fallthrough();

  ordered_json file_cfg;
  try {
    file_cfg = load_config(argc, argv);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }

  std::string out = default_out_dir();
  jget(file_cfg, "out", out);
  std::string config_path;  // consumed by load_config; registered so parsing accepts it
  app.add_option("--config", config_path, "JSON config or manifest to take defaults from");
  app.add_option("--out", out, "Output directory (default $PRDLAB_OUT or .)");

  DataFlags df;
  apply_data_config(file_cfg, df);
  TrainFlags tf;
  apply_train_config(file_cfg, tf);
  GramFlags gf;
  jget(file_cfg, "checkpoint", gf.checkpoint);
  jget(file_cfg, "mc_samples", gf.mc_samples);
  jget(file_cfg, "mc_seed", gf.mc_seed);
  jget(file_cfg, "lambda0", gf.lambda0);
  jget(file_cfg, "lambda1_inf", gf.lambda1_inf);
  BoundsFlags bf;
  jget(file_cfg, "delta", bf.delta);
  jget(file_cfg, "epsilon", bf.epsilon);
  jget(file_cfg, "mc_samples", bf.mc_samples);
  jget(file_cfg, "mc_seed", bf.mc_seed);
  SimFlags sf;
  apply_sim_config(file_cfg, sf);
  FeatvizFlags ff;
  jget(file_cfg, "checkpoint", ff.checkpoint);
  jget(file_cfg, "image_height", ff.image_height);
  jget(file_cfg, "image_width", ff.image_width);
  jget(file_cfg, "top_k", ff.top_k);
  jget(file_cfg, "epsilon", ff.epsilon);
  jget(file_cfg, "ascent_steps", ff.ascent_steps);
  jget(file_cfg, "ascent_step_size", ff.ascent_step_size);
  jget(file_cfg, "x0_fill", ff.x0_fill);

  CLI::App* sc_gen = app.add_subcommand("gen-data", "Generate a synthetic dataset as CSV");
  sc_gen->fallthrough();
  add_data_flags(sc_gen, df);

  CLI::App* sc_train = app.add_subcommand("train", "Train a generator (optionally adversarial)");
  sc_train->fallthrough();
  add_data_flags(sc_train, df);
  add_train_flags(sc_train, tf);

  CLI::App* sc_gram = app.add_subcommand("gram", "Kernel spectra and drift for a checkpoint");
  sc_gram->fallthrough();
  add_data_flags(sc_gram, df);
  sc_gram->add_option("--checkpoint", gf.checkpoint, "Generator checkpoint")
      ->required(gf.checkpoint.empty());
  sc_gram->add_option("--mc-samples", gf.mc_samples,
                      "Monte-Carlo samples for the infinite-width kernel (0 = skip)");
  sc_gram->add_option("--mc-seed", gf.mc_seed, "Monte-Carlo seed");
  sc_gram->add_option("--lambda0", gf.lambda0, "Kernel floor reference (default: measured)");
  sc_gram->add_option("--lambda1-inf", gf.lambda1_inf,
                      "Kernel ceiling reference (default: measured)");

  CLI::App* sc_bounds =
      app.add_subcommand("verify-bounds", "Train and compare against the closed-form bounds");
  sc_bounds->fallthrough();
  add_data_flags(sc_bounds, df);
  add_train_flags(sc_bounds, tf);
  sc_bounds->add_option("--delta", bf.delta, "Failure probability in the bounds");
  sc_bounds->add_option("--epsilon", bf.epsilon, "Target prediction error for the time bound");
  sc_bounds->add_option("--mc-samples", bf.mc_samples,
                        "Monte-Carlo samples for lambda0 (0 = use measured floor)");
  sc_bounds->add_option("--mc-seed", bf.mc_seed, "Monte-Carlo seed");

  CLI::App* sc_sim = app.add_subcommand("simulate", "Run a reaction-diffusion grid");
  sc_sim->fallthrough();
  sc_sim->set_help_flag("--help", "Print this help message and exit");  // frees -h for --h
  sc_sim->add_option("--model", sf.model, "PDE model")
      ->required(sf.model.empty())
      ->check(CLI::IsMember({"turing", "gs"}));
  sc_sim->add_option("--preset", sf.preset, "Named parameter set");
  sc_sim->add_option("--height", sf.height, "Grid height");
  sc_sim->add_option("--width", sf.width, "Grid width");
  sc_sim->add_option("--steps", sf.steps, "Step count");
  sc_sim->add_option("--snapshot-every", sf.snapshot_every, "Snapshot cadence");
  sc_sim->add_option("--amplitude", sf.amplitude, "Turing init noise amplitude");
  sc_sim->add_option("--init-seed", sf.init_seed, "Turing init seed");
  sc_sim->add_option("--patch", sf.patch, "Gray-Scott seed square side");
  sc_sim->add_option("--a", sf.a, "Turing: du/dt coefficient on (u-h)");
  sc_sim->add_option("--b", sf.b, "Turing: du/dt coefficient on (v-k)");
  sc_sim->add_option("--c", sf.c, "Turing: dv/dt coefficient on (u-h)");
  sc_sim->add_option("--d", sf.d, "Turing: dv/dt coefficient on (v-k)");
  sc_sim->add_option("--h", sf.h, "Turing: u equilibrium");
  sc_sim->add_option("--k", sf.k, "Turing: v equilibrium / Gray-Scott kill rate");
  sc_sim->add_option("--F", sf.F, "Gray-Scott feed rate");
  sc_sim->add_option("--mu", sf.mu, "u diffusion coefficient");
  sc_sim->add_option("--nu", sf.nu, "v diffusion coefficient");
  sc_sim->add_option("--dt", sf.dt, "Time step");
  sc_sim->add_option("--dx", sf.dx, "Grid spacing");

  CLI::App* sc_viz = app.add_subcommand("featviz", "Weight images, variances, excitation gains");
  sc_viz->fallthrough();
  sc_viz->add_option("--checkpoint", ff.checkpoint, "Generator checkpoint")
      ->required(ff.checkpoint.empty());
  sc_viz->add_option("--image-height", ff.image_height, "Weight-image height (0 = auto square)");
  sc_viz->add_option("--image-width", ff.image_width, "Weight-image width (0 = auto square)");
  sc_viz->add_option("--top-k", ff.top_k, "How many largest-norm rows to image");
  sc_viz->add_option("--epsilon", ff.epsilon, "Excitation-ascent ball radius");
  sc_viz->add_option("--ascent-steps", ff.ascent_steps, "Ascent iterations");
  sc_viz->add_option("--ascent-step-size", ff.ascent_step_size, "Ascent step size");
  sc_viz->add_option("--x0-fill", ff.x0_fill, "Constant fill of the ascent base point");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);  // 0
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }

  try {
    if (sc_gen->parsed()) {
      RunContext ctx("gen-data", out);
      cmd_gen_data(df, ctx);
      ctx.finish();
    } else if (sc_train->parsed()) {
      RunContext ctx("train", out);
      cmd_train(df, tf, ctx);
      ctx.finish();
    } else if (sc_gram->parsed()) {
      RunContext ctx("gram", out);
      cmd_gram(df, gf, ctx);
      ctx.finish();
    } else if (sc_bounds->parsed()) {
      RunContext ctx("verify-bounds", out);
      cmd_verify_bounds(df, tf, bf, ctx);
      ctx.finish();
    } else if (sc_sim->parsed()) {
      RunContext ctx("simulate", out);
      cmd_simulate(sf, ctx);
      ctx.finish();
    } else if (sc_viz->parsed()) {
      RunContext ctx("featviz", out);
      cmd_featviz(ff, ctx);
      ctx.finish();
    }
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
  return 0;
}
