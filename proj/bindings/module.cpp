// Python bindings for the library's main operations: dataset synthesis,
// two-layer network training, kernel spectra and closed-form bounds, the
// reaction/diffusion decomposition, PDE grids, and filter diagnostics.
#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "prd/core.hpp"
#include "prd/dataset.hpp"
#include "prd/featviz.hpp"
#include "prd/network.hpp"
#include "prd/objective.hpp"
#include "prd/rdsim.hpp"
#include "prd/theory.hpp"
#include "prd/trainer.hpp"

#include <stdexcept>
#include <string>
#include <vector>

namespace py = pybind11;
using namespace prd;

namespace {

InitMode parse_init(const std::string& s) {
  if (s == "theory") return InitMode::theory;
  if (s == "xavier") return InitMode::xavier;
  throw std::invalid_argument("init must be 'theory' or 'xavier'");
}

TrainMode parse_train_mode(const std::string& s) {
  if (s == "sup") return TrainMode::supervised;
  if (s == "adv") return TrainMode::adversarial;
  throw std::invalid_argument("mode must be 'sup' or 'adv'");
}

py::dict log_to_dict(const TrajectoryLog& log) {
  std::vector<long> step;
  std::vector<double> sup_loss, adv_term, pred_err, max_neuron_dist, u_dist_f, v_dist_f,
      gram_lmin, gram_lmax, max_grad, ru_max, du_max, rv_max, dv_max;
  for (const auto& r : log.rows) {
    step.push_back(r.step);
    sup_loss.push_back(r.sup_loss);
    adv_term.push_back(r.adv_term);
    pred_err.push_back(r.pred_err);
    max_neuron_dist.push_back(r.max_neuron_dist);
    u_dist_f.push_back(r.u_dist_f);
    v_dist_f.push_back(r.v_dist_f);
    gram_lmin.push_back(r.gram_lmin);
    gram_lmax.push_back(r.gram_lmax);
    max_grad.push_back(r.max_grad);
    ru_max.push_back(r.ru_max);
    du_max.push_back(r.du_max);
    rv_max.push_back(r.rv_max);
    dv_max.push_back(r.dv_max);
  }
  py::dict d;
  d["step"] = step;
  d["sup_loss"] = sup_loss;
  d["adv_term"] = adv_term;
  d["pred_err"] = pred_err;
  d["max_neuron_dist"] = max_neuron_dist;
  d["u_dist_f"] = u_dist_f;
  d["v_dist_f"] = v_dist_f;
  d["gram_lmin"] = gram_lmin;
  d["gram_lmax"] = gram_lmax;
  d["max_grad"] = max_grad;
  d["ru_max"] = ru_max;
  d["du_max"] = du_max;
  d["rv_max"] = rv_max;
  d["dv_max"] = dv_max;
  d["steps_run"] = log.steps_run;
  d["stopped_stationary"] = log.stopped_stationary;
  return d;
}

}  // namespace

PYBIND11_MODULE(_prdlab, mod) {
  mod.doc() = "Two-layer ReLU training as a reaction-diffusion process: data, "
              "networks, kernel spectra, bounds, and PDE pattern simulators.";

  py::class_<Dataset>(mod, "Dataset")
      .def_readonly("d_in", &Dataset::d_in)
      .def_readonly("d_out", &Dataset::d_out)
      .def_readonly("provenance", &Dataset::provenance)
      .def_property_readonly("n_train", [](const Dataset& d) { return d.train.size(); })
      .def_property_readonly("n_test", [](const Dataset& d) { return d.test.size(); })
      .def("train_arrays",
           [](const Dataset& d) {
             Batch b = to_batch(d.train);
             return py::make_tuple(b.X, b.Y);
           })
      .def("test_arrays", [](const Dataset& d) {
        Batch b = to_batch(d.test);
        return py::make_tuple(b.X, b.Y);
      });

  mod.def(
      "generate_dataset",
      [](long n_total, long n_train, int d_in, int modes, int manifold_dim, double fill_value,
         std::uint64_t seed, bool scalar_labels, double center_box, bool normalize) {
        ManifoldSpec s;
        s.n_total = n_total;
        s.n_train = n_train;
        s.d_in = d_in;
        s.modes = modes;
        s.manifold_dim = manifold_dim;
        s.fill_value = fill_value;
        s.seed = seed;
        s.scalar_labels = scalar_labels;
        s.center_box = center_box;
        Dataset ds = generate_manifold_dataset(s);
        if (normalize) ds = normalize_unit(ds);
        return ds;
      },
      py::arg("n_total"), py::arg("n_train"), py::arg("d_in"), py::arg("modes"),
      py::arg("manifold_dim"), py::arg("fill_value") = 1.0, py::arg("seed") = 1,
      py::arg("scalar_labels") = false, py::arg("center_box") = 10.0,
      py::arg("normalize") = true);
  mod.def("load_idx", &load_idx, py::arg("images"), py::arg("labels"));

  py::class_<GeneratorNet>(mod, "GeneratorNet")
      .def_readwrite("U", &GeneratorNet::U)
      .def_readwrite("V", &GeneratorNet::V)
      .def_property_readonly("U0", [](const GeneratorNet& n) { return n.snapshot.U0; })
      .def_property_readonly("V0", [](const GeneratorNet& n) { return n.snapshot.V0; })
      .def_readonly("m", &GeneratorNet::m)
      .def_readonly("d_in", &GeneratorNet::d_in)
      .def_readonly("d_out", &GeneratorNet::d_out)
      .def_property_readonly("scale", &GeneratorNet::scale)
      .def("forward",
           [](const GeneratorNet& n, const Mat& X) { return forward_generator(n, X); },
           py::arg("X"))
      .def("save", &save_generator, py::arg("path"));

  py::class_<DiscriminatorNet>(mod, "DiscriminatorNet")
      .def_readwrite("W", &DiscriminatorNet::W)
      .def_readwrite("a", &DiscriminatorNet::a)
      .def_readonly("m", &DiscriminatorNet::m)
      .def_readonly("L", &DiscriminatorNet::L)
      .def("forward", &forward_discriminator, py::arg("y"));

  mod.def(
      "init_generator",
      [](int m, int d_in, int d_out, const std::string& init, std::uint64_t seed) {
        SeededRng rng(seed);
        return init_generator(m, d_in, d_out, parse_init(init), rng);
      },
      py::arg("m"), py::arg("d_in"), py::arg("d_out"), py::arg("init") = "theory",
      py::arg("seed") = 1);
  mod.def("load_generator", &load_generator, py::arg("path"));
  mod.def(
      "init_discriminator",
      [](int m, int d_out, double L, std::uint64_t seed) {
        SeededRng rng(seed);
        return init_discriminator(m, d_out, L, rng);
      },
      py::arg("m"), py::arg("d_out"), py::arg("L") = 0.01, py::arg("seed") = 1);

  mod.def(
      "supervised_loss",
      [](const GeneratorNet& net, const Mat& X, const Mat& Y) {
        return supervised_loss(net, X, Y);
      },
      py::arg("net"), py::arg("X"), py::arg("Y"));
  mod.def(
      "adversarial_term",
      [](const GeneratorNet& net, const DiscriminatorNet& disc, const Mat& X) {
        return adversarial_term(net, disc, X);
      },
      py::arg("net"), py::arg("critic"), py::arg("X"));

  mod.def(
      "train",
      [](const Dataset& ds, GeneratorNet& net, DiscriminatorNet* critic, const std::string& mode,
         double learning_rate, double critic_learning_rate, double momentum, long batch_size,
         long epochs, double epsilon_stationary, int disc_steps, double L, double gp_coeff,
         std::uint64_t seed, long log_every, bool train_output_layer, long gram_every,
         long rd_every) {
        TrainConfig c;
        c.mode = parse_train_mode(mode);
        c.learning_rate = learning_rate;
        c.critic_learning_rate = critic_learning_rate;
        c.momentum = momentum;
        c.batch_size = batch_size;
        c.max_epochs = epochs;
        c.epsilon_stationary = epsilon_stationary;
        c.disc_steps_per_gen_step = disc_steps;
        c.L = L;
        c.gp_coeff = gp_coeff;
        c.seed = seed;
        c.log_every = log_every;
        c.train_output_layer = train_output_layer;
        c.gram_every = gram_every;
        c.rd_every = rd_every;
        return log_to_dict(run_training(c, ds, net, critic));
      },
      py::arg("dataset"), py::arg("net"), py::arg("critic") = nullptr, py::arg("mode") = "sup",
      py::arg("learning_rate") = 1e-2, py::arg("critic_learning_rate") = 0.0,
      py::arg("momentum") = 0.9, py::arg("batch_size") = 0, py::arg("epochs") = 1,
      py::arg("epsilon_stationary") = 0.0, py::arg("disc_steps") = 1, py::arg("L") = 0.01,
      py::arg("gp_coeff") = 0.0, py::arg("seed") = 1, py::arg("log_every") = 1,
      py::arg("train_output_layer") = true, py::arg("gram_every") = 0, py::arg("rd_every") = 0);

  mod.def(
      "is_epsilon_stationary",
      [](const GeneratorNet& net, const DiscriminatorNet* disc, const Mat& X, const Mat& Y,
         const std::string& mode, double epsilon) {
        GradientMode g = parse_train_mode(mode) == TrainMode::adversarial
                             ? GradientMode::augmented
                             : GradientMode::supervised;
        StationarityCheck c = is_epsilon_stationary(net, disc, X, Y, g, epsilon);
        return py::make_tuple(c.stationary, c.max_abs_grad);
      },
      py::arg("net"), py::arg("critic"), py::arg("X"), py::arg("Y"), py::arg("mode"),
      py::arg("epsilon"));
  mod.def(
      "reaction_diffusion_terms",
      [](const GeneratorNet& net, const DiscriminatorNet& disc, const Mat& X, const Mat& Y) {
        RDTerms t = reaction_diffusion_terms(net, disc, X, Y);
        py::dict d;
        d["R_u"] = t.R_u;
        d["D_u"] = t.D_u;
        d["R_v"] = t.R_v;
        d["D_v"] = t.D_v;
        return d;
      },
      py::arg("net"), py::arg("critic"), py::arg("X"), py::arg("Y"));
  mod.def("dynamics_residual", &dynamics_residual, py::arg("net"), py::arg("critic"),
          py::arg("X"), py::arg("Y"), py::arg("eta"), py::arg("with_adversary") = true);

  mod.def(
      "gram_infinity",
      [](const Mat& X, long mc_samples, std::uint64_t seed) {
        SeededRng rng(seed);
        return gram_infinity(X, mc_samples, rng);
      },
      py::arg("X"), py::arg("mc_samples"), py::arg("seed") = 7);
  mod.def("gram_at", [](const Mat& U, const Mat& X) { return gram_at(U, X); }, py::arg("U"),
          py::arg("X"));
  mod.def(
      "spectral_extremes",
      [](const Mat& M, double tol, int max_iters) {
        Spectrum s = spectral_extremes(M, tol, max_iters);
        return py::make_tuple(s.lambda_min, s.lambda_max, s.iterations_used);
      },
      py::arg("M"), py::arg("tol") = 1e-8, py::arg("max_iters") = 10000);
  mod.def(
      "gram_stability_report",
      [](const GeneratorNet& net_t, const GeneratorNet& net_0, const Mat& X, double lambda0,
         double lambda1_inf) {
        GramReport g = gram_stability_report(net_t, net_0, X, lambda0, lambda1_inf);
        py::dict d;
        d["lambda0_hat"] = g.lambda0_hat;
        d["kappa_hat"] = g.kappa_hat;
        d["drift_norm"] = g.drift_norm;
        d["H0_lambda_min"] = g.H0_spectrum.lambda_min;
        d["H0_lambda_max"] = g.H0_spectrum.lambda_max;
        d["Ht_lambda_min"] = g.Ht_spectrum.lambda_min;
        d["Ht_lambda_max"] = g.Ht_spectrum.lambda_max;
        d["lmin_floor_violated"] = g.lmin_floor_violated;
        d["lmax_ceiling_violated"] = g.lmax_ceiling_violated;
        return d;
      },
      py::arg("net_t"), py::arg("net_0"), py::arg("X"), py::arg("lambda0"),
      py::arg("lambda1_inf"));
  mod.def(
      "compute_constants",
      [](long n, long m, long d_in, double lambda0, double lambda1_inf, double L, double delta,
         double epsilon, double z0_err) {
        ConstantsReport c =
            compute_constants(n, m, d_in, lambda0, lambda1_inf, L, delta, epsilon, z0_err);
        py::dict d;
        d["mu"] = c.mu;
        d["kappa"] = c.kappa;
        d["lambda1"] = c.lambda1;
        d["zeta"] = c.zeta;
        d["hoeffding_bound"] = c.hoeffding_bound;
        d["L_max"] = c.L_max;
        d["T0"] = c.T0;
        d["T0_valid"] = c.T0_valid;
        d["T0_failure"] = c.T0_failure;
        d["m_min_adversarial"] = c.m_min_adversarial;
        d["m_min_supervised"] = c.m_min_supervised;
        return d;
      },
      py::arg("n"), py::arg("m"), py::arg("d_in"), py::arg("lambda0"), py::arg("lambda1_inf"),
      py::arg("L"), py::arg("delta"), py::arg("epsilon"), py::arg("z0_err"));
  mod.def("prediction_error_envelope", &prediction_error_envelope, py::arg("t"),
          py::arg("z0_err"), py::arg("kappa"), py::arg("mu"), py::arg("lambda0"));
  mod.def("bde_compare", &bde_compare, py::arg("lambda0"), py::arg("lambda1"), py::arg("mu"),
          py::arg("psi0"), py::arg("t_end"), py::arg("steps"));
  mod.def(
      "supervised_distance_bounds",
      [](long n, long m, double lambda0, double delta, double z0_err) {
        DistanceBounds b = supervised_distance_bounds(n, m, lambda0, delta, z0_err);
        return py::make_tuple(b.per_neuron, b.frobenius);
      },
      py::arg("n"), py::arg("m"), py::arg("lambda0"), py::arg("delta"), py::arg("z0_err"));
  mod.def(
      "adversarial_distance_bounds",
      [](long n, long m, double lambda0, double delta, double z0_err, double mu, double kappa,
         double t) {
        DistanceBounds b = adversarial_distance_bounds(n, m, lambda0, delta, z0_err, mu, kappa, t);
        return py::make_tuple(b.per_neuron, b.frobenius);
      },
      py::arg("n"), py::arg("m"), py::arg("lambda0"), py::arg("delta"), py::arg("z0_err"),
      py::arg("mu"), py::arg("kappa"), py::arg("t"));
  mod.def(
      "rd_scale_magnitudes",
      [](long n, long m, long d_in, long d_out) {
        RdScales s = rd_scale_magnitudes(n, m, d_in, d_out);
        py::dict d;
        d["r_u"] = s.r_u;
        d["d_u"] = s.d_u;
        d["r_v"] = s.r_v;
        d["d_v"] = s.d_v;
        return d;
      },
      py::arg("n"), py::arg("m"), py::arg("d_in"), py::arg("d_out"));

  py::class_<TuringParams>(mod, "TuringParams")
      .def(py::init<>())
      .def_readwrite("a", &TuringParams::a)
      .def_readwrite("b", &TuringParams::b)
      .def_readwrite("c", &TuringParams::c)
      .def_readwrite("d", &TuringParams::d)
      .def_readwrite("h", &TuringParams::h)
      .def_readwrite("k", &TuringParams::k)
      .def_readwrite("mu", &TuringParams::mu)
      .def_readwrite("nu", &TuringParams::nu)
      .def_readwrite("dt", &TuringParams::dt)
      .def_readwrite("dx", &TuringParams::dx);
  py::class_<GrayScottParams>(mod, "GrayScottParams")
      .def(py::init<>())
      .def_readwrite("F", &GrayScottParams::F)
      .def_readwrite("k", &GrayScottParams::k)
      .def_readwrite("mu", &GrayScottParams::mu)
      .def_readwrite("nu", &GrayScottParams::nu)
      .def_readwrite("dt", &GrayScottParams::dt)
      .def_readwrite("dx", &GrayScottParams::dx);
  py::class_<RDGrid>(mod, "RDGrid")
      .def_readonly("height", &RDGrid::height)
      .def_readonly("width", &RDGrid::width)
      .def_readwrite("u", &RDGrid::u)
      .def_readwrite("v", &RDGrid::v)
      .def_readonly("time", &RDGrid::time);
  mod.def(
      "init_turing",
      [](int height, int width, double h, double k, double amplitude, std::uint64_t seed) {
        SeededRng rng(seed);
        return init_turing(height, width, h, k, amplitude, rng);
      },
      py::arg("height"), py::arg("width"), py::arg("h") = 1.0, py::arg("k") = 1.0,
      py::arg("amplitude") = 0.03, py::arg("seed") = 1);
  mod.def("init_grayscott", &init_grayscott, py::arg("height"), py::arg("width"),
          py::arg("patch") = 25);
  mod.def("step_turing", &step_turing, py::arg("grid"), py::arg("params"));
  mod.def("step_grayscott", &step_grayscott, py::arg("grid"), py::arg("params"));
  mod.def(
      "spatial_stats",
      [](const RDGrid& g) {
        SpatialStats s = spatial_stats(g);
        py::dict d;
        d["var_u"] = s.var_u;
        d["var_v"] = s.var_v;
        d["min"] = s.min;
        d["max"] = s.max;
        return d;
      },
      py::arg("grid"));
  mod.def(
      "run_rd",
      [](const RDGrid& grid, const std::string& model, const TuringParams& turing,
         const GrayScottParams& grayscott, long steps, long snapshot_every) {
        RDRunParams p;
        if (model == "turing")
          p.model = RDModel::turing;
        else if (model == "gs")
          p.model = RDModel::grayscott;
        else
          throw std::invalid_argument("model must be 'turing' or 'gs'");
        p.turing = turing;
        p.grayscott = grayscott;
        RDRunResult r = run_rd(grid, p, steps, snapshot_every);
        py::list stats;
        for (const auto& row : r.stats) {
          py::dict sd;
          sd["step"] = row.step;
          sd["time"] = row.time;
          sd["var_u"] = row.stats.var_u;
          sd["var_v"] = row.stats.var_v;
          sd["min"] = row.stats.min;
          sd["max"] = row.stats.max;
          stats.append(sd);
        }
        py::dict d;
        d["snapshot_steps"] = r.snapshot_steps;
        d["u"] = r.snapshots_u;
        d["v"] = r.snapshots_v;
        d["stats"] = stats;
        return d;
      },
      py::arg("grid"), py::arg("model"), py::arg("turing") = TuringParams{},
      py::arg("grayscott") = GrayScottParams{}, py::arg("steps") = 1000,
      py::arg("snapshot_every") = 100);

  mod.def("neuron_variances", &neuron_variances, py::arg("U"));
  mod.def(
      "maximize_excitation",
      [](const Vec& u, const Vec& x0, double epsilon, double step_size, int iterations) {
        AscentConfig c;
        c.epsilon = epsilon;
        c.step_size = step_size;
        c.iterations = iterations;
        AscentResult r = maximize_excitation(u, x0, c);
        return py::make_tuple(r.delta, r.dead_within_ball);
      },
      py::arg("u"), py::arg("x0"), py::arg("epsilon") = 0.007, py::arg("step_size") = 0.1,
      py::arg("iterations") = 100);
}
