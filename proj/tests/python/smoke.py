"""End-to-end smoke checks for the python module (no test framework needed)."""
import math
import os
import subprocess
import sys

import numpy as np

import prdlab


def approx(a, b, tol=1e-9):
    assert abs(a - b) <= tol, f"{a} != {b} (tol {tol})"


# --- dataset ---------------------------------------------------------------
ds = prdlab.generate_dataset(24, 16, 5, 4, 2, scalar_labels=True, seed=3)
X, Y = ds.train_arrays()
Xt, Yt = ds.test_arrays()
assert X.shape == (16, 5) and Y.shape == (16, 1)
assert Xt.shape == (8, 5)
assert ds.d_in == 5 and ds.d_out == 1 and ds.n_train == 16
np.testing.assert_allclose(np.linalg.norm(X, axis=1), 1.0, rtol=1e-12)

raw = prdlab.generate_dataset(24, 16, 5, 4, 2, scalar_labels=True, seed=3, normalize=False)
Xr, _ = raw.train_arrays()
assert np.linalg.norm(Xr, axis=1).max() > 1.5  # unnormalized coordinates are box-scale

# --- network forward/losses -------------------------------------------------
net = prdlab.init_generator(64, 5, 1, init="theory", seed=9)
assert net.U.shape == (64, 5) and net.V.shape == (1, 64)
approx(net.scale, 1.0 / math.sqrt(64))
Z = net.forward(X)
assert Z.shape == (16, 1)
# forward is scale * relu(X U^T) V^T
np.testing.assert_allclose(
    Z, net.scale * np.maximum(X @ net.U.T, 0.0) @ net.V.T, rtol=0, atol=1e-12)
loss = prdlab.supervised_loss(net, X, Y)
approx(loss, 0.5 * float(((Z - Y) ** 2).sum()), 1e-9)

critic = prdlab.init_discriminator(64, 1, L=0.01, seed=11)
assert critic.W.shape == (64, 1)
assert np.all(np.linalg.norm(critic.W, axis=1) <= 0.01 + 1e-12)
prdlab.adversarial_term(net, critic, X)  # runs and is finite
d = critic.forward(np.array([0.3]))
assert math.isfinite(d)

# --- training --------------------------------------------------------------
log = prdlab.train(ds, net, mode="sup", learning_rate=1e-2, momentum=0.0,
                   epochs=200, log_every=50)
assert log["steps_run"] == 200
assert log["sup_loss"][-1] < log["sup_loss"][0]
assert len(log["step"]) == 5  # 0, 50, 100, 150, and the final state

adv_net = prdlab.init_generator(64, 5, 1, seed=9)
adv_log = prdlab.train(ds, adv_net, critic, mode="adv", learning_rate=1e-2,
                       momentum=0.0, gp_coeff=1.0, epochs=50, log_every=25)
assert adv_log["steps_run"] == 50
assert all(math.isfinite(v) for v in adv_log["adv_term"])
assert adv_log["u_dist_f"][-1] > 0.0

stationary, max_grad = prdlab.is_epsilon_stationary(net, None, X, Y, "sup", 1e3)
assert stationary and max_grad < 1e3

# --- kernels and spectra -----------------------------------------------------
H = prdlab.gram_at(net.U, X)
np.testing.assert_allclose(H, H.T, atol=1e-12)
lmin, lmax, iters = prdlab.spectral_extremes(H, 1e-9, 100000)
ref = np.linalg.eigvalsh(H)
approx(lmin, ref[0], 1e-7)
approx(lmax, ref[-1], 1e-7)

Hmc = prdlab.gram_infinity(X, 200000, seed=7)
G = X @ X.T
theta = np.arccos(np.clip(G, -1.0, 1.0))
Hclosed = G * (np.pi - theta) / (2.0 * np.pi)  # arc-cosine kernel, unit inputs
assert np.abs(Hmc - Hclosed).max() < 5e-3
np.testing.assert_allclose(np.diag(Hmc), 0.5, atol=5e-3)

report = prdlab.gram_stability_report(net, net, X, lambda0=lmin, lambda1_inf=lmax)
approx(report["drift_norm"], 0.0, 1e-12)
assert not report["lmin_floor_violated"]

# --- constants and bounds -----------------------------------------------------
c = prdlab.compute_constants(n=16, m=64, d_in=5, lambda0=0.1, lambda1_inf=0.2,
                             L=0.001, delta=0.1, epsilon=0.1, z0_err=3.0)
assert c["T0_valid"] and c["T0"] > 0.0  # needs kappa*mu < epsilon < z0_err
approx(c["mu"], 0.001 * 16 * math.sqrt(2 * math.log(2 / 0.1)) / math.sqrt(64), 1e-12)
env0 = prdlab.prediction_error_envelope(0.0, 3.0, c["kappa"], c["mu"], 0.1)
approx(env0, 3.0, 1e-12)
assert prdlab.prediction_error_envelope(10.0, 3.0, c["kappa"], c["mu"], 0.1) < env0
assert prdlab.bde_compare(0.1, 2.2, c["mu"], 9.0, 10.0, 10000) < 1e-6
pn, fro = prdlab.supervised_distance_bounds(16, 64, 0.1, 0.1, 3.0)
assert 0 < pn < fro
pn_a, fro_a = prdlab.adversarial_distance_bounds(16, 64, 0.1, 0.1, 3.0, c["mu"],
                                                 c["kappa"], 5.0)
assert pn_a > pn and fro_a > fro  # drift adds on top of the supervised bound
scales = prdlab.rd_scale_magnitudes(16, 64, 5, 1)
approx(scales["r_u"], 16 * 5 * math.sqrt(1 / 64), 1e-9)
assert scales["d_u"] > scales["r_u"]

# --- reaction/diffusion decomposition ---------------------------------------
terms = prdlab.reaction_diffusion_terms(net, critic, X, Y)
assert terms["R_u"].shape == (64, 5) and terms["R_v"].shape == (1, 64)
r = prdlab.dynamics_residual(net, critic, X, Y, 1e-3)
assert math.isfinite(r) and r >= 0.0

# --- PDE simulators -----------------------------------------------------------
flat = prdlab.init_turing(16, 16, amplitude=0.0, seed=1)
tp = prdlab.TuringParams()
prdlab.step_turing(flat, tp)
np.testing.assert_allclose(flat.u, 1.0, atol=1e-12)  # amplitude 0 stays at rest

grid = prdlab.init_turing(16, 16, amplitude=0.03, seed=1)
out = prdlab.run_rd(grid, "turing", turing=tp, steps=50, snapshot_every=25)
assert out["snapshot_steps"] == [0, 25, 50]
assert out["u"][0].shape == (16, 16)
assert len(out["stats"]) == 3 and out["stats"][0]["var_u"] > 0.0

gs = prdlab.init_grayscott(32, 32, patch=8)
gout = prdlab.run_rd(gs, "gs", steps=100, snapshot_every=100)
s = prdlab.spatial_stats(grid)
assert s["max"] >= s["min"]
assert gout["stats"][-1]["max"] <= 2.0

# --- filter diagnostics --------------------------------------------------------
variances = prdlab.neuron_variances(net.U)
assert variances.shape == (64,)
np.testing.assert_allclose(variances[0], net.U[0].var(), rtol=1e-12)
delta, dead = prdlab.maximize_excitation(net.U[0], np.zeros(5), epsilon=0.05)
assert delta.shape == (5,) and not dead
assert np.abs(delta).max() <= 0.05 + 1e-12

# --- checkpoint round trip ------------------------------------------------------
import tempfile
with tempfile.TemporaryDirectory() as tmp:
    path = os.path.join(tmp, "ck.bin")
    net.save(path)
    back = prdlab.load_generator(path)
    np.testing.assert_array_equal(back.U, net.U)
    np.testing.assert_array_equal(back.U0, net.U0)

# --- CLI is runnable (path provided by the test harness) -------------------------
cli = os.environ.get("PRDLAB_CLI")
if cli:
    rc = subprocess.run([cli, "--help"], capture_output=True)
    assert rc.returncode == 0
    assert b"simulate" in rc.stdout

print("smoke: ok")
