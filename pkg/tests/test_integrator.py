import math
import os

import numpy as np
import pytest

from fractw import (InsufficientData, IntegrateOptions, ReferenceMarcher,
                    Termination, blowdown_diagnostic, init_segment, integrate,
                    positive_root_left, step_heun)
from fractw import _core_py
from fractw._backend import BACKEND


def test_init_segment_seed(cfg09):
    st = init_segment(cfg09, 0.5, epsilon=1e-4)
    assert st.phi == pytest.approx(cfg09.phi_minus - 1e-4)
    assert st.psi == pytest.approx(-1e-4 * st.lam)
    assert st.xi_start == pytest.approx(math.log(1e-4) / st.lam)
    # halving epsilon shifts the start left by ln 2 / lam
    st2 = init_segment(cfg09, 0.5, epsilon=5e-5)
    assert st.xi_start - st2.xi_start == pytest.approx(math.log(2.0) / st.lam)


def test_init_segment_lambda_tau_zero(cfg09):
    lam = positive_root_left(0.0, 1.0, cfg09.h_prime_minus, cfg09.alpha)
    assert lam == pytest.approx(cfg09.h_prime_minus ** (1.0 / cfg09.alpha))


def test_equilibrium_is_fixed_point(cfg09):
    """10^4 Heun steps starting exactly at (phi_-, 0) stay there."""
    from fractw.fracderiv import TailSpec
    from fractw.quadweights import product_weights
    from fractw.fracderiv import FracParams
    from fractw import _backend

    n = 10000
    fp = FracParams.for_order(cfg09.alpha)
    beta = 1.0 - cfg09.alpha
    body, edge, newest = product_weights(beta, n)
    kq = fp.d_alpha / beta * 0.01 ** (beta + 1.0)
    zeros = np.zeros(n + 1)
    pow_arr = fp.d_alpha / beta * (0.01 * np.arange(n + 1)) ** beta
    phi, psi, pp, dal, status = _backend.march(
        cfg09.phi_minus, 0.0, 0.5, 0.01, n, False, cfg09.c, cfg09.phi_minus,
        0.0, 0.0, 0.0, 0.0, 0.0, 0.0, zeros, pow_arr, body, edge,
        kq * newest, kq, -10.0)
    assert status == 0
    assert np.max(np.abs(phi - cfg09.phi_minus)) <= 1e-12
    assert np.max(np.abs(psi)) <= 1e-12


def test_first_step_decreases_phi(cfg09):
    ref = ReferenceMarcher(cfg09, 0.5, 0.01, n_hint=8)
    phi0 = ref.phi[0]
    step_heun(ref, 0.01)
    assert ref.phi[1] < phi0


def test_step_heun_rejects_mismatched_dx(cfg09):
    ref = ReferenceMarcher(cfg09, 0.5, 0.01, n_hint=8)
    with pytest.raises(ValueError):
        step_heun(ref, 0.02)


def test_reference_marcher_matches_core(cfg09):
    """Readable per-step path and the batched core agree to rounding."""
    opts = IntegrateOptions(dx=0.02, length=5.0)
    traj = integrate(cfg09, 0.5, opts)
    ref = ReferenceMarcher(cfg09, 0.5, 0.02, n_hint=300)
    for _ in range(len(traj.phi_samples) - 1):
        ref.step()
    assert np.max(np.abs(np.array(ref.phi) - traj.phi_samples)) < 1e-12
    assert np.max(np.abs(np.array(ref.dal) - traj.dalpha_samples)) < 1e-12


@pytest.mark.skipif(BACKEND != "cython", reason="compiled core unavailable")
def test_backend_parity(cfg09, monkeypatch):
    """Cython and numpy cores agree on a full classical trajectory."""
    opts = IntegrateOptions(dx=0.02, length=60.0)
    traj_c = integrate(cfg09, 0.5, opts)

    opts_w = IntegrateOptions(dx=0.02, length=60.0, memory_window=20.0)
    traj_cw = integrate(cfg09, 0.5, opts_w)

    import fractw.integrator as integ
    monkeypatch.setattr(integ._backend, "march", _core_py.march)
    traj_p = integrate(cfg09, 0.5, opts)
    assert traj_c.terminated == traj_p.terminated
    assert np.max(np.abs(traj_c.phi_samples - traj_p.phi_samples)) < 1e-11
    traj_pw = integrate(cfg09, 0.5, opts_w)
    assert np.max(np.abs(traj_cw.phi_samples - traj_pw.phi_samples)) < 1e-11


def test_richardson_convergence_order(cfg09):
    """Endpoint value converges at order >= 1.8 under dx halving."""
    vals = []
    for dx in (0.04, 0.02, 0.01):
        traj = integrate(cfg09, 0.5, IntegrateOptions(dx=dx, length=40.0))
        vals.append(traj.phi_samples[-1])
    e1, e2 = abs(vals[0] - vals[1]), abs(vals[1] - vals[2])
    order = math.log2(e1 / e2)
    assert order >= 1.8


def test_phi_below_phi_minus(cfg09, classical_run, blowdown_run):
    for traj in (classical_run, blowdown_run):
        assert np.all(traj.phi_samples < traj.cfg.phi_minus)


def test_energy_residual_classical(classical_run):
    # |Delta H| < 1 on this run, so the tolerance scale max(1, |Delta H|) is 1
    assert np.max(np.abs(classical_run.energy_residuals)) <= 1e-3


def test_blowdown_termination_and_fit(blowdown_run):
    assert blowdown_run.terminated is Termination.BLOW_DOWN
    fit = blowdown_diagnostic(blowdown_run)
    assert fit.xi_star > float(blowdown_run.xi[-1])
    assert fit.c_fit > 0
    assert fit.n_points >= 10


def test_blowdown_fit_residual_shrinks_near_pole(blowdown_run):
    """The pole law sharpens approaching xi*: refit on the deeper half."""
    shallow = blowdown_diagnostic(blowdown_run, depth_fraction=0.1)
    deep = blowdown_diagnostic(blowdown_run, depth_fraction=0.3)
    assert deep.rms_residual < shallow.rms_residual


def test_blowdown_fit_requires_blowdown(classical_run):
    with pytest.raises(ValueError):
        blowdown_diagnostic(classical_run)


def test_blowdown_insufficient_data(cfg09):
    # the pole crosses the whole decade [-200, -2000] in a handful of nodes
    traj = integrate(cfg09, 50.0, IntegrateOptions(dx=0.01, length=500.0,
                                                   blowdown_floor=-2000.0))
    assert traj.terminated is Termination.BLOW_DOWN
    with pytest.raises(InsufficientData):
        blowdown_diagnostic(traj)


def test_nan_policy_numerical_failure(cfg09):
    """Without the floor, the cubic overflows and the run aborts as a failure."""
    traj = integrate(cfg09, 50.0, IntegrateOptions(dx=0.01, length=500.0,
                                                   blowdown_floor=-1e300))
    assert traj.terminated is Termination.NUMERICAL_FAILURE
    assert np.all(np.isfinite(traj.phi_samples))


def test_trajectory_csv_roundtrip(tmp_path, classical_run):
    path = os.path.join(tmp_path, "traj.csv")
    classical_run.write_csv(path)
    with open(path) as fh:
        header = fh.readline()
        columns = fh.readline().strip().split(",")
    assert header.startswith("# fractw trajectory")
    assert "alpha=0.9" in header
    assert columns == ["xi", "phi", "psi", "dalpha", "h", "energy_residual"]
    data = np.loadtxt(path, delimiter=",", skiprows=2)
    assert data.shape == (len(classical_run.phi_samples), 6)
    assert np.allclose(data[:, 1], classical_run.phi_samples, rtol=0, atol=0)


def test_csv_deterministic(tmp_path, cfg09):
    opts = IntegrateOptions(dx=0.05, length=30.0)
    p1 = os.path.join(tmp_path, "a.csv")
    p2 = os.path.join(tmp_path, "b.csv")
    integrate(cfg09, 0.5, opts).write_csv(p1)
    integrate(cfg09, 0.5, opts).write_csv(p2)
    assert open(p1, "rb").read() == open(p2, "rb").read()


def test_modified_flux_trajectory_stays_bounded(cfg09):
    """The positive cap removes blow-down: tau=50 converges to phi_c instead."""
    opts = IntegrateOptions(dx=0.02, length=300.0)
    traj = integrate(cfg09, 50.0, opts, flux_variant="modified")
    assert traj.terminated is Termination.REACHED_XI_MAX
    assert traj.phi_samples[-1] > traj.modified.phi_bar


def test_memory_window_accelerator(cfg09):
    """Windowed memory tracks the full quadrature and is off by default."""
    full = integrate(cfg09, 0.5, IntegrateOptions(dx=0.02, length=120.0))
    windowed = integrate(cfg09, 0.5, IntegrateOptions(dx=0.02, length=120.0,
                                                      memory_window=30.0))
    assert len(full.phi_samples) == len(windowed.phi_samples)
    sup = float(np.max(np.abs(full.phi_samples - windowed.phi_samples)))
    assert 0.0 < sup <= 5e-3      # approximation, not an exact path
    # the default protocol is unaffected by the accelerator's existence
    again = integrate(cfg09, 0.5, IntegrateOptions(dx=0.02, length=120.0))
    assert np.array_equal(full.phi_samples, again.phi_samples)


def test_memory_window_too_small(cfg09):
    with pytest.raises(ValueError):
        integrate(cfg09, 0.5, IntegrateOptions(dx=0.02, length=60.0,
                                               memory_window=0.1))


def test_initial_segment_decreasing(classical_run, blowdown_run):
    """phi' < 0 from the seed up to the first turning point."""
    for traj in (classical_run, blowdown_run):
        imin = int(np.argmin(traj.phi_samples))
        assert imin > 0
        assert np.all(traj.psi_samples[1:imin] < 0.0)


def test_energy_residual_blowdown_shallow_region(blowdown_run, cfg09):
    """The identity holds up to phi > floor/10 even on blow-down runs."""
    from fractw import potential_H
    mask = blowdown_run.phi_samples > blowdown_run.options.blowdown_floor / 10.0
    gap = np.abs(potential_H(blowdown_run.phi_samples, cfg09)
                 - potential_H(cfg09.phi_minus, cfg09))
    norm = np.abs(blowdown_run.energy_residuals) / np.maximum(1.0, gap)
    assert norm[mask].max() <= 1e-3


def test_memory_within_interpolation_bound(classical_run, blowdown_run):
    assert classical_run.memory_within_bound()
    assert blowdown_run.memory_within_bound()
