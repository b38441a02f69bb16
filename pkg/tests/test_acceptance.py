"""End-to-end acceptance battery.

Each test function is one headline requirement; `pytest -v` therefore
prints one pass/fail line per requirement. The heavy propagation runs
live in session fixtures (see conftest) so the suite builds them once.
"""

import math

import numpy as np
import pytest

from duodyn.analysis import (bound_flat_l2, bound_gradient_free,
                             initial_slope, l2_error_series, rate_fit)
from duodyn.factorized import (assemble_trajectory, propagate_bruteforce,
                               propagate_meanfield)
from duodyn.model import Coupling, ModelSpec, Potential1D, initial_product
from duodyn.numerics import make_grid, moment
from duodyn.reference import PropagationConfig, propagate_reference
from duodyn.semiclassical import Variant, make_wavepacket, propagate_u2

from conftest import (BATTERY_GRID_X, BATTERY_GRID_Y, SWEEP_EPSILONS,
                      product_state_2d)
from oracles import continuous_sqrt, gaussian_parameter_flow, gaussian_profile

PRESET_ORDER = ("blue", "red", "grey", "yellow")


def test_blue_meanfield_headline_error_and_runtime(blue_headline):
    final_err = float(blue_headline.err_mf[-1])
    assert 5e-4 <= final_err <= 2e-3, f"final error {final_err:.3e}"
    assert blue_headline.elapsed < 300.0, \
        f"run took {blue_headline.elapsed:.1f} s"


def test_variant_error_ordering_at_final_time(battery):
    finals = {name: float(battery[name].err_mf[-1])
              for name in PRESET_ORDER}
    assert finals["grey"] > finals["blue"] > finals["yellow"], finals
    ratio = finals["red"] / finals["blue"]
    assert 0.35 <= ratio <= 0.65, f"red/blue = {ratio:.3f} ({finals})"


def test_bound_dominance_and_initial_slope(battery):
    slack = 1e-12
    for name in PRESET_ORDER:
        run = battery[name]
        times = run.ref.times
        for kind, states, err in (("bruteforce", run.bf, run.err_bf),
                                  ("meanfield", run.mf, run.err_mf)):
            for path in ("grad_y", "grad_x_grad_y", "weighted"):
                series = bound_flat_l2(kind, path, states, run.spec)
                assert np.all(series >= err - slack), \
                    f"{name}/{kind}/{path} dips below the measured error"
            gf = bound_gradient_free(states, run.spec, kind=kind,
                                     collocation=run.collocation)
            assert np.all(gf >= err - slack), \
                f"{name}/{kind}/gradient_free dips below the measured error"
            bound_slope = initial_slope(times, gf)
            err_slope = initial_slope(times, err)
            ratio = bound_slope / err_slope
            assert 0.7 <= ratio <= 1.3, \
                f"{name}/{kind} slope ratio {ratio:.3f}"


def test_conservation_suite(battery):
    for name in PRESET_ORDER:
        run = battery[name]
        n_steps = run.config.n_steps
        norm_budget = 1e-10 * (n_steps / 1000.0)
        assert np.max(np.abs(run.ref.norms - 1.0)) < norm_budget, name

        e_ref = run.ref.energies
        assert np.max(np.abs(e_ref - e_ref[0])) < 1e-8 * abs(e_ref[0]), name

        e0 = e_ref[0]  # <psi0, H psi0> of the shared initial product
        assert abs(run.energy_mf[0] - e0) < 1e-10 * abs(e0), name
        assert np.max(np.abs(run.energy_mf - e0)) < 1e-6 * abs(e0), name

        e_bf = run.energy_bf
        assert np.max(np.abs(e_bf - e_bf[0])) < 1e-8 * abs(e_bf[0]), name

    # the mean-field energy deviation shrinks at second order in dt
    run = battery["blue"]
    gx = make_grid(*BATTERY_GRID_X)
    gy = make_grid(*BATTERY_GRID_Y)
    t1 = run.preset.t1
    drifts, dts = [], []
    for n in (400, 800, 1600):
        cfg = PropagationConfig(dt=t1 / n, t_final=t1, sample_every=n // 20)
        states = propagate_meanfield(run.spec, (run.phix0, run.phiy0), cfg)
        from duodyn.factorized import meanfield_energy
        energies = np.asarray([meanfield_energy(run.spec, s)
                               for s in states])
        drifts.append(np.max(np.abs(energies - energies[0]))
                      / abs(energies[0]))
        dts.append(t1 / n)
    slope = np.polyfit(np.log(dts), np.log(drifts), 1)[0]
    assert 1.8 < slope < 2.2, f"energy dt-order {slope:.3f}"


def test_zero_coupling_exactness_floor(battery):
    blue = battery["blue"]
    spec = ModelSpec(v1=blue.spec.v1, v2=blue.spec.v2,
                     coupling=Coupling.none(), epsilon=blue.spec.epsilon,
                     mass1=blue.spec.mass1, mass2=blue.spec.mass2)
    gx = make_grid(*BATTERY_GRID_X)
    gy = make_grid(*BATTERY_GRID_Y)
    phix0, phiy0 = initial_product(spec, gx, gy)
    cfg = blue.config
    ref = propagate_reference(spec, product_state_2d(phix0, phiy0), cfg)
    bf = assemble_trajectory(
        propagate_bruteforce(spec, (phix0, phiy0), cfg,
                             collocation=(0.0, 0.0)))
    mf = assemble_trajectory(propagate_meanfield(spec, (phix0, phiy0), cfg))
    assert np.max(l2_error_series(ref, bf)) < 1e-7
    assert np.max(l2_error_series(ref, mf)) < 1e-7


def test_reference_matches_dense_oracle_and_dt_order(blue_eigh_64):
    fx = blue_eigh_64
    t1 = fx.preset.t1
    cfg = PropagationConfig(dt=t1 / 3200, t_final=t1, sample_every=400)
    traj = propagate_reference(fx.spec, fx.psi0, cfg)
    for t, wf in zip(traj.times, traj.states):
        exact = fx.oracle.at(fx.psi0, t)
        d = wf.values - exact.values
        err = math.sqrt(float(np.sum(np.abs(d) ** 2)) * wf.cell)
        assert err < 1e-6, f"t = {t:.2f}: {err:.3e}"

    errs, dts = [], []
    for n in (800, 1600, 3200):
        run = propagate_reference(
            fx.spec, fx.psi0,
            PropagationConfig(dt=t1 / n, t_final=t1, sample_every=n))
        exact = fx.oracle.at(fx.psi0, t1)
        d = run.states[-1].values - exact.values
        errs.append(math.sqrt(float(np.sum(np.abs(d) ** 2)) * exact.cell))
        dts.append(t1 / n)
    slope = np.polyfit(np.log(dts), np.log(errs), 1)[0]
    assert 1.8 < slope < 2.2, f"dt-order {slope:.3f}"


def test_semiclassical_norm_error_rate(semiclassical_sweep):
    free_errs = [float(p.err[-1]) for p in semiclassical_sweep.free]
    slope, _ = rate_fit(SWEEP_EPSILONS, free_errs)
    assert 0.4 <= slope <= 0.6, f"slope {slope:.3f} ({free_errs})"

    # Calibrate the constant on the coarsest grid point, then demand the
    # bound keeps holding as epsilon shrinks.  The scale has a valley at
    # eps = eta, so this rules out any error component that fails to decay
    # along the sweep.
    eta = semiclassical_sweep.eta
    coupled = {p.epsilon: float(p.err[-1])
               for p in semiclassical_sweep.coupled}
    anchor = max(coupled)
    scale = lambda eps: math.sqrt(eps) + eta / math.sqrt(eps)
    c = coupled[anchor] / scale(anchor)
    for eps, err in coupled.items():
        assert err <= c * scale(eps) * (1.0 + 1e-9), \
            f"eps={eps}: {err:.3e} > {c * scale(eps):.3e}"


def test_semiclassical_observable_rate(semiclassical_sweep):
    obs_errs = [float(p.obs_err[-1]) for p in semiclassical_sweep.free]
    slope, _ = rate_fit(SWEEP_EPSILONS, obs_errs)
    assert 0.85 <= slope <= 1.15, f"slope {slope:.3f} ({obs_errs})"


def test_gaussian_profile_closure():
    v2 = Potential1D.harmonic_quartic(1.0, 0.1)
    spec = ModelSpec(v1=Potential1D.harmonic(1.0), v2=v2,
                     coupling=Coupling.none(), epsilon=0.04)
    gx = make_grid(-8.0, 8.0, 64)
    gz = make_grid(-12.0, 12.0, 512)
    state0 = make_wavepacket(spec, gx, gz, q0=1.0, p0=0.0)
    cfg = PropagationConfig(dt=1e-4, t_final=1.0, sample_every=1000)
    samples = propagate_u2(spec, state0, cfg, Variant.TAYLOR)
    times = [s.t for s in samples]
    q, p, S, Q, P = gaussian_parameter_flow(v2, 1.0, 0.0, times)
    # the closure statement needs a genuinely varying curvature
    assert np.ptp(v2.d2(q)) > 0.1
    sqrtQ = continuous_sqrt(Q)
    for i, s in enumerate(samples):
        ref = gaussian_profile(gz.points, Q[i], P[i], sqrtQ[i])
        diff = math.sqrt(float(np.sum(np.abs(s.u2.values - ref) ** 2))
                         * gz.spacing)
        assert diff < 1e-6, f"t = {times[i]:.2f}: {diff:.3e}"
        assert abs(s.q - q[i]) < 1e-6
        assert abs(s.p - p[i]) < 1e-6
        assert abs(s.S - S[i]) < 1e-6


def test_free_spreading_moment_law():
    spec = ModelSpec(v1=Potential1D.harmonic(1.0), v2=Potential1D.zero(),
                     coupling=Coupling.none(), epsilon=0.25)
    gx = make_grid(-8.0, 8.0, 64)
    gz = make_grid(-12.0, 12.0, 256)
    state0 = make_wavepacket(spec, gx, gz, q0=0.0, p0=0.0)
    cfg = PropagationConfig(dt=1e-3, t_final=1.0, sample_every=100)
    for s in propagate_u2(spec, state0, cfg):
        expected = 0.5 * (1.0 + s.t**2)
        assert abs(moment(s.u2, 2) - expected) < 1e-6, f"t = {s.t:.2f}"
