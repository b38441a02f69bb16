"""Shared fixtures: the expensive propagation batteries are session-scoped
so the acceptance tests and the property tests reuse one computation."""

from __future__ import annotations

import time
from types import SimpleNamespace

import numpy as np
import pytest

from duodyn.analysis import (QuadraticObservable, l2_error_series,
                             observable_error_series)
from duodyn.factorized import (assemble_trajectory, bruteforce_energy,
                               meanfield_energy, pick_collocation,
                               propagate_bruteforce, propagate_meanfield)
from duodyn.model import (Coupling, ModelSpec, Potential1D, WavePacket,
                          initial_product, preset, preset_names)
from duodyn.numerics import WaveFunction2D, make_grid
from duodyn.reference import PropagationConfig, propagate_reference
from duodyn.semiclassical import (Variant, assemble_semiclassical_trajectory,
                                  make_wavepacket, propagate_wavepacket)


def product_state_2d(phix, phiy) -> WaveFunction2D:
    return WaveFunction2D(phix.grid, phiy.grid,
                          np.outer(phix.values, phiy.values))


# Reduced battery resolution: the measured factorization errors are a few
# 1e-4 while the spatial discretization error sits many orders below, so
# (64, 256) reproduces the full-resolution error curves.
BATTERY_GRID_X = (-1.5, 2.5, 64)
BATTERY_GRID_Y = (-12.0, 12.0, 256)


@pytest.fixture(scope="session")
def battery():
    """All four presets over their full default window at (64, 256)."""
    runs = {}
    for name in preset_names():
        pre = preset(name)
        spec = pre.model
        gx = make_grid(*BATTERY_GRID_X)
        gy = make_grid(*BATTERY_GRID_Y)
        cfg = pre.config
        phix0, phiy0 = initial_product(spec, gx, gy)
        ref = propagate_reference(spec, product_state_2d(phix0, phiy0), cfg)
        colloc = pick_collocation(spec, gx, gy)
        bf = propagate_bruteforce(spec, (phix0, phiy0), cfg,
                                  collocation=colloc)
        mf = propagate_meanfield(spec, (phix0, phiy0), cfg)
        bf_traj = assemble_trajectory(bf)
        mf_traj = assemble_trajectory(mf)
        runs[name] = SimpleNamespace(
            preset=pre, spec=spec, config=cfg, collocation=colloc,
            phix0=phix0, phiy0=phiy0, ref=ref, bf=bf, mf=mf,
            bf_traj=bf_traj, mf_traj=mf_traj,
            err_bf=l2_error_series(ref, bf_traj),
            err_mf=l2_error_series(ref, mf_traj),
            energy_bf=np.asarray([bruteforce_energy(spec, s, colloc)
                                  for s in bf]),
            energy_mf=np.asarray([meanfield_energy(spec, s) for s in mf]))
    return runs


@pytest.fixture(scope="session")
def blue_headline():
    """Blue preset at the full (128, 1024) resolution, with wall times."""
    pre = preset("blue")
    spec = pre.model
    gx = make_grid(*pre.grid_x)
    gy = make_grid(*pre.grid_y)
    cfg = pre.config
    phix0, phiy0 = initial_product(spec, gx, gy)
    started = time.time()
    ref = propagate_reference(spec, product_state_2d(phix0, phiy0), cfg)
    mf = propagate_meanfield(spec, (phix0, phiy0), cfg)
    err_mf = l2_error_series(ref, assemble_trajectory(mf))
    elapsed = time.time() - started
    return SimpleNamespace(preset=pre, spec=spec, config=cfg, ref=ref,
                           mf=mf, err_mf=err_mf, elapsed=elapsed)


# Scale-separation sweep: one light harmonic mode, one heavy
# harmonic-with-quartic mode, coherent-state start at q0 = 1. The bath
# grid refines with epsilon so the carrier wave stays resolved; dt
# refines as epsilon/10 so the reference resolves the fast phase.
SWEEP_EPSILONS = (0.04, 0.01, 0.0025)
SWEEP_ETA = 0.01
_SWEEP_NY = {0.04: 512, 0.01: 2048, 0.0025: 8192}


def _sweep_point(eps: float, eta: float) -> SimpleNamespace:
    coupling = Coupling.cubic(eta) if eta != 0.0 else Coupling.none()
    spec = ModelSpec(v1=Potential1D.harmonic(1.0),
                     v2=Potential1D.harmonic_quartic(1.0, 0.1),
                     coupling=coupling, epsilon=eps)
    gx = make_grid(-8.0, 8.0, 64)
    gy = make_grid(-4.0, 4.0, _SWEEP_NY[eps])
    gz = make_grid(-12.0, 12.0, 256)
    n_steps = round(10.0 / eps)
    cfg = PropagationConfig(dt=1.0 / n_steps, t_final=1.0,
                            sample_every=max(1, n_steps // 10))
    phix0, phiy0 = initial_product(spec, gx, gy, WavePacket(q0=1.0, p0=0.0))
    ref = propagate_reference(spec, product_state_2d(phix0, phiy0), cfg)
    wp0 = make_wavepacket(spec, gx, gz, q0=1.0, p0=0.0)
    states = propagate_wavepacket(spec, wp0, cfg, Variant.TAYLOR)
    traj = assemble_semiclassical_trajectory(states, gy)
    obs = QuadraticObservable.parse("y^2 + xi_y^2", scaling="semiclassical",
                                    epsilon=eps)
    return SimpleNamespace(
        epsilon=eps, eta=eta, spec=spec, config=cfg, ref=ref,
        states=states, traj=traj,
        err=l2_error_series(ref, traj),
        obs_err=np.abs(observable_error_series(ref, traj, obs)))


@pytest.fixture(scope="session")
def semiclassical_sweep():
    """Taylor-variant error sweeps over epsilon, without and with coupling."""
    free = [_sweep_point(eps, 0.0) for eps in SWEEP_EPSILONS]
    coupled = [_sweep_point(eps, SWEEP_ETA) for eps in SWEEP_EPSILONS]
    return SimpleNamespace(free=free, coupled=coupled, eta=SWEEP_ETA)


@pytest.fixture(scope="session")
def blue_eigh_64():
    """Dense eigendecomposition propagator for blue on a 64 x 64 grid."""
    from oracles import EighPropagator

    pre = preset("blue")
    spec = pre.model
    gx = make_grid(-1.5, 2.5, 64)
    gy = make_grid(-12.0, 12.0, 64)
    phix0, phiy0 = initial_product(spec, gx, gy)
    psi0 = product_state_2d(phix0, phiy0)
    return SimpleNamespace(preset=pre, spec=spec, gx=gx, gy=gy, psi0=psi0,
                           oracle=EighPropagator(spec, gx, gy))
