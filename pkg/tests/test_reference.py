import math

import numpy as np
import pytest

from duodyn.model import Coupling, ModelSpec, Potential1D, initial_product
from duodyn.numerics import WaveFunction2D, gaussian, make_grid
from duodyn.reference import (PropagationConfig, PropagationError,
                              Trajectory2D, energy, propagate_reference)

from conftest import product_state_2d


def _harmonic_spec(kx=1.0, ky=1.0):
    return ModelSpec(v1=Potential1D.harmonic(kx),
                     v2=Potential1D.harmonic(ky),
                     coupling=Coupling.none())


def test_config_step_counts():
    cfg = PropagationConfig(dt=0.1, t_final=1.0, sample_every=3)
    assert cfg.n_steps == 10
    assert cfg.sample_steps() == [0, 3, 6, 9, 10]


def test_trajectory_length_validation():
    g = make_grid(-1.0, 1.0, 8)
    wf = WaveFunction2D(g, g, np.ones((8, 8), dtype=complex))
    with pytest.raises(ValueError):
        Trajectory2D(times=np.array([0.0, 1.0]), states=[wf])


def test_ground_state_is_stationary():
    spec = _harmonic_spec()
    gx = make_grid(-8.0, 8.0, 64)
    gy = make_grid(-8.0, 8.0, 64)
    psi0 = product_state_2d(*initial_product(spec, gx, gy))
    cfg = PropagationConfig(dt=0.01, t_final=2.0, sample_every=50)
    traj = propagate_reference(spec, psi0, cfg)
    # the ground state only picks up a global phase
    for wf in traj.states:
        overlap = abs(np.vdot(psi0.values, wf.values)) * psi0.cell
        assert overlap == pytest.approx(1.0, abs=1e-10)


def test_coherent_state_center_oscillates():
    spec = _harmonic_spec(kx=1.0, ky=4.0)
    gx = make_grid(-8.0, 8.0, 64)
    gy = make_grid(-8.0, 8.0, 128)
    phix = gaussian(gx, width=1.0)
    phiy = gaussian(gy, center=0.5, width=math.sqrt(1.0 / 2.0))
    psi0 = product_state_2d(phix, phiy)
    cfg = PropagationConfig(dt=0.002, t_final=1.5, sample_every=125)
    traj = propagate_reference(spec, psi0, cfg)
    y = gy.points[None, :]
    for t, wf in zip(traj.times, traj.states):
        dens = np.abs(wf.values) ** 2
        mean_y = float(np.sum(y * dens) / np.sum(dens))
        # omega_y = 2 for unit mass and k = 4
        assert mean_y == pytest.approx(0.5 * math.cos(2.0 * t), abs=5e-6)


def test_norm_and_energy_are_conserved():
    spec = _harmonic_spec()
    gx = make_grid(-8.0, 8.0, 64)
    gy = make_grid(-8.0, 8.0, 64)
    phix = gaussian(gx, center=0.4, width=1.0)
    phiy = gaussian(gy, center=-0.3, width=1.0)
    psi0 = product_state_2d(phix, phiy)
    drifts = []
    for dt in (0.005, 0.0025):
        cfg = PropagationConfig(dt=dt, t_final=3.0, sample_every=100)
        traj = propagate_reference(spec, psi0, cfg)
        np.testing.assert_allclose(traj.norms, 1.0, atol=1e-12)
        e0 = traj.energies[0]
        drifts.append(np.max(np.abs(traj.energies - e0)) / abs(e0))
    assert drifts[0] < 1e-6
    # the splitting does not conserve energy exactly, but the deviation
    # is an O(dt^2) oscillation, not a secular drift
    assert drifts[1] == pytest.approx(drifts[0] / 4.0, rel=0.05)


def test_energy_expectation_of_known_state():
    # unit-width Gaussian in a unit harmonic well: E = 1/2 per axis
    spec = _harmonic_spec()
    gx = make_grid(-10.0, 10.0, 128)
    gy = make_grid(-10.0, 10.0, 128)
    psi0 = product_state_2d(gaussian(gx), gaussian(gy))
    assert energy(spec, psi0) == pytest.approx(1.0, abs=1e-10)


def test_scaled_kinetic_term_enters_energy():
    v = Potential1D.harmonic(1.0)
    spec = ModelSpec(v1=v, v2=v, coupling=Coupling.none(), epsilon=0.25)
    gx = make_grid(-10.0, 10.0, 128)
    gy = make_grid(-10.0, 10.0, 256)
    # bath ground state for the scaled problem has width sqrt(eps)
    psi0 = product_state_2d(gaussian(gx),
                            gaussian(gy, width=math.sqrt(0.25)))
    # <T_y> = eps^2/(4 w^2) = eps/4, <V_2> = w^2/4 = eps/4, system adds 1/2
    assert energy(spec, psi0) == pytest.approx(0.5 + 0.25 / 2.0, abs=1e-10)


@pytest.mark.filterwarnings("ignore::RuntimeWarning")
def test_norm_drift_aborts():
    # a state with mass at the Nyquist scale on a coarse grid goes unstable
    # only through user error; emulate by a non-finite potential value
    spec = ModelSpec(v1=Potential1D(lambda u: np.where(np.abs(u) > 6.0,
                                                       np.inf, 0.0)),
                     v2=Potential1D.harmonic(1.0),
                     coupling=Coupling.none())
    gx = make_grid(-8.0, 8.0, 64)
    gy = make_grid(-8.0, 8.0, 64)
    psi0 = product_state_2d(gaussian(gx), gaussian(gy))
    cfg = PropagationConfig(dt=0.01, t_final=0.5, sample_every=10)
    with pytest.raises(PropagationError):
        propagate_reference(spec, psi0, cfg)


def test_strang_order_on_coupled_model():
    spec = ModelSpec(v1=Potential1D.harmonic(1.0),
                     v2=Potential1D.harmonic(1.0),
                     coupling=Coupling.cubic(0.2))
    gx = make_grid(-8.0, 8.0, 32)
    gy = make_grid(-8.0, 8.0, 32)
    phix = gaussian(gx, center=0.3)
    phiy = gaussian(gy, center=-0.2)
    psi0 = product_state_2d(phix, phiy)
    t_final = 1.0
    finest = propagate_reference(
        spec, psi0, PropagationConfig(dt=t_final / 1024, t_final=t_final,
                                      sample_every=1024)).states[-1]
    errs = []
    dts = [t_final / 16, t_final / 32, t_final / 64]
    for n in (16, 32, 64):
        traj = propagate_reference(
            spec, psi0, PropagationConfig(dt=t_final / n, t_final=t_final,
                                          sample_every=n))
        d = traj.states[-1].values - finest.values
        errs.append(math.sqrt(float(np.sum(np.abs(d) ** 2)) * finest.cell))
    slope = np.polyfit(np.log(dts), np.log(errs), 1)[0]
    assert 1.8 < slope < 2.2
