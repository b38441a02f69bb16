"""Semiclassical wave-packet scheme for scale-separated models (epsilon < 1).

The heavy coordinate is approximated by a Gaussian-scaled profile
u2(t, z) on the stretched frame z = (y - q(t)) / sqrt(eps) carried along a
classical trajectory (q, p, S), while the light coordinate keeps a full
grid factor psi1(t, x) driven by the coupling evaluated along the
trajectory. Two variants differ in what drives the classics and the
curvature: `taylor` uses pointwise derivatives of V2 at q(t); `averaged`
uses derivatives averaged over the instantaneous profile density |u2|^2.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Callable, Optional, Sequence

import numpy as np

from .model import _ground_width
from .numerics import (Grid1D, WaveFunction1D, WaveFunction2D, gaussian,
                       trig_interpolate)
from .reference import PropagationConfig, PropagationError, Trajectory2D

__all__ = [
    "Variant",
    "WavePacketState",
    "make_wavepacket",
    "step_trajectory",
    "propagate_u2",
    "propagate_psi1",
    "propagate_wavepacket",
    "assemble_semiclassical",
    "assemble_semiclassical_trajectory",
]

NORM_DRIFT_LIMIT = 1e-6

DEFAULT_Z_GRID = (-12.0, 12.0, 256)


class Variant(str, Enum):
    """Trajectory/curvature source: pointwise Taylor data or profile averages."""

    TAYLOR = "taylor"
    AVERAGED = "averaged"


@dataclass
class WavePacketState:
    """Classical pair (q, p), action S, profile u2(z), light factor psi1(x).

    The represented 2D state on a y grid is
    psi1(x) * eps^(-1/4) u2((y - q)/sqrt(eps)) exp(i (p (y - q) + S)/eps);
    see `assemble_semiclassical`.
    """

    q: float
    p: float
    S: float
    u2: WaveFunction1D
    psi1: WaveFunction1D
    t: float
    epsilon: float

    def copy(self) -> "WavePacketState":
        return WavePacketState(self.q, self.p, self.S, self.u2.copy(),
                               self.psi1.copy(), self.t, self.epsilon)


def make_wavepacket(spec, xgrid: Grid1D, zgrid: Grid1D, q0: float, p0: float,
                    amplitude: Optional[Callable] = None,
                    psi1_init: Optional[Callable] = None) -> WavePacketState:
    """Initial wave-packet state; the profile is normalized at construction."""
    if spec.epsilon >= 1.0:
        raise ValueError("wave packets need a scaled model (epsilon < 1)")
    if amplitude is None:
        u2 = gaussian(zgrid, center=0.0, width=1.0)
    else:
        vals = np.asarray(amplitude(zgrid.points), dtype=np.complex128)
        u2 = WaveFunction1D(zgrid, vals)
        nrm = u2.norm()
        if nrm <= 0.0:
            raise ValueError("wave packet profile has zero norm")
        u2 = WaveFunction1D(zgrid, vals / nrm)
    if psi1_init is None:
        curv = float(spec.v1.d2(0.0, fd_step=xgrid.spacing))
        if curv <= 0.0:
            raise ValueError("flat V1 at the origin; pass psi1_init explicitly")
        psi1 = gaussian(xgrid, center=0.0,
                        width=_ground_width(spec.mass1, curv, 1.0))
    else:
        vals = np.asarray(psi1_init(xgrid.points), dtype=np.complex128)
        psi1 = WaveFunction1D(xgrid, vals)
        nrm = psi1.norm()
        if nrm <= 0.0:
            raise ValueError("psi1 initial data has zero norm")
        psi1 = WaveFunction1D(xgrid, vals / nrm)
    return WavePacketState(q=float(q0), p=float(p0), S=0.0, u2=u2, psi1=psi1,
                           t=0.0, epsilon=spec.epsilon)


def _profile_density(u2: WaveFunction1D) -> np.ndarray:
    dens = np.abs(u2.values) ** 2 * u2.grid.spacing
    total = float(np.sum(dens))
    if total <= 0.0:
        raise ValueError("profile density has zero mass")
    return dens / total


def _bath_average(fn: Callable, q: float, zgrid: Grid1D, dens: np.ndarray,
                  eps: float) -> float:
    y = q + math.sqrt(eps) * zgrid.points
    return float(np.dot(dens, np.asarray(fn(y), dtype=float)))


def _variant_fns(spec, variant: Variant, zgrid: Grid1D,
                 dens: Optional[np.ndarray], eps: float):
    """Force, bath potential and curvature callables for one step."""
    fd = math.sqrt(eps) * zgrid.spacing
    if variant == Variant.TAYLOR:
        force = lambda q: -float(spec.v2.d1(q, fd_step=fd))
        vbath = lambda q: float(spec.v2(q))
        curv = lambda q: float(spec.v2.d2(q, fd_step=fd))
    else:
        d1 = lambda y: spec.v2.d1(y, fd_step=fd)
        d2 = lambda y: spec.v2.d2(y, fd_step=fd)
        force = lambda q: -_bath_average(d1, q, zgrid, dens, eps)
        vbath = lambda q: _bath_average(spec.v2, q, zgrid, dens, eps)
        curv = lambda q: _bath_average(d2, q, zgrid, dens, eps)
    return force, vbath, curv


def _verlet(q: float, p: float, S: float, dt: float, force: Callable,
            vbath: Callable) -> tuple[float, float, float, float]:
    """One kick-drift-kick step; S advances by the midpoint rule."""
    p_half = p + 0.5 * dt * force(q)
    q_new = q + dt * p_half
    p_new = p_half + 0.5 * dt * force(q_new)
    q_mid = q + 0.5 * dt * p_half
    S_new = S + dt * (0.5 * p_half**2 - vbath(q_mid))
    return q_new, p_new, S_new, q_mid


def step_trajectory(spec, state: WavePacketState, dt: float,
                    variant: Variant = Variant.TAYLOR,
                    ) -> tuple[float, float, float]:
    """Advance only the classical data (q, p, S) of `state` by one step.

    The averaged variant integrates V2 derivatives against the current
    profile density at y = q + sqrt(eps) z.
    """
    variant = Variant(variant)
    zgrid = state.u2.grid
    dens = _profile_density(state.u2) if variant == Variant.AVERAGED else None
    force, vbath, _ = _variant_fns(spec, variant, zgrid, dens, state.epsilon)
    q, p, S, _ = _verlet(state.q, state.p, state.S, dt, force, vbath)
    return q, p, S


class _Split1D:
    def __init__(self, grid: Grid1D, kin_coef: float, h: float, dt: float):
        self.h = h
        self.dt = dt
        self.kin_phase = np.exp(-1j * dt * kin_coef * grid.frequencies**2 / h)

    def step(self, values: np.ndarray, pot: np.ndarray) -> np.ndarray:
        half = np.exp(-0.5j * self.dt * pot / self.h)
        out = values * half
        out = np.fft.ifft(self.kin_phase * np.fft.fft(out))
        out *= half
        return out


def _coupling_slice(spec, xpts: np.ndarray, q_mid: float,
                    variant: Variant, zgrid: Grid1D,
                    dens: Optional[np.ndarray], eps: float) -> np.ndarray:
    """Coupling along x: pointwise W(x, q) or its profile average."""
    coup = spec.coupling
    if variant == Variant.TAYLOR:
        return coup.values(xpts, np.array([q_mid]))[:, 0]
    y = q_mid + math.sqrt(eps) * zgrid.points
    if coup.is_separable:
        m2 = float(np.dot(dens, np.asarray(coup.w2(y), dtype=float)))
        return np.asarray(coup.w1(xpts), dtype=float) * m2
    return coup.values(xpts, y) @ dens


def propagate_wavepacket(spec, state0: WavePacketState, cfg: PropagationConfig,
                         variant: Variant = Variant.TAYLOR,
                         evolve_psi1: bool = True) -> list[WavePacketState]:
    """Propagate the full wave-packet state, sampling along the way.

    Per step: profile averages (averaged variant) are frozen from the
    current u2; the trajectory advances by a kick-drift-kick step; u2 takes
    a splitting step under the midpoint curvature; psi1 takes a splitting
    step under V1 plus the midpoint coupling slice.
    """
    variant = Variant(variant)
    if abs(state0.epsilon - spec.epsilon) > 1e-15:
        raise ValueError("state epsilon does not match the model")
    eps = spec.epsilon
    dt = cfg.dt
    zgrid = state0.u2.grid
    xgrid = state0.psi1.grid
    zpts = zgrid.points
    xpts = xgrid.points
    v1x = spec.v1(xpts)

    su = _Split1D(zgrid, 0.5, 1.0, dt)
    sp = _Split1D(xgrid, spec.kin_x, eps, dt)

    q, p, S = state0.q, state0.p, state0.S
    u2 = state0.u2.values.copy()
    psi1 = state0.psi1.values.copy()
    nu0 = float(np.sqrt(np.sum(np.abs(u2) ** 2)))
    np0 = float(np.sqrt(np.sum(np.abs(psi1) ** 2)))

    sample_at = set(cfg.sample_steps())
    out: list[WavePacketState] = []

    def record(step: int) -> None:
        out.append(WavePacketState(
            q=q, p=p, S=S,
            u2=WaveFunction1D(zgrid, u2.copy()),
            psi1=WaveFunction1D(xgrid, psi1.copy()),
            t=step * dt, epsilon=eps))

    record(0)
    for step in range(1, cfg.n_steps + 1):
        dens = _profile_density(WaveFunction1D(zgrid, u2)) \
            if variant == Variant.AVERAGED else None
        force, vbath, curv = _variant_fns(spec, variant, zgrid, dens, eps)
        q, p, S, q_mid = _verlet(q, p, S, dt, force, vbath)
        u2 = su.step(u2, 0.5 * curv(q_mid) * zpts**2)
        nrm = float(np.sqrt(np.sum(np.abs(u2) ** 2)))
        if not np.isfinite(nrm) or abs(nrm - nu0) > NORM_DRIFT_LIMIT * nu0:
            raise PropagationError(f"profile norm drift at step {step}")
        if evolve_psi1:
            wslice = _coupling_slice(spec, xpts, q_mid, variant, zgrid, dens, eps) \
                if not spec.coupling.is_zero else 0.0
            psi1 = sp.step(psi1, v1x + wslice)
            nrm1 = float(np.sqrt(np.sum(np.abs(psi1) ** 2)))
            if not np.isfinite(nrm1) or abs(nrm1 - np0) > NORM_DRIFT_LIMIT * np0:
                raise PropagationError(f"light-factor norm drift at step {step}")
        if step in sample_at:
            record(step)
    return out


def propagate_u2(spec, state0: WavePacketState, cfg: PropagationConfig,
                 variant: Variant = Variant.TAYLOR) -> list[WavePacketState]:
    """Propagate trajectory and profile only; psi1 is carried unchanged."""
    return propagate_wavepacket(spec, state0, cfg, variant, evolve_psi1=False)


def propagate_psi1(spec, state0: WavePacketState, cfg: PropagationConfig,
                   variant: Variant = Variant.TAYLOR) -> list[WaveFunction1D]:
    """Propagate the full state and return the psi1 samples."""
    return [s.psi1 for s in propagate_wavepacket(spec, state0, cfg, variant)]


def assemble_semiclassical(state: WavePacketState,
                           ygrid: Grid1D) -> WaveFunction2D:
    """Evaluate the wave-packet state on a tensor (x, y) grid.

    The profile is evaluated by band-limited interpolation at
    z = (y - q)/sqrt(eps); points outside the profile domain contribute
    zero (the profile is assumed to have decayed there). The y grid must
    resolve the carrier oscillation of wavelength 2 pi eps / |p| with at
    least eight points.
    """
    eps = state.epsilon
    rt = math.sqrt(eps)
    if abs(state.p) > 1e-12:
        wavelength = 2.0 * math.pi * eps / abs(state.p)
        if ygrid.spacing > wavelength / 8.0:
            raise ValueError(
                f"resolution check failure: y spacing {ygrid.spacing:.3e} "
                f"does not resolve carrier wavelength {wavelength:.3e} "
                "with 8 points")
    y = ygrid.points
    z = (y - state.q) / rt
    zg = state.u2.grid
    inside = (z >= zg.min) & (z < zg.max)
    u2_at = np.zeros(y.shape, dtype=np.complex128)
    if np.any(inside):
        u2_at[inside] = trig_interpolate(state.u2, z[inside])
    psi2 = eps ** (-0.25) * u2_at * np.exp(
        1j * (state.p * (y - state.q) + state.S) / eps)
    vals = np.outer(state.psi1.values, psi2)
    return WaveFunction2D(state.psi1.grid, ygrid, vals)


def assemble_semiclassical_trajectory(states: Sequence[WavePacketState],
                                      ygrid: Grid1D) -> Trajectory2D:
    times = np.asarray([s.t for s in states], dtype=float)
    wfs = [assemble_semiclassical(s, ygrid) for s in states]
    norms = np.asarray([w.norm() for w in wfs])
    return Trajectory2D(times=times, states=wfs, norms=norms)
