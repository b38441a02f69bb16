"""Uniform periodic grids, wavefunctions, quadrature, moments, spectral calculus.

Everything downstream (propagators, error bounds, observables) is built on
the types and operations here. Grids are periodic with power-of-two sizes
so transforms stay fast; domains are expected to be padded wide enough that
the wavefunction mass near the boundary is negligible, which is what
`boundary_mass` is for.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

__all__ = [
    "Grid1D",
    "WaveFunction1D",
    "WaveFunction2D",
    "make_grid",
    "inner_product",
    "inner_product_2d",
    "moment",
    "weighted_norm",
    "bracket_weighted_norm",
    "spectral_gradient",
    "spectral_second_derivative",
    "trig_interpolate",
    "boundary_mass",
    "boundary_mass_2d",
]

MAX_MOMENT_ORDER = 6


def _is_power_of_two(n: int) -> bool:
    return n >= 1 and (n & (n - 1)) == 0


@dataclass(frozen=True)
class Grid1D:
    """Uniform periodic grid of n points on [min, max).

    The right endpoint is excluded; spacing is (max - min) / n. Frequencies
    are angular wavenumbers in FFT order, so spectral derivatives are plain
    multiplications in transform space.
    """

    min: float
    max: float
    n: int
    spacing: float = field(init=False, repr=False)
    points: np.ndarray = field(init=False, repr=False)
    frequencies: np.ndarray = field(init=False, repr=False)

    def __post_init__(self) -> None:
        if not self.max > self.min:
            raise ValueError(f"grid needs max > min, got [{self.min}, {self.max}]")
        if not _is_power_of_two(self.n) or self.n < 8:
            raise ValueError(f"grid size must be a power of two >= 8, got {self.n}")
        spacing = (self.max - self.min) / self.n
        pts = self.min + spacing * np.arange(self.n)
        freqs = 2.0 * np.pi * np.fft.fftfreq(self.n, d=spacing)
        pts.setflags(write=False)
        freqs.setflags(write=False)
        object.__setattr__(self, "spacing", spacing)
        object.__setattr__(self, "points", pts)
        object.__setattr__(self, "frequencies", freqs)

    @property
    def length(self) -> float:
        return self.max - self.min


def make_grid(lo: float, hi: float, n: int) -> Grid1D:
    """Build a periodic grid on [lo, hi) with n points (power of two, >= 8)."""
    return Grid1D(float(lo), float(hi), int(n))


@dataclass
class WaveFunction1D:
    """Complex-valued function sampled on a Grid1D."""

    grid: Grid1D
    values: np.ndarray

    def __post_init__(self) -> None:
        vals = np.asarray(self.values, dtype=np.complex128)
        if vals.shape != (self.grid.n,):
            raise ValueError(
                f"values shape {vals.shape} does not match grid size {self.grid.n}"
            )
        self.values = vals

    def copy(self) -> "WaveFunction1D":
        return WaveFunction1D(self.grid, self.values.copy())

    def norm(self) -> float:
        return float(np.sqrt(self.grid.spacing * np.sum(np.abs(self.values) ** 2)))


@dataclass
class WaveFunction2D:
    """Complex-valued function on a tensor grid, indexed values[ix, iy]."""

    gridx: Grid1D
    gridy: Grid1D
    values: np.ndarray

    def __post_init__(self) -> None:
        vals = np.asarray(self.values, dtype=np.complex128)
        if vals.shape != (self.gridx.n, self.gridy.n):
            raise ValueError(
                f"values shape {vals.shape} does not match grids "
                f"({self.gridx.n}, {self.gridy.n})"
            )
        self.values = vals

    def copy(self) -> "WaveFunction2D":
        return WaveFunction2D(self.gridx, self.gridy, self.values.copy())

    @property
    def cell(self) -> float:
        return self.gridx.spacing * self.gridy.spacing

    def norm(self) -> float:
        return float(np.sqrt(self.cell * np.sum(np.abs(self.values) ** 2)))


def _require_same_grid(f: WaveFunction1D, g: WaveFunction1D) -> None:
    gf, gg = f.grid, g.grid
    if (gf.min, gf.max, gf.n) != (gg.min, gg.max, gg.n):
        raise ValueError("wavefunctions live on different grids")


def inner_product(f: WaveFunction1D, g: WaveFunction1D) -> complex:
    """Trapezoid (here: Riemann on a periodic grid) inner product <f, g>.

    Conjugate-linear in the first argument.
    """
    _require_same_grid(f, g)
    return complex(f.grid.spacing * np.vdot(f.values, g.values))


def inner_product_2d(f: WaveFunction2D, g: WaveFunction2D) -> complex:
    if (f.gridx.min, f.gridx.max, f.gridx.n) != (g.gridx.min, g.gridx.max, g.gridx.n) \
            or (f.gridy.min, f.gridy.max, f.gridy.n) != (g.gridy.min, g.gridy.max, g.gridy.n):
        raise ValueError("wavefunctions live on different grids")
    return complex(f.cell * np.vdot(f.values, g.values))


def _density(f: WaveFunction1D) -> np.ndarray:
    return np.abs(f.values) ** 2


def moment(f: WaveFunction1D, k: int, centered: bool = False) -> float:
    """Normalized position moment <u^k> of |f|^2 (centered: <(u - <u>)^k>).

    Raises on zero-norm input and on order k > 6; high moments on a
    truncated domain are numerically meaningless.
    """
    if k < 0 or k > MAX_MOMENT_ORDER:
        raise ValueError(f"moment order must be in [0, {MAX_MOMENT_ORDER}], got {k}")
    dens = _density(f)
    total = f.grid.spacing * float(np.sum(dens))
    if total <= 0.0 or not np.isfinite(total):
        raise ValueError("moment of a zero-norm (or non-finite) wavefunction")
    u = f.grid.points
    if centered:
        mean = f.grid.spacing * float(np.sum(u * dens)) / total
        u = u - mean
    return f.grid.spacing * float(np.sum(u**k * dens)) / total


def weighted_norm(f: WaveFunction1D, k: int = 1) -> float:
    """L2 norm of u^k * f, i.e. ||u^k f||."""
    if k < 0 or k > MAX_MOMENT_ORDER:
        raise ValueError(f"weight order must be in [0, {MAX_MOMENT_ORDER}], got {k}")
    w = f.grid.points ** k
    return float(np.sqrt(f.grid.spacing * np.sum(np.abs(w * f.values) ** 2)))


def bracket_weighted_norm(f: WaveFunction1D, sigma: float, power: int = 0) -> float:
    """L2 norm of (1 + u^2)^(sigma/2) * |u|^power * f.

    The (1 + u^2)^(1/2) bracket weight is the standard smooth substitute for
    |u| that stays bounded below, used by the weighted error bounds.
    """
    u = f.grid.points
    w = (1.0 + u**2) ** (sigma / 2.0) * np.abs(u) ** power
    return float(np.sqrt(f.grid.spacing * np.sum(np.abs(w * f.values) ** 2)))


def spectral_gradient(f: WaveFunction1D, scale: float = 1.0) -> WaveFunction1D:
    """Derivative via FFT: returns scale * f'. Spectrally accurate on periodic data."""
    dv = np.fft.ifft(1j * f.grid.frequencies * np.fft.fft(f.values))
    return WaveFunction1D(f.grid, scale * dv)


def spectral_second_derivative(f: WaveFunction1D, scale: float = 1.0) -> WaveFunction1D:
    """Second derivative via a single multiply by -frequency^2 in transform space."""
    dv = np.fft.ifft(-(f.grid.frequencies**2) * np.fft.fft(f.values))
    return WaveFunction1D(f.grid, scale * dv)


def gradient_2d(psi: WaveFunction2D, axis: int, scale: float = 1.0) -> WaveFunction2D:
    """Partial derivative of a 2D wavefunction along axis 0 (x) or 1 (y)."""
    if axis not in (0, 1):
        raise ValueError("axis must be 0 or 1")
    grid = psi.gridx if axis == 0 else psi.gridy
    freq = grid.frequencies
    shape = (-1, 1) if axis == 0 else (1, -1)
    spec = np.fft.fft(psi.values, axis=axis)
    dv = np.fft.ifft(1j * freq.reshape(shape) * spec, axis=axis)
    return WaveFunction2D(psi.gridx, psi.gridy, scale * dv)


def trig_interpolate(f: WaveFunction1D, targets: np.ndarray) -> np.ndarray:
    """Evaluate the band-limited interpolant of f at arbitrary points.

    Points outside [min, max) are evaluated through the periodic extension,
    so callers interpolating decaying data should clip to the domain first.
    The Nyquist mode is split symmetrically to keep real data real.
    """
    targets = np.asarray(targets, dtype=float)
    n = f.grid.n
    coef = np.fft.fft(f.values) / n
    freqs = f.grid.frequencies.copy()
    # Symmetrize the unpaired Nyquist mode: exp(i w z) -> cos(w z).
    nyq = n // 2
    phase = np.exp(1j * np.outer(targets - f.grid.min, freqs))
    phase[:, nyq] = np.cos(freqs[nyq] * (targets - f.grid.min))
    return phase @ coef


def boundary_mass(f: WaveFunction1D, cells: int = 2) -> float:
    """Fraction of |f|^2 mass in the outermost cells on each side."""
    dens = _density(f)
    total = float(np.sum(dens))
    if total == 0.0:
        return 0.0
    edge = float(np.sum(dens[:cells]) + np.sum(dens[-cells:]))
    return edge / total


def boundary_mass_2d(psi: WaveFunction2D, cells: int = 2) -> float:
    """Fraction of |psi|^2 mass within `cells` points of any domain edge."""
    dens = np.abs(psi.values) ** 2
    total = float(np.sum(dens))
    if total == 0.0:
        return 0.0
    interior = float(np.sum(dens[cells:-cells, cells:-cells]))
    return (total - interior) / total


def gaussian(grid: Grid1D, center: float = 0.0, width: float = 1.0,
             momentum: float = 0.0, momentum_scale: float = 1.0) -> WaveFunction1D:
    """Normalized Gaussian (pi w^2)^(-1/4) exp(-(u-c)^2/(2 w^2) + i p (u-c)/s).

    `width` is the natural length a of a harmonic ground state, so the
    position variance is a^2/2.
    """
    if width <= 0.0:
        raise ValueError("width must be positive")
    u = grid.points - center
    vals = (np.pi * width**2) ** (-0.25) * np.exp(
        -(u**2) / (2.0 * width**2) + 1j * momentum * u / momentum_scale
    )
    return WaveFunction1D(grid, vals)
