"""Measured errors, a-priori error bounds, and time-series reports.

Everything here works on sampled trajectories: measured errors compare a
reference `Trajectory2D` against an assembled approximation, the bound
evaluators consume the factorized `ProductState` samples directly, and
`ErrorReport` collects the series for CSV export.

All bound integrals are cumulative trapezoid sums over the sample times,
so bound(0) = 0 and the series is monotone when the integrand is
non-negative.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from typing import Mapping, Optional, Sequence

import numpy as np

from .factorized import ProductState
from .numerics import (WaveFunction1D, WaveFunction2D, bracket_weighted_norm,
                       inner_product_2d, moment, spectral_gradient,
                       weighted_norm)
from .reference import Trajectory2D

__all__ = [
    "QuadraticObservable",
    "ErrorReport",
    "l2_error_series",
    "phase_aligned_l2_series",
    "observable_error_series",
    "observable_error_cap",
    "bound_flat_l2",
    "bound_best_flat_l2",
    "bound_gradient_free",
    "bound_h1",
    "measured_h1_series",
    "calibrate_h1_constant",
    "moment_integral_series",
    "initial_slope",
    "rate_fit",
    "write_report_csv",
    "read_csv_columns",
]

# Sup norms sampled on the simulation box get this safety factor; analytic
# or user-supplied values are used as given.
SUP_SAFETY = 2.0

FLAT_L2_CONSTANTS = {
    ("bruteforce", "grad_y"): 2.0,
    ("meanfield", "grad_y"): 4.0,
    ("bruteforce", "grad_x_grad_y"): 1.0,
    ("meanfield", "grad_x_grad_y"): 4.0,
    ("bruteforce", "weighted"): 2.0,
    ("meanfield", "weighted"): 8.0,
}


def _check_alignment(ref: Trajectory2D, approx: Trajectory2D) -> None:
    if len(ref) != len(approx):
        raise ValueError(f"sample counts differ: {len(ref)} vs {len(approx)}")
    if not np.allclose(ref.times, approx.times, rtol=0.0, atol=1e-9):
        raise ValueError("sample times are not aligned")
    a, b = ref.states[0], approx.states[0]
    if a.gridx != b.gridx or a.gridy != b.gridy:
        raise ValueError("trajectories live on different grids")


def l2_error_series(ref: Trajectory2D, approx: Trajectory2D) -> np.ndarray:
    """Pointwise-in-time L2 norm of the difference of two trajectories."""
    _check_alignment(ref, approx)
    out = np.empty(len(ref))
    for i, (a, b) in enumerate(zip(ref.states, approx.states)):
        d = a.values - b.values
        out[i] = math.sqrt(float(np.sum(np.abs(d) ** 2)) * a.cell)
    return out


def phase_aligned_l2_series(ref: Trajectory2D,
                            approx: Trajectory2D) -> np.ndarray:
    """L2 error minimized over a global phase of the approximation.

    Useful for schemes that are accurate up to a time-dependent constant
    phase; equals sqrt(|a|^2 + |b|^2 - 2 |<a, b>|).
    """
    _check_alignment(ref, approx)
    out = np.empty(len(ref))
    for i, (a, b) in enumerate(zip(ref.states, approx.states)):
        ov = abs(inner_product_2d(a, b))
        val = a.norm() ** 2 + b.norm() ** 2 - 2.0 * ov
        out[i] = math.sqrt(max(val, 0.0))
    return out


# -- quadratic observables --------------------------------------------------

_VARS = ("x", "y", "xi_x", "xi_y")
_CONJUGATE = ({"x", "xi_x"}, {"y", "xi_y"})


@dataclass(frozen=True)
class QuadraticObservable:
    """Weyl quantization of a real polynomial symbol of degree <= 2.

    Terms map sorted variable tuples to real coefficients, e.g.
    {(): 1.0, ("y", "y"): 2.0, ("x", "xi_x"): 1.0}. Allowed variables are
    x, y, xi_x, xi_y. With `scaling` = "semiclassical", xi_y quantizes to
    -i eps d/dy (the bath momentum carries the small parameter); x and
    xi_x are never scaled.
    """

    terms: Mapping[tuple, float]
    scaling: str = "standard"
    epsilon: float = 1.0
    label: str = ""

    def __post_init__(self) -> None:
        if self.scaling not in ("standard", "semiclassical"):
            raise ValueError(f"unknown scaling {self.scaling!r}")
        if self.scaling == "semiclassical" and not (0.0 < self.epsilon <= 1.0):
            raise ValueError("semiclassical scaling needs epsilon in (0, 1]")
        for key, coef in self.terms.items():
            if len(key) > 2:
                raise ValueError(f"term {key} has degree > 2")
            for v in key:
                if v not in _VARS:
                    raise ValueError(f"unknown variable {v!r}")
            if tuple(sorted(key)) != tuple(key):
                raise ValueError(f"term key {key} is not sorted")
            if isinstance(coef, complex) and coef.imag != 0.0:
                raise ValueError("coefficients must be real")

    @classmethod
    def parse(cls, text: str, scaling: str = "standard",
              epsilon: float = 1.0) -> "QuadraticObservable":
        """Parse symbols like "y^2 + xi_y^2", "0.5*x*y - 2", "x**2".

        Terms are separated by top-level + and -, factors by '*'; powers
        are written ^2 or **2.
        """
        cleaned = text.replace("**", "^").strip()
        if not cleaned:
            raise ValueError("empty observable expression")
        pieces = re.findall(r"[+-]?[^+-]+", cleaned)
        terms: dict[tuple, float] = {}
        for piece in pieces:
            piece = piece.strip()
            sign = 1.0
            while piece and piece[0] in "+-":
                if piece[0] == "-":
                    sign = -sign
                piece = piece[1:].strip()
            coef = sign
            vars_in_term: list[str] = []
            for factor in piece.split("*"):
                factor = factor.strip()
                if not factor:
                    raise ValueError(f"empty factor in {text!r}")
                m = re.fullmatch(r"([A-Za-z_][A-Za-z_0-9]*)(?:\^(\d+))?",
                                 factor)
                if m and m.group(1) in _VARS:
                    power = int(m.group(2) or 1)
                    vars_in_term.extend([m.group(1)] * power)
                else:
                    try:
                        coef *= float(factor)
                    except ValueError:
                        raise ValueError(
                            f"cannot parse factor {factor!r} in {text!r}"
                        ) from None
            if len(vars_in_term) > 2:
                raise ValueError(f"term {piece!r} has degree > 2")
            key = tuple(sorted(vars_in_term))
            terms[key] = terms.get(key, 0.0) + coef
        return cls(terms=terms, scaling=scaling, epsilon=epsilon,
                   label=text.strip())

    @property
    def subsystem(self) -> str:
        """"x", "y", or "both" depending on which variables appear."""
        seen = {v for key in self.terms for v in key}
        has_x = bool(seen & {"x", "xi_x"})
        has_y = bool(seen & {"y", "xi_y"})
        if has_x and has_y:
            return "both"
        return "y" if has_y else "x"

    def _momentum_scale(self, var: str) -> float:
        if var == "xi_y" and self.scaling == "semiclassical":
            return self.epsilon
        return 1.0

    def _apply_var(self, psi: WaveFunction2D, var: str) -> np.ndarray:
        vals = psi.values
        if var == "x":
            return psi.gridx.points[:, None] * vals
        if var == "y":
            return psi.gridy.points[None, :] * vals
        axis = 0 if var == "xi_x" else 1
        grid = psi.gridx if axis == 0 else psi.gridy
        xi = grid.frequencies * self._momentum_scale(var)
        shape = (-1, 1) if axis == 0 else (1, -1)
        ft = np.fft.fft(vals, axis=axis)
        return np.fft.ifft(xi.reshape(shape) * ft, axis=axis)

    def apply(self, psi: WaveFunction2D) -> WaveFunction2D:
        """Apply the quantized operator to a 2D state."""
        out = np.zeros_like(psi.values)
        for key, coef in self.terms.items():
            if len(key) == 0:
                out += coef * psi.values
            elif len(key) == 1:
                out += coef * self._apply_var(psi, key[0])
            else:
                a, b = key
                tmp = WaveFunction2D(psi.gridx, psi.gridy,
                                     self._apply_var(psi, b))
                ab = self._apply_var(tmp, a)
                if {a, b} in _CONJUGATE:
                    tmp = WaveFunction2D(psi.gridx, psi.gridy,
                                         self._apply_var(psi, a))
                    ba = self._apply_var(tmp, b)
                    ab = 0.5 * (ab + ba)
                out += coef * ab
        return WaveFunction2D(psi.gridx, psi.gridy, out)

    def expectation(self, psi: WaveFunction2D) -> float:
        """Normalized expectation value <psi, B psi> / ||psi||^2."""
        bpsi = self.apply(psi)
        num = inner_product_2d(psi, bpsi)
        den = psi.norm() ** 2
        if den <= 0.0:
            raise ValueError("zero-norm state has no expectation value")
        return float(num.real) / den


def observable_error_series(ref: Trajectory2D, approx: Trajectory2D,
                            obs: QuadraticObservable) -> np.ndarray:
    """Expectation-value difference <B>_ref - <B>_approx over time."""
    _check_alignment(ref, approx)
    return np.asarray([obs.expectation(a) - obs.expectation(b)
                       for a, b in zip(ref.states, approx.states)])


def observable_error_cap(ref: Trajectory2D, approx: Trajectory2D,
                         obs: QuadraticObservable) -> np.ndarray:
    """The norm-based ceiling ||d|| (||B psi|| + ||B psi_app||).

    Any expectation-value error is bounded by this series; it is the
    crude estimate the sharper bounds improve on.
    """
    _check_alignment(ref, approx)
    out = np.empty(len(ref))
    for i, (a, b) in enumerate(zip(ref.states, approx.states)):
        d = math.sqrt(float(np.sum(np.abs(a.values - b.values) ** 2)) * a.cell)
        out[i] = d * (obs.apply(a).norm() + obs.apply(b).norm())
    return out


# -- bound evaluation -------------------------------------------------------


def _cumtrapz(times: np.ndarray, values: np.ndarray) -> np.ndarray:
    dt = np.diff(times)
    segments = 0.5 * (values[1:] + values[:-1]) * dt
    return np.concatenate([[0.0], np.cumsum(segments)])


def _times_of(states: Sequence[ProductState]) -> np.ndarray:
    return np.asarray([s.t for s in states], dtype=float)


def _sampled_sup(field: np.ndarray) -> float:
    return SUP_SAFETY * float(np.max(np.abs(field)))


def _grad_y_sup(spec, states: Sequence[ProductState]) -> float:
    if spec.coupling.grad_y_sup is not None:
        return spec.coupling.grad_y_sup
    gx, gy = states[0].phix.grid, states[0].phiy.grid
    fd = min(gx.spacing, gy.spacing)
    return _sampled_sup(spec.coupling.grad_y(gx.points, gy.points, fd_step=fd))


def _grad_xy_sup(spec, states: Sequence[ProductState]) -> float:
    if spec.coupling.grad_xy_sup is not None:
        return spec.coupling.grad_xy_sup
    gx, gy = states[0].phix.grid, states[0].phiy.grid
    fd = min(gx.spacing, gy.spacing)
    return _sampled_sup(
        spec.coupling.grad_x_grad_y(gx.points, gy.points, fd_step=fd))


def _weighted_sup(spec, states: Sequence[ProductState],
                  sigma_x: float, sigma_y: float) -> float:
    known = spec.coupling.weighted_grad_y_sup(sigma_x, sigma_y)
    if known is not None:
        return known
    gx, gy = states[0].phix.grid, states[0].phiy.grid
    fd = min(gx.spacing, gy.spacing)
    grad = spec.coupling.grad_y(gx.points, gy.points, fd_step=fd)
    wx = (1.0 + gx.points**2) ** (sigma_x / 2.0)
    wy = (1.0 + gy.points**2) ** (sigma_y / 2.0)
    return _sampled_sup(grad / (wx[:, None] * wy[None, :]))


def bound_flat_l2(kind: str, path: str, states: Sequence[ProductState],
                  spec, sigma_x: float = 1.0,
                  sigma_y: float = 1.0) -> np.ndarray:
    """A-priori L2 error bound along one estimate path.

    kind is "bruteforce" or "meanfield"; path one of "grad_y" (needs a
    finite sup of |dW/dy|), "grad_x_grad_y" (sup of the mixed second
    derivative), or "weighted" (polynomially weighted sup, the route that
    stays finite for the cubic coupling). Sup norms fall back to a
    grid-sampled maximum times a safety factor of 2 when the coupling
    carries no analytic value; that makes the bound trustworthy only when
    the states stay well inside the box.
    """
    if (kind, path) not in FLAT_L2_CONSTANTS:
        raise ValueError(f"unknown bound selection {kind!r}/{path!r}")
    const = FLAT_L2_CONSTANTS[(kind, path)]
    times = _times_of(states)
    if spec.coupling.is_zero:
        return np.zeros(len(states))
    if path == "grad_y":
        sup = _grad_y_sup(spec, states)
        amp = states[0].phix.norm()
        integrand = np.asarray([weighted_norm(s.phiy, 1) for s in states])
        integrand = amp * integrand
    elif path == "grad_x_grad_y":
        sup = _grad_xy_sup(spec, states)
        integrand = np.asarray([weighted_norm(s.phix, 1)
                                * weighted_norm(s.phiy, 1) for s in states])
    else:
        sup = _weighted_sup(spec, states, sigma_x, sigma_y)
        integrand = np.asarray([
            bracket_weighted_norm(s.phix, sigma_x, 0)
            * bracket_weighted_norm(s.phiy, sigma_y, 1) for s in states])
    if not math.isfinite(sup):
        raise ValueError(f"infinite sup norm on path {path!r}; "
                         "use the weighted path")
    return const * sup * _cumtrapz(times, integrand) / spec.h


def bound_best_flat_l2(kind: str, states: Sequence[ProductState], spec,
                       sigma_x: float = 1.0, sigma_y: float = 1.0,
                       paths: Optional[Sequence[str]] = None) -> np.ndarray:
    """Pointwise minimum of the evaluable flat-L2 bound paths."""
    if paths is None:
        paths = ("grad_y", "grad_x_grad_y", "weighted")
    series = []
    for path in paths:
        try:
            series.append(bound_flat_l2(kind, path, states, spec,
                                        sigma_x, sigma_y))
        except ValueError:
            continue
    if not series:
        raise ValueError("no bound path is evaluable for this coupling")
    return np.min(np.vstack(series), axis=0)


def _average_of(values: np.ndarray, wf: WaveFunction1D) -> float:
    dens = np.abs(wf.values) ** 2
    total = float(np.sum(dens))
    if total <= 0.0:
        raise ValueError("zero-norm factor in average")
    return float(np.sum(values * dens)) / total


def bound_gradient_free(states: Sequence[ProductState], spec,
                        kind: str = "meanfield",
                        collocation: tuple = (0.0, 0.0)) -> np.ndarray:
    """Variance-product bound; needs a separable coupling W = w1(x) w2(y).

    The mean-field integrand is sqrt(Var(w1) Var(w2)) with variances
    against the instantaneous factor densities. The brute-force analogue
    replaces the means by the collocation values, i.e. second moments of
    w1 - w1(x0) and w2 - w2(y0), which bound the corresponding source
    term exactly.
    """
    if spec.coupling.is_zero:
        return np.zeros(len(states))
    if not spec.coupling.is_separable:
        raise ValueError("gradient-free bound needs a separable coupling")
    if kind not in ("meanfield", "bruteforce"):
        raise ValueError(f"unknown kind {kind!r}")
    times = _times_of(states)
    w1 = spec.coupling.w1(states[0].phix.grid.points)
    w2 = spec.coupling.w2(states[0].phiy.grid.points)
    amp = states[0].phix.norm() * states[0].phiy.norm()
    integrand = np.empty(len(states))
    if kind == "meanfield":
        for i, s in enumerate(states):
            v1 = _average_of(w1**2, s.phix) - _average_of(w1, s.phix) ** 2
            v2 = _average_of(w2**2, s.phiy) - _average_of(w2, s.phiy) ** 2
            integrand[i] = math.sqrt(max(v1, 0.0) * max(v2, 0.0))
    else:
        w10 = float(spec.coupling.w1(np.asarray([collocation[0]]))[0])
        w20 = float(spec.coupling.w2(np.asarray([collocation[1]]))[0])
        for i, s in enumerate(states):
            m1 = _average_of((w1 - w10) ** 2, s.phix)
            m2 = _average_of((w2 - w20) ** 2, s.phiy)
            integrand[i] = math.sqrt(m1 * m2)
    return amp * _cumtrapz(times, integrand) / spec.h


def _h1_factor_norms(wf: WaveFunction1D) -> tuple:
    """(||u f||, ||grad f||, |||u| grad f||) for one factor."""
    grad = spectral_gradient(wf)
    return (weighted_norm(wf, 1), grad.norm(), weighted_norm(grad, 1))


def bound_h1(kind: str, states: Sequence[ProductState], spec,
             constant: float, axis: str = "x") -> np.ndarray:
    """Derivative-weighted error bound with an explicit growth constant.

    Evaluates C sup|d2W/dxdy| int_0^t e^(C s) m(s) ds where, for axis
    "x", m = ||y phiy|| (||x phix|| + ||grad phix|| + |||x| grad phix||),
    and symmetrically for axis "y". The constant C is a modelling input;
    see `calibrate_h1_constant` for fitting it against a measured series.
    """
    if kind not in ("bruteforce", "meanfield"):
        raise ValueError(f"unknown kind {kind!r}")
    if axis not in ("x", "y"):
        raise ValueError("axis must be 'x' or 'y'")
    if constant < 0.0:
        raise ValueError("growth constant must be non-negative")
    times = _times_of(states)
    if spec.coupling.is_zero:
        return np.zeros(len(states))
    sup = _grad_xy_sup(spec, states)
    if not math.isfinite(sup):
        raise ValueError("infinite mixed-derivative sup; the derivative-"
                         "weighted bound needs a bounded d2W/dxdy")
    integrand = np.empty(len(states))
    for i, s in enumerate(states):
        if axis == "x":
            other = weighted_norm(s.phiy, 1)
            w, g, wg = _h1_factor_norms(s.phix)
        else:
            other = weighted_norm(s.phix, 1)
            w, g, wg = _h1_factor_norms(s.phiy)
        integrand[i] = other * (w + g + wg)
    with np.errstate(over="ignore"):
        growth = np.exp(np.minimum(constant * times, 709.0))
        series = constant * sup * _cumtrapz(times, growth * integrand)
    return series / spec.h


def measured_h1_series(ref: Trajectory2D, approx: Trajectory2D,
                       axis: str = "x") -> np.ndarray:
    """Measured ||grad_v(d)|| + ||v d|| for the difference d, v = x or y."""
    _check_alignment(ref, approx)
    if axis not in ("x", "y"):
        raise ValueError("axis must be 'x' or 'y'")
    ax = 0 if axis == "x" else 1
    out = np.empty(len(ref))
    for i, (a, b) in enumerate(zip(ref.states, approx.states)):
        dvals = a.values - b.values
        grid = a.gridx if ax == 0 else a.gridy
        pts = grid.points.reshape((-1, 1) if ax == 0 else (1, -1))
        ft = np.fft.fft(dvals, axis=ax)
        xi = grid.frequencies.reshape((-1, 1) if ax == 0 else (1, -1))
        grad = np.fft.ifft(1j * xi * ft, axis=ax)
        gn = math.sqrt(float(np.sum(np.abs(grad) ** 2)) * a.cell)
        wn = math.sqrt(float(np.sum(np.abs(pts * dvals) ** 2)) * a.cell)
        out[i] = gn + wn
    return out


def calibrate_h1_constant(kind: str, states: Sequence[ProductState], spec,
                          measured: np.ndarray, axis: str = "x",
                          tol: float = 1e-3) -> float:
    """Smallest growth constant whose bound dominates the measured series.

    Bisects on C; the bound is monotone increasing in C, so the result is
    the minimal dominating constant within relative tolerance `tol`.
    Raises if even a huge constant fails (the bound form cannot hold).
    """

    def dominates(c: float) -> bool:
        b = bound_h1(kind, states, spec, c, axis=axis)
        return bool(np.all(b + 1e-300 >= measured))

    t_final = float(states[-1].t)
    if t_final <= 0.0:
        raise ValueError("need a positive final time to calibrate")
    # search in units of the inverse time window so e^{C t} stays in range
    hi = 1.0 / t_final
    cap = 700.0 / t_final
    while not dominates(hi):
        hi *= 2.0
        if hi > cap:
            raise ValueError("no growth constant with e^(C T) in floating "
                             "range dominates the measured series")
    lo = 0.0
    while (hi - lo) > tol * hi:
        mid = 0.5 * (lo + hi)
        if dominates(mid):
            hi = mid
        else:
            lo = mid
    return hi


# -- moment functional ------------------------------------------------------


def moment_integral_series(states: Sequence[ProductState]) -> dict:
    """The six running integrals entering the observable-error functional.

    Keys: y_phiy, x_phix, grad_y_phiy, grad_x_phix, x_phix_grad_phiy,
    grad_phix_y_phiy; each series starts at 0 and accumulates by
    trapezoid over the sample times.
    """
    times = _times_of(states)
    nx0 = states[0].phix.norm()
    ny0 = states[0].phiy.norm()
    rows = {name: np.empty(len(states)) for name in (
        "y_phiy", "x_phix", "grad_y_phiy", "grad_x_phix",
        "x_phix_grad_phiy", "grad_phix_y_phiy")}
    for i, s in enumerate(states):
        wx = weighted_norm(s.phix, 1)
        wy = weighted_norm(s.phiy, 1)
        gx = spectral_gradient(s.phix).norm()
        gy = spectral_gradient(s.phiy).norm()
        # gradients of the weighted factors u -> u f(u)
        gyw = spectral_gradient(WaveFunction1D(
            s.phiy.grid, s.phiy.grid.points * s.phiy.values)).norm()
        gxw = spectral_gradient(WaveFunction1D(
            s.phix.grid, s.phix.grid.points * s.phix.values)).norm()
        rows["y_phiy"][i] = nx0 * wy
        rows["x_phix"][i] = ny0 * wx
        rows["grad_y_phiy"][i] = nx0 * gyw
        rows["grad_x_phix"][i] = ny0 * gxw
        rows["x_phix_grad_phiy"][i] = wx * gy
        rows["grad_phix_y_phiy"][i] = gx * wy
    return {name: _cumtrapz(times, vals) for name, vals in rows.items()}


# -- fits -------------------------------------------------------------------


def initial_slope(times: np.ndarray, series: np.ndarray,
                  n_samples: int = 3) -> float:
    """Least-squares slope through the origin over the first samples.

    Uses the first `n_samples` strictly positive times; both a measured
    error curve and a bound curve evaluated this way are comparable.
    """
    times = np.asarray(times, dtype=float)
    series = np.asarray(series, dtype=float)
    mask = times > 0.0
    t = times[mask][:n_samples]
    f = series[mask][:n_samples]
    if t.size == 0:
        raise ValueError("need at least one positive sample time")
    return float(np.dot(t, f) / np.dot(t, t))


def rate_fit(values: Sequence[float],
             errors: Sequence[float]) -> tuple:
    """Log-log least-squares fit err ~ C * value^slope; returns (slope, C).

    Needs at least three points and strictly positive data.
    """
    v = np.asarray(values, dtype=float)
    e = np.asarray(errors, dtype=float)
    if v.size < 3:
        raise ValueError("rate fit needs at least 3 points")
    if np.any(v <= 0.0) or np.any(e <= 0.0):
        raise ValueError("rate fit needs positive values and errors")
    slope, logc = np.polyfit(np.log(v), np.log(e), 1)
    return float(slope), float(np.exp(logc))


# -- reports ----------------------------------------------------------------


@dataclass
class ErrorReport:
    """Aligned time series for one approximation run, ready for CSV export."""

    times: np.ndarray
    t_scale: Optional[float] = None
    err_l2: Optional[np.ndarray] = None
    bounds: dict = field(default_factory=dict)
    norms: dict = field(default_factory=dict)
    energies: dict = field(default_factory=dict)
    observable_errors: dict = field(default_factory=dict)
    moment_integrals: dict = field(default_factory=dict)

    def columns(self) -> list:
        """Deterministic (header, series) pairs; map names are sorted."""
        cols = [("t (a.u.)", np.asarray(self.times, dtype=float))]
        if self.t_scale is not None:
            cols.append(("t_over_t1 (1)",
                         np.asarray(self.times) / self.t_scale))
        if self.err_l2 is not None:
            cols.append(("err_l2 (1)", np.asarray(self.err_l2)))
        for name in sorted(self.bounds):
            cols.append((f"bound_{name} (1)", np.asarray(self.bounds[name])))
        for name in sorted(self.norms):
            cols.append((f"norm_{name} (1)", np.asarray(self.norms[name])))
        for name in sorted(self.energies):
            cols.append((f"energy_{name} (hartree)",
                         np.asarray(self.energies[name])))
        for name in sorted(self.observable_errors):
            cols.append((f"obs_err_{name} (1)",
                         np.asarray(self.observable_errors[name])))
        for name in sorted(self.moment_integrals):
            cols.append((f"integral_{name} (a.u.)",
                         np.asarray(self.moment_integrals[name])))
        n = len(self.times)
        for header, series in cols:
            if series.shape != (n,):
                raise ValueError(f"column {header!r} has length "
                                 f"{series.shape}, expected ({n},)")
        return cols


def write_report_csv(report: ErrorReport, path) -> None:
    """Write the report with full double precision, deterministically."""
    cols = report.columns()
    lines = [",".join(header for header, _ in cols)]
    n = len(report.times)
    for i in range(n):
        lines.append(",".join("%.17g" % col[i] for _, col in cols))
    with open(path, "w", newline="") as fh:
        fh.write("\n".join(lines) + "\n")


def read_csv_columns(path) -> tuple:
    """Read back a report CSV: (header list, array of shape (rows, cols))."""
    with open(path) as fh:
        lines = [ln for ln in fh.read().splitlines() if ln]
    headers = lines[0].split(",")
    data = np.asarray([[float(v) for v in ln.split(",")]
                       for ln in lines[1:]], dtype=float)
    return headers, data
