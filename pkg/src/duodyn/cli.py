"""Configuration-driven experiment runner.

A single INI-style config file selects the model (named preset or explicit
potentials), the approximation methods, grids and time stepping; `run`
propagates everything, measures errors against the reference, evaluates
the requested a-priori bounds and writes one CSV report per method plus a
JSON manifest of every resolved parameter. `sweep` repeats a run over a
parameter list. Exit codes: 0 success, 2 validation failure, 3 numerical
abort.

The config schema is documented in docs/config.md; `duodyn run` also
accepts a manifest.json from a previous run and reproduces it.
"""

from __future__ import annotations

import argparse
import configparser
import json
import math
import re
import struct
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

import numpy as np

from . import __version__
from .analysis import (ErrorReport, QuadraticObservable, bound_flat_l2,
                       bound_gradient_free, bound_h1, l2_error_series,
                       moment_integral_series, observable_error_series,
                       rate_fit, write_report_csv)
from .factorized import (assemble_trajectory, bruteforce_energy,
                         meanfield_energy, pick_collocation,
                         propagate_bruteforce, propagate_meanfield)
from .model import (Coupling, HarmonicGround, ModelSpec, Potential1D,
                    WavePacket, initial_product, preset, preset_names)
from .numerics import WaveFunction2D, boundary_mass_2d, make_grid
from .reference import (PropagationConfig, PropagationError,
                        propagate_reference)
from .semiclassical import (DEFAULT_Z_GRID, Variant,
                            assemble_semiclassical_trajectory,
                            make_wavepacket, propagate_wavepacket)

METHOD_NAMES = ("reference", "bruteforce", "meanfield",
                "semiclassical_taylor", "semiclassical_averaged")
BOUND_NAMES = ("grad_y", "grad_x_grad_y", "weighted", "gradient_free", "h1")
SWEEP_PARAMETERS = ("epsilon", "eta", "preset")
SNAPSHOT_MAGIC = b"DUOWF2\x00\x00"
BOUNDARY_MASS_DIAGNOSTIC = 1e-12

EXIT_OK = 0
EXIT_INVALID = 2
EXIT_NUMERICAL = 3


# -- config text parsing ----------------------------------------------------


def _parse_kwargs(text: str) -> dict:
    """Parse "k=1.0, l=4" into a float-valued dict."""
    out: dict = {}
    text = text.strip()
    if not text:
        return out
    for part in text.split(","):
        if "=" not in part:
            raise ValueError(f"expected name=value, got {part.strip()!r}")
        name, value = part.split("=", 1)
        out[name.strip()] = float(value.strip())
    return out


_CALL_RE = re.compile(r"^([a-z_0-9]+)\s*(?:\((.*)\))?$", re.DOTALL)


def _parse_call(text: str) -> tuple:
    m = _CALL_RE.match(text.strip())
    if not m:
        raise ValueError(f"cannot parse {text!r}")
    return m.group(1), (m.group(2) or "")


def parse_potential(text: str) -> Potential1D:
    """Potential from config text: zero, harmonic(k=..), quartic(k4=..),
    harmonic_quartic(k2=.., k4=..), double_well(k=.., l=..)."""
    name, argtext = _parse_call(text)
    args = _parse_kwargs(argtext)
    builders = {
        "zero": (Potential1D.zero, ()),
        "harmonic": (Potential1D.harmonic, ("k",)),
        "quartic": (Potential1D.quartic, ("k4",)),
        "harmonic_quartic": (Potential1D.harmonic_quartic, ("k2", "k4")),
        "double_well": (Potential1D.double_well, ("k", "l")),
    }
    if name not in builders:
        raise ValueError(f"unknown potential {name!r}")
    fn, wanted = builders[name]
    missing = [w for w in wanted if w not in args]
    extra = [a for a in args if a not in wanted]
    if missing or extra:
        raise ValueError(f"potential {name!r} takes {wanted}, got {args}")
    return fn(*(args[w] for w in wanted))


_PRODUCT_W1 = {
    "cos": (np.cos, lambda x: -np.sin(x), 1.0, 1.0),
    "sin": (np.sin, np.cos, 1.0, 1.0),
    "gauss": (lambda x: np.exp(-0.5 * x**2),
              lambda x: -x * np.exp(-0.5 * x**2), 1.0, math.exp(-0.5)),
    "linear": (lambda x: np.asarray(x, dtype=float),
               lambda x: np.ones_like(np.asarray(x, dtype=float)),
               math.inf, 1.0),
}
_PRODUCT_W2 = {
    "linear": (lambda y: np.asarray(y, dtype=float),
               lambda y: np.ones_like(np.asarray(y, dtype=float)), 1.0),
    "square": (lambda y: np.asarray(y, dtype=float) ** 2,
               lambda y: 2.0 * np.asarray(y, dtype=float), math.inf),
}


def parse_coupling(text: str) -> Coupling:
    """Coupling from config text: none, cubic(eta=..), or
    product(w1=<cos|sin|gauss|linear>, w2=<linear|square>, eta=..)."""
    name, argtext = _parse_call(text)
    if name == "none":
        if argtext.strip():
            raise ValueError("coupling none takes no arguments")
        return Coupling.none()
    if name == "cubic":
        args = _parse_kwargs(argtext)
        if set(args) != {"eta"}:
            raise ValueError(f"coupling cubic takes eta, got {args}")
        return Coupling.cubic(args["eta"])
    if name == "product":
        parts: dict = {}
        for part in argtext.split(","):
            if "=" not in part:
                raise ValueError(f"expected name=value, got {part.strip()!r}")
            k, v = part.split("=", 1)
            parts[k.strip()] = v.strip()
        if set(parts) != {"w1", "w2", "eta"}:
            raise ValueError("coupling product takes w1, w2, eta")
        if parts["w1"] not in _PRODUCT_W1:
            raise ValueError(f"unknown w1 factor {parts['w1']!r}")
        if parts["w2"] not in _PRODUCT_W2:
            raise ValueError(f"unknown w2 factor {parts['w2']!r}")
        eta = float(parts["eta"])
        f1, d1, sup1, dsup1 = _PRODUCT_W1[parts["w1"]]
        f2, d2, dsup2 = _PRODUCT_W2[parts["w2"]]
        grad_y_sup = None
        if math.isfinite(sup1) and math.isfinite(dsup2):
            grad_y_sup = abs(eta) * sup1 * dsup2
        grad_xy_sup = None
        if math.isfinite(dsup1) and math.isfinite(dsup2):
            grad_xy_sup = abs(eta) * dsup1 * dsup2
        return Coupling.product(
            w1=lambda x, _f=f1, _e=eta: _e * _f(np.asarray(x, dtype=float)),
            w2=f2,
            w1_d1=lambda x, _d=d1, _e=eta: _e * _d(np.asarray(x, dtype=float)),
            w2_d1=d2,
            grad_y_sup=grad_y_sup, grad_xy_sup=grad_xy_sup,
            label=f"product(w1={parts['w1']}, w2={parts['w2']}, eta={eta!r})")
    raise ValueError(f"unknown coupling {name!r}")


def _parse_grid_text(text: str) -> tuple:
    parts = [p.strip() for p in text.split(",")]
    if len(parts) != 3:
        raise ValueError(f"grid must be 'min, max, n', got {text!r}")
    return float(parts[0]), float(parts[1]), int(parts[2])


def _parse_bool(text: str) -> bool:
    t = text.strip().lower()
    if t in ("1", "true", "yes", "on"):
        return True
    if t in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"expected a boolean, got {text!r}")


def _fmt(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return "%.17g" % value
    return str(value)


# -- resolved configuration ---------------------------------------------------


@dataclass
class RunConfig:
    """Fully resolved run description; `resolved` mirrors it as strings."""

    spec: Optional[ModelSpec] = None
    preset_name: Optional[str] = None
    t_scale: Optional[float] = None
    grid_x: Optional[tuple] = None
    grid_y: Optional[tuple] = None
    grid_z: tuple = DEFAULT_Z_GRID
    dt: float = 0.0
    t_final: float = 0.0
    sample_every: int = 1
    methods: tuple = ()
    initial_kind: str = "harmonic_ground"
    center: tuple = (0.0, 0.0)
    q0: float = 0.0
    p0: float = 0.0
    observables: dict = field(default_factory=dict)
    bounds: tuple = ()
    sigma_x: float = 1.0
    sigma_y: float = 1.0
    h1_constant: Optional[float] = None
    collocation: Optional[tuple] = None
    output_dir: str = "out"
    snapshot: bool = False
    sweep_parameter: Optional[str] = None
    sweep_values: tuple = ()
    resolved: dict = field(default_factory=dict)


def load_raw_config(path) -> dict:
    """Read an INI config (or a manifest JSON) into {section: {key: str}}."""
    path = Path(path)
    if path.suffix.lower() == ".json":
        with open(path) as fh:
            manifest = json.load(fh)
        config = manifest.get("config")
        if not isinstance(config, dict):
            raise ValueError(f"{path} has no 'config' object")
        return {str(sec): {str(k): str(v) for k, v in kv.items()}
                for sec, kv in config.items()}
    parser = configparser.ConfigParser(inline_comment_prefixes=(";", "#"))
    with open(path) as fh:
        parser.read_file(fh, source=str(path))
    return {sec: dict(parser.items(sec)) for sec in parser.sections()}


def resolve_config(raw: dict) -> tuple:
    """Resolve defaults and parse values: returns (RunConfig, diagnostics).

    Diagnostics name the offending section and key; an empty list means
    the config is runnable.
    """
    cfg = RunConfig()
    diags: list = []
    known = {"model", "grids", "time", "initial", "methods", "observables",
             "bounds", "output", "sweep"}
    for sec in raw:
        if sec not in known:
            diags.append(f"[{sec}]: unknown section")

    def note(section: str, key: str, value) -> None:
        cfg.resolved.setdefault(section, {})[key] = _fmt(value)

    model = dict(raw.get("model", {}))
    grids = dict(raw.get("grids", {}))
    timing = dict(raw.get("time", {}))

    pre = None
    if "preset" in model:
        name = model.pop("preset").strip().lower()
        if model:
            diags.append(f"[model]: preset does not combine with "
                         f"{sorted(model)}")
        try:
            pre = preset(name)
        except KeyError as exc:
            diags.append(f"[model] preset: {exc.args[0]}")
        if pre is not None:
            cfg.spec = pre.model
            cfg.preset_name = pre.name
            cfg.t_scale = pre.t1
            note("model", "preset", pre.name)
            cfg.grid_x = pre.grid_x
            cfg.grid_y = pre.grid_y
            cfg.dt = pre.config.dt
            cfg.t_final = pre.config.t_final
            cfg.sample_every = pre.config.sample_every
    else:
        v1 = v2 = coup = None
        epsilon = 1.0
        k4 = 0.0
        try:
            v1 = parse_potential(model.get("v1", "zero"))
        except ValueError as exc:
            diags.append(f"[model] v1: {exc}")
        try:
            v2 = parse_potential(model.get("v2", "zero"))
        except ValueError as exc:
            diags.append(f"[model] v2: {exc}")
        try:
            coup = parse_coupling(model.get("coupling", "none"))
        except ValueError as exc:
            diags.append(f"[model] coupling: {exc}")
        try:
            epsilon = float(model.get("epsilon", "1.0"))
        except ValueError as exc:
            diags.append(f"[model] epsilon: {exc}")
        try:
            k4 = float(model.get("k4", "0.0"))
        except ValueError as exc:
            diags.append(f"[model] k4: {exc}")
        unknown = sorted(set(model) - {"v1", "v2", "coupling", "epsilon",
                                       "k4", "mass1", "mass2"})
        if unknown:
            diags.append(f"[model]: unknown keys {unknown}")
        if v1 is not None and v2 is not None and coup is not None:
            try:
                cfg.spec = ModelSpec(
                    v1=v1, v2=v2, coupling=coup, epsilon=epsilon,
                    mass1=float(model.get("mass1", "1.0")),
                    mass2=float(model.get("mass2", "1.0")), k4=k4)
            except ValueError as exc:
                diags.append(f"[model]: {exc}")
        if cfg.spec is not None:
            note("model", "v1", cfg.spec.v1.label)
            note("model", "v2", cfg.spec.v2.label)
            note("model", "coupling", cfg.spec.coupling.label)
            note("model", "epsilon", cfg.spec.epsilon)
            note("model", "mass1", cfg.spec.mass1)
            note("model", "mass2", cfg.spec.mass2)
            if cfg.spec.k4 != 0.0:
                note("model", "k4", cfg.spec.k4)

    # grids: presets provide defaults, explicit models require x and y
    for axis in ("x", "y", "z"):
        if axis in grids:
            try:
                setattr(cfg, f"grid_{axis}", _parse_grid_text(grids[axis]))
            except ValueError as exc:
                diags.append(f"[grids] {axis}: {exc}")
        elif axis != "z" and getattr(cfg, f"grid_{axis}") is None:
            diags.append(f"[grids] {axis}: required without a preset")
    for axis in ("x", "y", "z"):
        g = getattr(cfg, f"grid_{axis}")
        if g is None:
            continue
        try:
            make_grid(*g)
        except ValueError as exc:
            diags.append(f"[grids] {axis}: {exc}")
            setattr(cfg, f"grid_{axis}", None)
        else:
            note("grids", axis, "%s, %s, %d" % (_fmt(g[0]), _fmt(g[1]), g[2]))

    # time stepping
    for key, cast in (("dt", float), ("t_final", float),
                      ("sample_every", int)):
        if key in timing:
            try:
                setattr(cfg, key, cast(timing[key]))
            except ValueError as exc:
                diags.append(f"[time] {key}: {exc}")
    if cfg.dt <= 0.0:
        diags.append("[time] dt: must be positive (presets provide a "
                     "default, explicit models must set it)")
    elif cfg.t_final < cfg.dt:
        diags.append("[time] t_final: must be at least dt")
    else:
        if "sample_every" not in timing and pre is None:
            cfg.sample_every = max(1, round(cfg.t_final / cfg.dt) // 100)
        if cfg.sample_every < 1:
            diags.append("[time] sample_every: must be >= 1")
        else:
            note("time", "dt", cfg.dt)
            note("time", "t_final", cfg.t_final)
            note("time", "sample_every", cfg.sample_every)

    # methods
    methods_text = raw.get("methods", {}).get("run", "reference, meanfield")
    methods = tuple(m.strip().lower() for m in methods_text.split(",")
                    if m.strip())
    bad = [m for m in methods if m not in METHOD_NAMES]
    if bad:
        diags.append(f"[methods] run: unknown methods {bad}; choose from "
                     f"{list(METHOD_NAMES)}")
    cfg.methods = tuple(m for m in METHOD_NAMES if m in methods)
    note("methods", "run", ", ".join(cfg.methods))

    # initial state
    initial = dict(raw.get("initial", {}))
    cfg.initial_kind = initial.get("kind", "harmonic_ground").strip().lower()
    if cfg.initial_kind not in ("harmonic_ground", "wave_packet"):
        diags.append(f"[initial] kind: unknown kind {cfg.initial_kind!r}")
    for key in ("center_x", "center_y", "q0", "p0"):
        if key in initial:
            try:
                val = float(initial[key])
            except ValueError as exc:
                diags.append(f"[initial] {key}: {exc}")
                continue
            if key == "center_x":
                cfg.center = (val, cfg.center[1])
            elif key == "center_y":
                cfg.center = (cfg.center[0], val)
            else:
                setattr(cfg, key, val)
    note("initial", "kind", cfg.initial_kind)
    if cfg.initial_kind == "harmonic_ground":
        note("initial", "center_x", cfg.center[0])
        note("initial", "center_y", cfg.center[1])
    else:
        note("initial", "q0", cfg.q0)
        note("initial", "p0", cfg.p0)

    # observables: every key is a named polynomial symbol
    for name, symbol in raw.get("observables", {}).items():
        try:
            QuadraticObservable.parse(symbol)
        except ValueError as exc:
            diags.append(f"[observables] {name}: {exc}")
            continue
        cfg.observables[name] = symbol.strip()
        note("observables", name, symbol.strip())

    # bounds
    bounds = dict(raw.get("bounds", {}))
    if "evaluate" in bounds:
        wanted = tuple(b.strip().lower() for b in bounds["evaluate"].split(",")
                       if b.strip())
        bad = [b for b in wanted if b not in BOUND_NAMES]
        if bad:
            diags.append(f"[bounds] evaluate: unknown bounds {bad}; choose "
                         f"from {list(BOUND_NAMES)}")
        cfg.bounds = tuple(b for b in BOUND_NAMES if b in wanted)
    for key in ("sigma_x", "sigma_y", "h1_constant"):
        if key in bounds:
            try:
                setattr(cfg, key, float(bounds[key]))
            except ValueError as exc:
                diags.append(f"[bounds] {key}: {exc}")
    if "collocation" in bounds:
        text = bounds["collocation"].strip().lower()
        if text == "auto":
            cfg.collocation = None
        else:
            try:
                x0, y0 = (float(p) for p in text.split(","))
                cfg.collocation = (x0, y0)
            except ValueError:
                diags.append("[bounds] collocation: expected 'auto' or "
                             "'x0, y0'")
    if "h1" in cfg.bounds and cfg.h1_constant is None:
        diags.append("[bounds] h1_constant: required when the h1 bound is "
                     "evaluated")
    if cfg.bounds:
        note("bounds", "evaluate", ", ".join(cfg.bounds))
        note("bounds", "sigma_x", cfg.sigma_x)
        note("bounds", "sigma_y", cfg.sigma_y)
        if cfg.h1_constant is not None:
            note("bounds", "h1_constant", cfg.h1_constant)
        note("bounds", "collocation",
             "auto" if cfg.collocation is None
             else "%s, %s" % (_fmt(cfg.collocation[0]),
                              _fmt(cfg.collocation[1])))

    # output
    output = dict(raw.get("output", {}))
    cfg.output_dir = output.get("directory", "out").strip()
    if "snapshot" in output:
        try:
            cfg.snapshot = _parse_bool(output["snapshot"])
        except ValueError as exc:
            diags.append(f"[output] snapshot: {exc}")
    note("output", "directory", cfg.output_dir)
    note("output", "snapshot", cfg.snapshot)

    # sweep
    sweep = dict(raw.get("sweep", {}))
    if sweep:
        cfg.sweep_parameter = sweep.get("parameter", "").strip().lower()
        if cfg.sweep_parameter not in SWEEP_PARAMETERS:
            diags.append(f"[sweep] parameter: choose from "
                         f"{list(SWEEP_PARAMETERS)}")
        values_text = sweep.get("values", "")
        values = tuple(v.strip() for v in values_text.split(",") if v.strip())
        if not values:
            diags.append("[sweep] values: at least one value required")
        if cfg.sweep_parameter in ("epsilon", "eta"):
            try:
                cfg.sweep_values = tuple(float(v) for v in values)
            except ValueError as exc:
                diags.append(f"[sweep] values: {exc}")
        else:
            cfg.sweep_values = values
        note("sweep", "parameter", cfg.sweep_parameter)
        note("sweep", "values", ", ".join(_fmt(v) for v in cfg.sweep_values))

    diags.extend(_semantic_diagnostics(cfg))
    return cfg, diags


def _semantic_diagnostics(cfg: RunConfig) -> list:
    """Cross-field rules checked after parsing."""
    diags: list = []
    if cfg.spec is None or cfg.grid_x is None or cfg.grid_y is None:
        return diags
    spec = cfg.spec
    semicl = [m for m in cfg.methods if m.startswith("semiclassical")]
    approx = [m for m in cfg.methods if m != "reference"]
    if semicl and spec.epsilon >= 1.0:
        diags.append("[methods] run: semiclassical methods require a scaled "
                     "model (epsilon < 1)")
    if semicl and cfg.initial_kind != "wave_packet":
        diags.append("[initial] kind: semiclassical methods require "
                     "wave_packet initial data")
    if cfg.initial_kind == "wave_packet" and spec.epsilon >= 1.0:
        diags.append("[initial] kind: wave_packet initial data requires "
                     "epsilon < 1")
    if (cfg.observables or cfg.bounds) and approx \
            and "reference" not in cfg.methods:
        diags.append("[methods] run: reference is required when error or "
                     "bound output is requested")
    if cfg.bounds and not ({"bruteforce", "meanfield"} & set(cfg.methods)):
        diags.append("[bounds] evaluate: bounds apply to the factorized "
                     "methods; add bruteforce or meanfield")
    if spec.epsilon < 1.0 and cfg.dt > 0.25 * spec.epsilon:
        diags.append(f"[time] dt: {cfg.dt:g} cannot resolve the "
                     f"epsilon-scale phase; need dt <= {0.25 * spec.epsilon:g}")
    if semicl and abs(cfg.p0) > 1e-12 and cfg.grid_y is not None:
        gy = make_grid(*cfg.grid_y)
        need = 2.0 * math.pi * spec.epsilon / abs(cfg.p0) / 8.0
        if gy.spacing > need:
            diags.append(f"[grids] y: spacing {gy.spacing:g} cannot resolve "
                         f"the carrier wave at p0={cfg.p0:g}; need <= "
                         f"{need:g}")
    if cfg.initial_kind == "harmonic_ground" or spec.epsilon < 1.0:
        try:
            gx = make_grid(*cfg.grid_x)
            gy = make_grid(*cfg.grid_y)
            kind = (HarmonicGround(center=cfg.center)
                    if cfg.initial_kind == "harmonic_ground"
                    else WavePacket(q0=cfg.q0, p0=cfg.p0))
            phix0, phiy0 = initial_product(spec, gx, gy, kind)
            psi0 = WaveFunction2D(gx, gy, np.outer(phix0.values,
                                                   phiy0.values))
            bm = boundary_mass_2d(psi0)
            if bm > BOUNDARY_MASS_DIAGNOSTIC:
                diags.append(f"[grids]: initial state leaks {bm:.2e} of its "
                             "mass into the outermost cells; enlarge the box")
        except ValueError as exc:
            diags.append(f"[initial]: {exc}")
    return diags


# -- snapshots ----------------------------------------------------------------


def write_snapshot(path, wf: WaveFunction2D) -> None:
    """Binary state dump: 8-byte magic, little-endian uint32 nx and ny,
    then row-major little-endian complex128 pairs."""
    nx, ny = wf.values.shape
    with open(path, "wb") as fh:
        fh.write(SNAPSHOT_MAGIC)
        fh.write(struct.pack("<II", nx, ny))
        fh.write(np.ascontiguousarray(wf.values).astype("<c16").tobytes())


def read_snapshot(path) -> np.ndarray:
    with open(path, "rb") as fh:
        header = fh.read(16)
        if len(header) != 16 or header[:8] != SNAPSHOT_MAGIC:
            raise ValueError(f"{path} is not a state snapshot")
        nx, ny = struct.unpack("<II", header[8:])
        data = np.frombuffer(fh.read(), dtype="<c16")
    if data.size != nx * ny:
        raise ValueError(f"{path}: expected {nx * ny} values, "
                         f"found {data.size}")
    return data.reshape(nx, ny).astype(np.complex128)


# -- execution ----------------------------------------------------------------


def _reference_report(cfg: RunConfig, ref) -> ErrorReport:
    return ErrorReport(times=ref.times, t_scale=cfg.t_scale,
                       norms={"reference": ref.norms},
                       energies={"reference": ref.energies})


def _bound_series(cfg: RunConfig, kind: str, states, spec, collocation):
    out = {}
    for name in cfg.bounds:
        if name == "gradient_free":
            out[name] = bound_gradient_free(states, spec, kind=kind,
                                            collocation=collocation)
        elif name == "h1":
            out[name] = bound_h1(kind, states, spec, cfg.h1_constant,
                                 axis="x")
        else:
            out[name] = bound_flat_l2(kind, name, states, spec,
                                      sigma_x=cfg.sigma_x,
                                      sigma_y=cfg.sigma_y)
    return out


def execute(cfg: RunConfig, out_dir: Optional[Path] = None) -> dict:
    """Run all configured methods; returns {method: final err or None}.

    Writes per-method CSVs (plus snapshots when enabled) and manifest.json
    into the output directory. Raises PropagationError on numerical
    aborts.
    """
    started = time.time()
    out_dir = Path(out_dir if out_dir is not None else cfg.output_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    spec = cfg.spec
    gx = make_grid(*cfg.grid_x)
    gy = make_grid(*cfg.grid_y)
    pcfg = PropagationConfig(dt=cfg.dt, t_final=cfg.t_final,
                             sample_every=cfg.sample_every)
    kind = (HarmonicGround(center=cfg.center)
            if cfg.initial_kind == "harmonic_ground"
            else WavePacket(q0=cfg.q0, p0=cfg.p0))
    phix0, phiy0 = initial_product(spec, gx, gy, kind)
    psi0 = WaveFunction2D(gx, gy, np.outer(phix0.values, phiy0.values))

    observables = {
        name: QuadraticObservable.parse(
            symbol,
            scaling="semiclassical" if spec.epsilon < 1.0 else "standard",
            epsilon=spec.epsilon)
        for name, symbol in cfg.observables.items()}
    collocation = cfg.collocation
    if collocation is None:
        collocation = pick_collocation(spec, gx, gy)

    outputs: list = []
    summary: dict = {}

    ref = None
    if "reference" in cfg.methods:
        ref = propagate_reference(spec, psi0, pcfg)
        path = out_dir / "reference.csv"
        write_report_csv(_reference_report(cfg, ref), path)
        outputs.append(path.name)
        if cfg.snapshot:
            write_snapshot(out_dir / "reference.state", ref.final)
            outputs.append("reference.state")
        summary["reference"] = None

    for method in cfg.methods:
        if method == "reference":
            continue
        if method == "bruteforce":
            states = propagate_bruteforce(spec, (phix0, phiy0), pcfg,
                                          collocation=collocation)
            traj = assemble_trajectory(states)
            energies = {"bruteforce": np.asarray(
                [bruteforce_energy(spec, s, collocation) for s in states])}
            bounds = _bound_series(cfg, "bruteforce", states, spec,
                                   collocation)
            integrals = moment_integral_series(states)
        elif method == "meanfield":
            states = propagate_meanfield(spec, (phix0, phiy0), pcfg)
            traj = assemble_trajectory(states)
            energies = {"meanfield": np.asarray(
                [meanfield_energy(spec, s) for s in states])}
            bounds = _bound_series(cfg, "meanfield", states, spec,
                                   collocation)
            integrals = moment_integral_series(states)
        else:
            variant = (Variant.TAYLOR if method.endswith("taylor")
                       else Variant.AVERAGED)
            gz = make_grid(*cfg.grid_z)
            wp0 = make_wavepacket(spec, gx, gz, q0=cfg.q0, p0=cfg.p0)
            wps = propagate_wavepacket(spec, wp0, pcfg, variant)
            try:
                traj = assemble_semiclassical_trajectory(wps, gy)
            except ValueError as exc:
                raise PropagationError(str(exc)) from exc
            energies = {}
            bounds = {}
            integrals = {}
        report = ErrorReport(times=traj.times, t_scale=cfg.t_scale,
                             bounds=bounds, energies=energies,
                             norms={method: traj.norms},
                             moment_integrals=integrals)
        if ref is not None:
            report.err_l2 = l2_error_series(ref, traj)
            report.observable_errors = {
                name: observable_error_series(ref, traj, obs)
                for name, obs in observables.items()}
            summary[method] = float(report.err_l2[-1])
        else:
            summary[method] = None
        path = out_dir / f"{method}.csv"
        write_report_csv(report, path)
        outputs.append(path.name)
        if cfg.snapshot:
            write_snapshot(out_dir / f"{method}.state", traj.final)
            outputs.append(f"{method}.state")

    manifest = {
        "format": "duodyn-manifest-v1",
        "duodyn_version": __version__,
        "python": sys.version.split()[0],
        "numpy": np.__version__,
        "wall_clock_seconds": round(time.time() - started, 3),
        "config": cfg.resolved,
        "model": {
            "v1": spec.v1.label,
            "v2": spec.v2.label,
            "coupling": spec.coupling.label,
            "epsilon": _fmt(spec.epsilon),
            "mass1": _fmt(spec.mass1),
            "mass2": _fmt(spec.mass2),
            "collocation": "%s, %s" % (_fmt(collocation[0]),
                                       _fmt(collocation[1])),
        },
        "outputs": outputs,
    }
    with open(out_dir / "manifest.json", "w") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return summary


# -- sweep ---------------------------------------------------------------------


def _value_label(parameter: str, value) -> str:
    if isinstance(value, float):
        return f"{parameter}_{value:g}"
    return f"{parameter}_{value}"


def derive_point_config(raw: dict, parameter: str, value) -> dict:
    """Raw config for one sweep point: override the swept parameter and
    drop the sweep section."""
    point = {sec: dict(kv) for sec, kv in raw.items()}
    point.pop("sweep", None)
    model = point.setdefault("model", {})
    if parameter == "preset":
        model.clear()
        model["preset"] = str(value)
    elif parameter == "epsilon":
        model["epsilon"] = _fmt(float(value))
    else:
        coupling = model.get("coupling", "")
        new, n = re.subn(r"eta\s*=\s*[^,)]+", f"eta={_fmt(float(value))}",
                         coupling)
        if n != 1:
            raise ValueError("eta sweep needs a coupling with an eta "
                             "argument (cubic or product)")
        model["coupling"] = new
    return point


def sweep_diagnostics(raw: dict, cfg: RunConfig) -> list:
    """Extra validation for `sweep`: each derived point must validate."""
    diags: list = []
    if cfg.sweep_parameter is None:
        diags.append("[sweep]: section required for the sweep command")
        return diags
    if cfg.sweep_parameter not in SWEEP_PARAMETERS or not cfg.sweep_values:
        return diags  # already diagnosed during resolution
    for value in cfg.sweep_values:
        label = _value_label(cfg.sweep_parameter, value)
        try:
            point = derive_point_config(raw, cfg.sweep_parameter, value)
        except ValueError as exc:
            diags.append(f"[sweep] {label}: {exc}")
            continue
        _, point_diags = resolve_config(point)
        diags.extend(f"[sweep] {label}: {d}" for d in point_diags)
    return diags


def _sweep_worker(args) -> dict:
    point_raw, out_dir, snapshot = args
    cfg, diags = resolve_config(point_raw)
    if diags:
        raise ValueError("; ".join(diags))
    cfg.snapshot = cfg.snapshot or snapshot
    return execute(cfg, Path(out_dir))


def run_sweep(raw: dict, cfg: RunConfig, out_dir: Path,
              jobs: int = 1, snapshot: bool = False) -> None:
    """Run every sweep point, then write summary.csv (+ rates.csv)."""
    out_dir.mkdir(parents=True, exist_ok=True)
    points = []
    for value in cfg.sweep_values:
        label = _value_label(cfg.sweep_parameter, value)
        point = derive_point_config(raw, cfg.sweep_parameter, value)
        points.append((value, label, point))
    tasks = [(point, str(out_dir / label), snapshot)
             for _, label, point in points]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            summaries = list(pool.map(_sweep_worker, tasks))
    else:
        summaries = [_sweep_worker(t) for t in tasks]

    methods = [m for m in cfg.methods if m != "reference"]
    lines = [",".join([f"{cfg.sweep_parameter} (1)"]
                      + [f"err_{m} (1)" for m in methods])]
    for (value, label, _), summary in zip(points, summaries):
        head = _fmt(value) if isinstance(value, float) else str(value)
        cells = [head]
        for m in methods:
            err = summary.get(m)
            cells.append("%.17g" % err if err is not None else "nan")
        lines.append(",".join(cells))
    with open(out_dir / "summary.csv", "w", newline="") as fh:
        fh.write("\n".join(lines) + "\n")
    print(f"sweep: wrote {out_dir / 'summary.csv'}")

    numeric = all(isinstance(v, float) for v in cfg.sweep_values)
    if numeric and len(points) >= 3:
        rate_lines = ["method,slope (1),prefactor (1)"]
        for m in methods:
            errs = [s.get(m) for s in summaries]
            if any(e is None or e <= 0.0 for e in errs):
                continue
            slope, prefactor = rate_fit([v for v, _, _ in points], errs)
            rate_lines.append("%s,%.17g,%.17g" % (m, slope, prefactor))
        if len(rate_lines) > 1:
            with open(out_dir / "rates.csv", "w", newline="") as fh:
                fh.write("\n".join(rate_lines) + "\n")
            print(f"sweep: wrote {out_dir / 'rates.csv'}")


# -- commands -------------------------------------------------------------------


def _load_and_resolve(path) -> tuple:
    try:
        raw = load_raw_config(path)
    except (OSError, ValueError, configparser.Error) as exc:
        return None, None, [f"config: {exc}"]
    cfg, diags = resolve_config(raw)
    return raw, cfg, diags


def _print_diags(diags) -> None:
    for d in diags:
        print(f"invalid: {d}", file=sys.stderr)


def cmd_run(args) -> int:
    _, cfg, diags = _load_and_resolve(args.config)
    if diags:
        _print_diags(diags)
        return EXIT_INVALID
    if args.output_dir is not None:
        cfg.output_dir = args.output_dir
        cfg.resolved["output"]["directory"] = args.output_dir
    if args.snapshot:
        cfg.snapshot = True
        cfg.resolved["output"]["snapshot"] = "true"
    try:
        summary = execute(cfg)
    except PropagationError as exc:
        print(f"numerical abort: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    for method, err in summary.items():
        if err is None:
            print(f"{method}: done")
        else:
            print(f"{method}: err_l2(t_final) = {err:.6e}")
    print(f"outputs in {cfg.output_dir}")
    return EXIT_OK


def cmd_validate(args) -> int:
    _, _, diags = _load_and_resolve(args.config)
    if diags:
        _print_diags(diags)
        return EXIT_INVALID
    print("config is valid")
    return EXIT_OK


def cmd_presets(_args) -> int:
    header = (f"{'name':<8} {'epsilon':>8} {'varpi':>10} {'eta':>14} "
              f"{'sigma2':>9} {'t1 (a.u.)':>10} {'dt':>10} {'t_final':>9}")
    print(header)
    for name in preset_names():
        p = preset(name)
        print(f"{p.name:<8} {p.mass_ratio_epsilon:>8.4f} {p.varpi:>10.6g} "
              f"{p.eta:>14.8g} {p.sigma2:>9.5f} {p.t1:>10.4f} "
              f"{p.config.dt:>10.5f} {p.config.t_final:>9.1f}")
    return EXIT_OK


def cmd_sweep(args) -> int:
    raw, cfg, diags = _load_and_resolve(args.config)
    if not diags:
        diags = sweep_diagnostics(raw, cfg)
    if diags:
        _print_diags(diags)
        return EXIT_INVALID
    out_dir = Path(args.output_dir if args.output_dir is not None
                   else cfg.output_dir)
    try:
        run_sweep(raw, cfg, out_dir, jobs=args.jobs, snapshot=args.snapshot)
    except PropagationError as exc:
        print(f"numerical abort: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="duodyn",
        description="Coupled-subsystem quantum dynamics experiment runner")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    run_p = sub.add_parser("run", help="run one configured experiment")
    run_p.add_argument("config", help="INI config or manifest.json to rerun")
    run_p.add_argument("--output-dir", default=None)
    run_p.add_argument("--snapshot", action="store_true",
                       help="also dump final states as binary snapshots")
    run_p.set_defaults(fn=cmd_run)

    val_p = sub.add_parser("validate", help="check a config without running")
    val_p.add_argument("config")
    val_p.set_defaults(fn=cmd_validate)

    pre_p = sub.add_parser("presets", help="list the named model presets")
    pre_p.set_defaults(fn=cmd_presets)

    sw_p = sub.add_parser("sweep", help="run a parameter sweep")
    sw_p.add_argument("config")
    sw_p.add_argument("--jobs", type=int, default=1,
                      help="concurrent sweep points")
    sw_p.add_argument("--output-dir", default=None)
    sw_p.add_argument("--snapshot", action="store_true")
    sw_p.set_defaults(fn=cmd_sweep)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.fn(args)


if __name__ == "__main__":
    sys.exit(main())
