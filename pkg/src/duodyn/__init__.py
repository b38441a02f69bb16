"""Coupled two-subsystem quantum dynamics: reference propagation, factorized
approximations (collocated and mean-field), semiclassical wave packets, and
computable error bounds."""

__version__ = "0.1.0"

from .numerics import (
    Grid1D,
    WaveFunction1D,
    WaveFunction2D,
    make_grid,
    inner_product,
    moment,
    spectral_gradient,
)
from .model import (
    Potential1D,
    Coupling,
    ModelSpec,
    PhysicalParams,
    rescale,
    inverse_rescale,
    preset,
    preset_names,
    HarmonicGround,
    WavePacket,
    initial_product,
)
from .reference import (
    PropagationConfig,
    Trajectory2D,
    PropagationError,
    propagate_reference,
    energy,
)
from .factorized import (
    ProductState,
    pick_collocation,
    propagate_bruteforce,
    partial_averages,
    propagate_meanfield,
    assemble,
    assemble_trajectory,
    bruteforce_energy,
    meanfield_energy,
)
from .semiclassical import (
    Variant,
    WavePacketState,
    make_wavepacket,
    propagate_wavepacket,
    assemble_semiclassical,
    assemble_semiclassical_trajectory,
)
from .analysis import (
    QuadraticObservable,
    ErrorReport,
    l2_error_series,
    phase_aligned_l2_series,
    observable_error_series,
    bound_flat_l2,
    bound_best_flat_l2,
    bound_gradient_free,
    bound_h1,
    calibrate_h1_constant,
    moment_integral_series,
    rate_fit,
    write_report_csv,
    read_csv_columns,
)
