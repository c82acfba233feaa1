"""Time-splitting sine-spectral solver for damped focusing NLS/GPE equations.

The package integrates

    i du/dt = -(1/2) Lap u + V(x) u - beta |u|^(2 sigma) u + i g(|u|^2) u

on rectangular domains with homogeneous Dirichlet data (sine basis) or
periodic data (Fourier basis), treating the combined potential/nonlinear/
damping flow exactly through closed-form ODE solutions and the kinetic
part exactly in spectral space.
"""

from .spectral import (
    Axis,
    Basis,
    ComplexField,
    Dispersion,
    Grid,
    SCHRODINGER,
    cgl_dispersion,
    forward_transform,
    inverse_transform,
    kinetic_step,
    make_grid,
    sine_forward,
    sine_inverse,
)
from .damping import (
    CubicQuinticDamping,
    DampingLaw,
    FeedingQuinticDamping,
    FlowContext,
    GinzburgLandauLaw,
    LinearDamping,
    NoDamping,
    NumericDamping,
    PowerLawDamping,
    flow_F,
    flow_G,
    flow_h,
    numeric_flow,
)
from .stepper import (
    HarmonicPotential,
    Schedule,
    SimState,
    TabulatedPotential,
    ZeroPotential,
    evolve,
    nonlinear_half_step,
    phase_shift_invariance_check,
    strang_step,
)
from .diagnostics import (
    Arrested,
    Blowup,
    BlowupCriterion,
    DiagnosticsRecord,
    Diverged,
    classify_blowup,
    energy,
    norm_l2,
    normalization,
    observe,
    rho_center,
    rho_max,
    widths,
)
from .experiments import (
    ConvergenceStudy,
    GaussianSpec,
    LinearFit,
    ThresholdResult,
    build_state,
    fit_linear,
    find_threshold,
    focusing_gaussian_config,
    gaussian_init,
    run_config,
    space_order_study,
    time_order_study,
    trapped_ramp_config,
)
from .config import ConfigError, SimConfig, parse_config, serialize_config
from .timeseries import format_timeseries, read_timeseries, write_timeseries
from .snapshots import pack_snapshot, read_snapshot, unpack_snapshot, write_snapshot

__all__ = [name for name in dir() if not name.startswith("_")]
__version__ = "0.1.0"
