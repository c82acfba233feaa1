"""Conserved-quantity monitors and blowup classification.

All integrals use the rectangle rule on the grid nodes; the gradient part
of the energy is evaluated in spectral space where it is exact for the
discrete solution:

    int |grad u|^2 = prod(L_i/2) * sum_l |mu_l|^2 |hat(u)_l|^2     (sine)
    int |grad u|^2 = prod(L_i)   * sum_l |mu_l|^2 |hat(u)_l|^2     (Fourier)
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .spectral import Basis, ComplexField, forward_transform
from .stepper import Potential, SimState, ZeroPotential


def normalization(field: ComplexField) -> float:
    """N = int |u|^2 (the squared discrete l2 norm)."""
    return float(field.grid.cell_volume * np.sum(field.density()))


def norm_l2(field: ComplexField) -> float:
    """Discrete L2 norm sqrt(prod(h_i) sum |u_j|^2)."""
    return math.sqrt(normalization(field))


def _mode_mu2(grid) -> np.ndarray:
    mu2 = np.zeros(grid.spectral_shape)
    for i in range(grid.ndim):
        shape = [1] * grid.ndim
        shape[i] = -1
        mu2 = mu2 + (grid.wavenumbers(i) ** 2).reshape(shape)
    return mu2


def gradient_norm_sq(field: ComplexField) -> float:
    """int |grad u|^2 evaluated spectrally."""
    grid = field.grid
    coeffs = forward_transform(grid, field.values)
    mu2 = _mode_mu2(grid)
    power = coeffs.real**2 + coeffs.imag**2
    if grid.basis is Basis.SINE:
        scale = 1.0
        for ax in grid.axes:
            scale *= ax.length / 2.0
    else:
        scale = 1.0
        for ax in grid.axes:
            scale *= ax.length
    return float(scale * np.sum(mu2 * power))


def energy(field: ComplexField, potential: Potential, beta: float, sigma: float = 1.0) -> float:
    """E = int (1/2)|grad u|^2 + V |u|^2 - beta/(sigma+1) |u|^(2 sigma + 2).

    Returns nan once the field carries non-finite values or the diverged
    flag.
    """
    if field.diverged or not np.all(np.isfinite(field.values)):
        return math.nan
    rho = field.density()
    vol = field.grid.cell_volume
    kinetic = 0.5 * gradient_norm_sq(field)
    v = potential.sample(field.grid)
    pot = float(vol * np.sum(v * rho)) if not isinstance(potential, ZeroPotential) else 0.0
    focus = -beta / (sigma + 1.0) * float(vol * np.sum(rho ** (sigma + 1.0)))
    return kinetic + pot + focus


def widths(field: ComplexField) -> tuple[float, ...]:
    """RMS widths per axis about the density centroid.

    sigma_i^2 = <(x_i - <x_i>)^2> with averages against |u|^2 / N.
    All-nan for an empty (N = 0) or non-finite field.
    """
    if field.diverged or not np.all(np.isfinite(field.values)):
        return tuple(math.nan for _ in range(field.grid.ndim))
    rho = field.density()
    vol = field.grid.cell_volume
    n = vol * float(np.sum(rho))
    if n == 0.0:
        return tuple(math.nan for _ in range(field.grid.ndim))
    out = []
    for mesh in field.grid.meshes():
        mean = vol * float(np.sum(mesh * rho)) / n
        var = vol * float(np.sum((mesh - mean) ** 2 * rho)) / n
        out.append(math.sqrt(max(var, 0.0)))
    return tuple(out)


def rho_center(field: ComplexField) -> float:
    """Density at the domain centre.

    Uses the value at the centre node when the centre lands on the grid
    (even cell counts put it there for symmetric domains); otherwise
    bilinear interpolation of |u|^2.
    """
    grid = field.grid
    rho = field.density()
    idx = []
    exact = True
    fracs = []
    for i, ax in enumerate(grid.axes):
        c = 0.5 * (ax.a + ax.b)
        pos = (c - ax.a) / ax.h
        j = int(math.floor(pos + 0.5))
        if abs(pos - j) <= 1e-9:
            idx.append(j)
            fracs.append(0.0)
        else:
            exact = False
            j0 = int(math.floor(pos))
            idx.append(j0)
            fracs.append(pos - j0)
    if exact:
        return float(rho[tuple(idx)])
    # bilinear between the bracketing nodes
    out = 0.0
    for corner in range(2**grid.ndim):
        w = 1.0
        at = []
        for i in range(grid.ndim):
            bit = (corner >> i) & 1
            w *= fracs[i] if bit else (1.0 - fracs[i])
            at.append(idx[i] + bit)
        out += w * float(rho[tuple(at)])
    return out


def rho_max(field: ComplexField) -> float:
    return float(np.max(field.density()))


@dataclass(frozen=True)
class DiagnosticsRecord:
    """One sampled row of the time series."""

    t: float
    n: float
    e: float
    rho_center: float
    rho_max: float
    widths: tuple[float, ...]
    diverged: bool

    @property
    def finite(self) -> bool:
        return all(map(math.isfinite, (self.n, self.e, self.rho_center, self.rho_max)))


def observe(state: SimState) -> DiagnosticsRecord:
    """Assemble the full diagnostics row for the current state."""
    field = state.field
    beta = state.schedule.beta_at(field.time)
    if field.diverged or not np.all(np.isfinite(field.values)):
        nanw = tuple(math.nan for _ in range(field.grid.ndim))
        return DiagnosticsRecord(field.time, math.nan, math.nan, math.nan, math.nan, nanw, True)
    return DiagnosticsRecord(
        t=field.time,
        n=normalization(field),
        e=energy(field, state.potential, beta, state.sigma),
        rho_center=rho_center(field),
        rho_max=rho_max(field),
        widths=widths(field),
        diverged=False,
    )


@dataclass(frozen=True)
class Arrested:
    """The run reached the horizon without tripping any blowup criterion."""

    t_end: float


@dataclass(frozen=True)
class Blowup:
    """A finite-value criterion (density cap or energy floor) tripped."""

    t: float


@dataclass(frozen=True)
class Diverged:
    """Non-finite values appeared; t is the first flagged sample."""

    t: float


Classification = Arrested | Blowup | Diverged


@dataclass(frozen=True)
class BlowupCriterion:
    """Thresholds that mark a run as blown up.

    ``rho_cap``: absolute central/maximum-density cap (must exceed the
    initial peak).  ``e_floor``: energy level below which the run counts
    as blown up; disabled when None (use :meth:`from_initial` to derive
    both from the first record).  ``horizon`` is the classification time.
    """

    rho_cap: float
    horizon: float
    e_floor: float | None = None

    def __post_init__(self):
        if not (math.isfinite(self.rho_cap) and self.rho_cap > 0):
            raise ValueError(f"rho_cap must be positive, got {self.rho_cap}")
        if self.e_floor is not None and not math.isfinite(self.e_floor):
            raise ValueError("e_floor must be finite or None")
        if not (math.isfinite(self.horizon) and self.horizon > 0):
            raise ValueError(f"horizon must be positive, got {self.horizon}")

    @classmethod
    def from_initial(
        cls,
        record: DiagnosticsRecord,
        horizon: float,
        rho_cap_factor: float = 1e3,
        e_floor_factor: float = 1e3,
    ) -> "BlowupCriterion":
        """Scale thresholds from the initial record.

        rho_cap = rho_cap_factor * max(rho(0)); the energy floor is
        -e_floor_factor * |E(0)| and is disabled when E(0) = 0.
        """
        cap = rho_cap_factor * record.rho_max
        floor = None if record.e == 0.0 else -e_floor_factor * abs(record.e)
        return cls(rho_cap=cap, e_floor=floor, horizon=horizon)

    def trips(self, record: DiagnosticsRecord) -> bool:
        if record.rho_max > self.rho_cap or record.rho_center > self.rho_cap:
            return True
        if self.e_floor is not None and record.e < self.e_floor:
            return True
        return False


def classify_blowup(records, criterion: BlowupCriterion) -> Classification:
    """Scan a time series and return Arrested / Blowup(t) / Diverged(t).

    Non-finite samples dominate (Diverged); otherwise the first record
    tripping the criterion gives Blowup at that time; a clean series is
    Arrested at the horizon.
    """
    if not records:
        raise ValueError("cannot classify an empty record series")
    for rec in records:
        if rec.diverged or not rec.finite:
            return Diverged(t=rec.t)
        if criterion.trips(rec):
            return Blowup(t=rec.t)
    return Arrested(t_end=criterion.horizon)
