"""Tensor-product spectral grids and the exact kinetic propagator.

The sine basis on [a, b] with M subintervals uses interior nodes
x_j = a + j h, h = (b - a)/M, and wavenumbers mu_l = pi l / (b - a),
l = 1..M-1.  Forward/inverse pairs are realised with the type-I DST,
which is its own inverse up to a factor M/2, so both directions cost
O(M log M).  The Fourier basis covers the periodic variant.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from functools import lru_cache

import numpy as np
import scipy.fft as _fft


class Basis(Enum):
    """Spatial discretisation family."""

    SINE = "sine"
    FOURIER = "fourier"


@dataclass(frozen=True)
class Axis:
    """One coordinate direction: interval [a, b] split into m cells."""

    a: float
    b: float
    m: int

    def __post_init__(self):
        if not (math.isfinite(self.a) and math.isfinite(self.b)):
            raise ValueError("axis endpoints must be finite")
        if not self.b > self.a:
            raise ValueError(f"axis requires b > a, got [{self.a}, {self.b}]")
        if self.m < 4 or self.m % 2:
            raise ValueError(f"axis cell count must be even and >= 4, got {self.m}")

    @property
    def h(self) -> float:
        return (self.b - self.a) / self.m

    @property
    def length(self) -> float:
        return self.b - self.a


@lru_cache(maxsize=64)
def _axis_nodes(axis: Axis, basis: Basis) -> np.ndarray:
    # Sine grids carry both endpoints; Fourier grids drop the right one.
    n = axis.m + 1 if basis is Basis.SINE else axis.m
    x = axis.a + axis.h * np.arange(n)
    x.flags.writeable = False
    return x


@lru_cache(maxsize=64)
def _axis_wavenumbers(axis: Axis, basis: Basis) -> np.ndarray:
    if basis is Basis.SINE:
        mu = np.pi * np.arange(1, axis.m) / axis.length
    else:
        mu = 2.0 * np.pi * np.fft.fftfreq(axis.m, d=axis.h)
    mu.flags.writeable = False
    return mu


@dataclass(frozen=True)
class Grid:
    """Rectangular tensor grid in one or two dimensions.

    Hashable so propagator tables can key on it.  ``shape`` is the shape
    of nodal value arrays: sine grids include the (identically zero)
    boundary nodes, Fourier grids store one period.
    """

    axes: tuple[Axis, ...]
    basis: Basis = Basis.SINE

    def __post_init__(self):
        if not isinstance(self.axes, tuple):
            raise TypeError("axes must be a tuple of Axis")
        if not 1 <= len(self.axes) <= 2:
            raise ValueError(f"only 1-D and 2-D grids are supported, got {len(self.axes)} axes")

    @property
    def ndim(self) -> int:
        return len(self.axes)

    @property
    def shape(self) -> tuple[int, ...]:
        if self.basis is Basis.SINE:
            return tuple(ax.m + 1 for ax in self.axes)
        return tuple(ax.m for ax in self.axes)

    @property
    def spectral_shape(self) -> tuple[int, ...]:
        if self.basis is Basis.SINE:
            return tuple(ax.m - 1 for ax in self.axes)
        return tuple(ax.m for ax in self.axes)

    @property
    def cell_volume(self) -> float:
        out = 1.0
        for ax in self.axes:
            out *= ax.h
        return out

    def nodes(self, i: int) -> np.ndarray:
        return _axis_nodes(self.axes[i], self.basis)

    def wavenumbers(self, i: int) -> np.ndarray:
        return _axis_wavenumbers(self.axes[i], self.basis)

    def meshes(self) -> tuple[np.ndarray, ...]:
        """Broadcastable coordinate arrays (sparse ij meshgrid)."""
        arrs = [self.nodes(i) for i in range(self.ndim)]
        if self.ndim == 1:
            return (arrs[0],)
        return tuple(np.meshgrid(*arrs, indexing="ij", sparse=True))


def make_grid(axes, basis: Basis = Basis.SINE) -> Grid:
    """Build a grid from an iterable of (a, b, m) triples."""
    built = tuple(ax if isinstance(ax, Axis) else Axis(*ax) for ax in axes)
    return Grid(axes=built, basis=basis)


@dataclass
class ComplexField:
    """Nodal values of the wave function on a grid at a given time.

    Sine-basis fields must vanish on the boundary rows/columns; the
    constructor enforces dtype and shape but boundary checks are left to
    the transforms so bulk arithmetic stays cheap.  ``diverged`` is set
    once a non-finite value has been observed and is sticky.
    """

    grid: Grid
    values: np.ndarray
    time: float = 0.0
    diverged: bool = False

    def __post_init__(self):
        vals = np.asarray(self.values)
        if vals.shape != self.grid.shape:
            raise ValueError(f"field shape {vals.shape} does not match grid shape {self.grid.shape}")
        if vals.dtype != np.complex128:
            vals = vals.astype(np.complex128)
        self.values = vals

    def copy(self) -> "ComplexField":
        return ComplexField(self.grid, self.values.copy(), self.time, self.diverged)

    def density(self) -> np.ndarray:
        return self.values.real**2 + self.values.imag**2


def _check_line_endpoints(values: np.ndarray):
    if np.any(values[..., 0] != 0) or np.any(values[..., -1] != 0):
        raise ValueError("sine transform input must vanish at both endpoints")


def sine_forward(values: np.ndarray, axis: int = -1) -> np.ndarray:
    """Type-I sine analysis along one axis.

    ``values`` holds M+1 samples including the endpoints, which must be
    exactly zero; returns M-1 coefficients.  hat(u)_l =
    (2/M) sum_j u_j sin(pi l j / M).
    """
    values = np.asarray(values)
    moved = np.moveaxis(values, axis, -1)
    _check_line_endpoints(moved)
    m = moved.shape[-1] - 1
    coeffs = _fft.dst(moved[..., 1:-1], type=1, axis=-1) / m
    return np.moveaxis(coeffs, -1, axis)


def sine_inverse(coeffs: np.ndarray, axis: int = -1) -> np.ndarray:
    """Inverse of :func:`sine_forward`; re-attaches zero endpoints."""
    coeffs = np.asarray(coeffs)
    moved = np.moveaxis(coeffs, axis, -1)
    interior = _fft.dst(moved, type=1, axis=-1) / 2.0
    out = np.zeros(moved.shape[:-1] + (moved.shape[-1] + 2,), dtype=interior.dtype)
    out[..., 1:-1] = interior
    return np.moveaxis(out, -1, axis)


def forward_transform(grid: Grid, values: np.ndarray) -> np.ndarray:
    """Nodal values -> spectral coefficients for either basis."""
    values = np.asarray(values)
    if values.shape != grid.shape:
        raise ValueError(f"value shape {values.shape} does not match grid shape {grid.shape}")
    if grid.basis is Basis.SINE:
        for ax in range(grid.ndim):
            _check_line_endpoints(np.moveaxis(values, ax, -1))
        interior = values[tuple(slice(1, -1) for _ in range(grid.ndim))]
        scale = 1.0
        for ax in grid.axes:
            scale *= ax.m
        return _fft.dstn(interior, type=1) / scale
    return _fft.fftn(values) / math.prod(grid.shape)


def inverse_transform(grid: Grid, coeffs: np.ndarray) -> np.ndarray:
    """Spectral coefficients -> nodal values for either basis."""
    coeffs = np.asarray(coeffs)
    if coeffs.shape != grid.spectral_shape:
        raise ValueError(
            f"coefficient shape {coeffs.shape} does not match spectral shape {grid.spectral_shape}"
        )
    if grid.basis is Basis.SINE:
        interior = _fft.dstn(coeffs, type=1) / 2.0**grid.ndim
        out = np.zeros(grid.shape, dtype=np.complex128)
        out[tuple(slice(1, -1) for _ in range(grid.ndim))] = interior
        return out
    return _fft.ifftn(coeffs) * math.prod(grid.shape)


@dataclass(frozen=True)
class Dispersion:
    """Kinetic symbol family.

    ``schrodinger`` applies exp(-i k |mu|^2 / 2) per mode; ``cgl`` applies
    exp(-(eps + i) k |mu|^2), the viscous symbol of the complex
    Ginzburg-Landau equation (note the full Laplacian, no 1/2).
    """

    kind: str = "schrodinger"
    eps: float = 0.0

    def __post_init__(self):
        if self.kind not in ("schrodinger", "cgl"):
            raise ValueError(f"unknown dispersion kind {self.kind!r}")
        if self.kind == "cgl" and self.eps < 0:
            raise ValueError("cgl viscosity eps must be >= 0")


SCHRODINGER = Dispersion("schrodinger")


def cgl_dispersion(eps: float) -> Dispersion:
    return Dispersion("cgl", float(eps))


@lru_cache(maxsize=32)
def _propagator(grid: Grid, k: float, dispersion: Dispersion) -> np.ndarray:
    mu2 = np.zeros(grid.spectral_shape)
    for i in range(grid.ndim):
        shape = [1] * grid.ndim
        shape[i] = -1
        mu2 = mu2 + (grid.wavenumbers(i) ** 2).reshape(shape)
    if dispersion.kind == "schrodinger":
        mult = np.exp(-0.5j * k * mu2)
    else:
        mult = np.exp(-(dispersion.eps + 1j) * k * mu2)
    mult.flags.writeable = False
    return mult


def kinetic_step(field: ComplexField, k: float, dispersion: Dispersion = SCHRODINGER) -> ComplexField:
    """Advance the free-flow part by time k exactly in spectral space.

    Unitary for the Schrodinger symbol; a strict per-mode contraction for
    the cgl symbol with eps > 0.  Fields already flagged as diverged pass
    through untouched.
    """
    if field.diverged:
        return field.copy()
    coeffs = forward_transform(field.grid, field.values)
    coeffs *= _propagator(field.grid, float(k), dispersion)
    out = inverse_transform(field.grid, coeffs)
    return ComplexField(field.grid, out, field.time, field.diverged)
