"""Figure rendering for solver outputs.

Four figure kinds, mirroring the layouts used throughout the damped-NLS
study: ``timeseries`` (three stacked panels: normalization, energy,
central density), ``widths`` (condensate widths per axis), ``surface``
(one snapshot's density as a 3-D surface) and ``contour-grid`` (a
sequence of snapshots as density contours, three per row).

Rendering is deterministic: the Agg backend, fixed figure geometry and
pinned PNG metadata make byte-identical inputs produce byte-identical
images.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .formats import Snapshot, TimeSeries, read_snapshot, read_timeseries

_DPI = 150
_METADATA = {"Software": "dnlsfig"}

KINDS = ("surface", "contour-grid", "timeseries", "widths")


@dataclass(frozen=True)
class FigureSpec:
    """One figure request: inputs, kind, output path, optional styling."""

    inputs: tuple[str, ...]
    kind: str
    out: str
    title: str | None = None
    shared_scale: bool = False

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown figure kind {self.kind!r}; choose from {KINDS}")
        if not self.inputs:
            raise ValueError("at least one input file is required")


def _save(fig, out) -> str:
    fig.savefig(out, dpi=_DPI, metadata=_METADATA)
    plt.close(fig)
    return str(out)


def _mark_divergence(axes, series: TimeSeries):
    t_div = series.divergence_time()
    if t_div is not None:
        for ax in axes:
            ax.axvline(t_div, color="crimson", linestyle="--", linewidth=1.0)


def plot_timeseries(series: TimeSeries, out, title: str | None = None) -> str:
    """Three stacked panels: N(t), E(t) and the central density."""
    fig, axes = plt.subplots(3, 1, sharex=True, figsize=(6.4, 7.2))
    panels = (
        (series.n, r"$N(t)$"),
        (series.e, r"$E(t)$"),
        (series.rho_center, r"$|\psi(0,t)|^2$"),
    )
    for ax, (values, label) in zip(axes, panels):
        ax.plot(series.t, values, color="tab:blue", linewidth=1.2)
        ax.set_ylabel(label)
        ax.grid(True, alpha=0.3)
    _mark_divergence(axes, series)
    axes[-1].set_xlabel(r"$t$")
    if title:
        axes[0].set_title(title)
    fig.align_ylabels(axes)
    return _save(fig, out)


def plot_widths(series: TimeSeries, out, title: str | None = None) -> str:
    """Condensate widths per axis against time."""
    fig, ax = plt.subplots(figsize=(6.4, 4.0))
    ax.plot(series.t, series.sigma_x, label=r"$\sigma_x$", linewidth=1.2)
    if series.sigma_y is not None:
        ax.plot(series.t, series.sigma_y, label=r"$\sigma_y$", linewidth=1.2)
    _mark_divergence([ax], series)
    ax.set_xlabel(r"$t$")
    ax.set_ylabel("width")
    ax.grid(True, alpha=0.3)
    ax.legend(loc="best")
    if title:
        ax.set_title(title)
    return _save(fig, out)


def plot_surface(snap: Snapshot, out, title: str | None = None) -> str:
    """Density of one snapshot: 3-D surface (2-D grids) or a line (1-D)."""
    rho = snap.density()
    if snap.ndim == 1:
        fig, ax = plt.subplots(figsize=(6.4, 4.0))
        ax.plot(snap.nodes(0), rho, linewidth=1.2)
        ax.set_xlabel(r"$x$")
        ax.set_ylabel(r"$|\psi|^2$")
        ax.grid(True, alpha=0.3)
    else:
        fig = plt.figure(figsize=(6.4, 5.0))
        ax = fig.add_subplot(projection="3d")
        x, y = np.meshgrid(snap.nodes(0), snap.nodes(1), indexing="ij")
        ax.plot_surface(x, y, rho, cmap="viridis", rcount=120, ccount=120)
        ax.set_xlabel(r"$x$")
        ax.set_ylabel(r"$y$")
        ax.set_zlabel(r"$|\psi|^2$")
    ax.set_title(title if title else f"t = {snap.time:g}")
    return _save(fig, out)


def plot_contour_grid(
    snaps: list[Snapshot],
    out,
    shared_scale: bool = False,
    title: str | None = None,
) -> str:
    """Density contours for a time sequence of snapshots, three per row.

    All snapshots must share one grid.  Colors autoscale per frame by
    default; ``shared_scale`` switches to one scale across the grid,
    which keeps faint late-time features comparable to the bright peak.
    """
    keys = {snap.grid_key for snap in snaps}
    if len(keys) != 1:
        raise ValueError(f"snapshots on different grids cannot share a figure ({len(keys)} distinct grids)")
    if snaps[0].ndim != 2:
        raise ValueError("contour grids need 2-D snapshots")
    snaps = sorted(snaps, key=lambda snap: snap.time)
    ncols = min(3, len(snaps))
    nrows = math.ceil(len(snaps) / ncols)
    fig, axes = plt.subplots(
        nrows, ncols, figsize=(3.2 * ncols, 2.9 * nrows), squeeze=False
    )
    x, y = np.meshgrid(snaps[0].nodes(0), snaps[0].nodes(1), indexing="ij")
    densities = [snap.density() for snap in snaps]
    vmax = max(float(rho.max()) for rho in densities) if shared_scale else None
    mappable = None
    for idx, (snap, rho) in enumerate(zip(snaps, densities)):
        ax = axes[idx // ncols][idx % ncols]
        if shared_scale:
            mappable = ax.contourf(x, y, rho, levels=30, cmap="viridis", vmin=0.0, vmax=vmax)
        else:
            mappable = ax.contourf(x, y, rho, levels=30, cmap="viridis")
        ax.set_title(f"t = {snap.time:g}", fontsize="medium")
        ax.set_aspect("equal")
    for idx in range(len(snaps), nrows * ncols):
        axes[idx // ncols][idx % ncols].set_axis_off()
    if shared_scale and mappable is not None:
        fig.colorbar(mappable, ax=[ax for row in axes for ax in row], shrink=0.85)
    if title:
        fig.suptitle(title)
    return _save(fig, out)


def render(spec: FigureSpec) -> str:
    """Load ``spec.inputs`` and draw the requested figure."""
    if spec.kind in ("timeseries", "widths"):
        if len(spec.inputs) != 1:
            raise ValueError(f"{spec.kind} figures take exactly one CSV input")
        series = read_timeseries(spec.inputs[0])
        fn = plot_timeseries if spec.kind == "timeseries" else plot_widths
        return fn(series, spec.out, title=spec.title)
    snaps = [read_snapshot(path) for path in spec.inputs]
    if spec.kind == "surface":
        if len(snaps) != 1:
            raise ValueError("surface figures take exactly one snapshot input")
        return plot_surface(snaps[0], spec.out, title=spec.title)
    if len(snaps) < 2:
        raise ValueError("contour grids need at least two snapshots")
    return plot_contour_grid(snaps, spec.out, shared_scale=spec.shared_scale, title=spec.title)
