"""Readers for the solver's two on-disk formats.

These are deliberately independent implementations working from the
published layouts, so the figure scripts stay decoupled from the solver
package.

CSV time series: header ``t,N,E,rho_center,rho_max,sigma_x,diverged``
(1-D runs) or the same with ``sigma_y`` before ``diverged`` (2-D runs);
one row per sample, numbers in round-trip ``%.17g`` form (``nan``,
``inf`` and ``-inf`` appear verbatim), ``diverged`` is 0 or 1.

Snapshot binary (little-endian, in order): magic ``b"DNLS"``; u32
format version (1); u32 dimension d; u32 basis (0 = sine, 1 = fourier);
d repetitions of f64 a, f64 b, u64 m; f64 sample time; f64 beta;
payload of interleaved (re, im) f64 pairs for every node in C order —
sine grids store all prod(m_i + 1) nodes including the zero boundary,
fourier grids prod(m_i).
"""

from __future__ import annotations

import struct
from dataclasses import dataclass

import numpy as np

_BASE = ("t", "N", "E", "rho_center", "rho_max")
HEADER_1D = _BASE + ("sigma_x", "diverged")
HEADER_2D = _BASE + ("sigma_x", "sigma_y", "diverged")

MAGIC = b"DNLS"
VERSION = 1
_BASES = {0: "sine", 1: "fourier"}


class FormatError(ValueError):
    """An input file does not follow the published layout."""


@dataclass(frozen=True)
class TimeSeries:
    """Parsed CSV time series; one numpy column per diagnostic."""

    t: np.ndarray
    n: np.ndarray
    e: np.ndarray
    rho_center: np.ndarray
    rho_max: np.ndarray
    sigma_x: np.ndarray
    sigma_y: np.ndarray | None
    diverged: np.ndarray

    @property
    def ndim(self) -> int:
        return 1 if self.sigma_y is None else 2

    def divergence_time(self) -> float | None:
        """Time of the first diverged sample, if any."""
        hits = np.flatnonzero(self.diverged)
        return float(self.t[hits[0]]) if hits.size else None


def parse_timeseries(text: str, source: str = "<csv>") -> TimeSeries:
    lines = text.splitlines()
    if not lines:
        raise FormatError(f"{source}: empty file")
    header = tuple(lines[0].split(","))
    if header == HEADER_1D:
        names = HEADER_1D
    elif header == HEADER_2D:
        names = HEADER_2D
    else:
        raise FormatError(f"{source}: unexpected header {lines[0]!r}")
    rows = []
    for lineno, line in enumerate(lines[1:], start=2):
        if not line:
            continue
        cells = line.split(",")
        if len(cells) != len(names):
            raise FormatError(
                f"{source}:{lineno}: expected {len(names)} columns, got {len(cells)}"
            )
        try:
            rows.append([float(cell) for cell in cells])
        except ValueError:
            raise FormatError(f"{source}:{lineno}: malformed number in {line!r}") from None
    if not rows:
        raise FormatError(f"{source}: no data rows")
    cols = np.asarray(rows, dtype=float).T
    data = dict(zip(names, cols))
    return TimeSeries(
        t=data["t"],
        n=data["N"],
        e=data["E"],
        rho_center=data["rho_center"],
        rho_max=data["rho_max"],
        sigma_x=data["sigma_x"],
        sigma_y=data.get("sigma_y"),
        diverged=data["diverged"].astype(bool),
    )


def read_timeseries(path) -> TimeSeries:
    with open(path, "r", encoding="utf-8", newline="") as fh:
        return parse_timeseries(fh.read(), source=str(path))


@dataclass(frozen=True)
class Snapshot:
    """One stored complex field with its grid description."""

    axes: tuple[tuple[float, float, int], ...]  # (a, b, m) per axis
    basis: str
    time: float
    beta: float
    values: np.ndarray  # complex128, shape = node counts

    @property
    def ndim(self) -> int:
        return len(self.axes)

    @property
    def grid_key(self) -> tuple:
        """Identity of the mesh, for same-grid checks across snapshots."""
        return (self.basis, self.axes)

    def nodes(self, axis: int) -> np.ndarray:
        a, b, m = self.axes[axis]
        h = (b - a) / m
        count = m + 1 if self.basis == "sine" else m
        return a + h * np.arange(count)

    def density(self) -> np.ndarray:
        return self.values.real**2 + self.values.imag**2


def parse_snapshot(blob: bytes, source: str = "<snapshot>") -> Snapshot:
    def need(n: int, what: str, offset: int) -> bytes:
        if len(blob) < offset + n:
            raise FormatError(
                f"{source}: truncated while reading {what}: "
                f"need {offset + n} bytes, have {len(blob)}"
            )
        return blob[offset : offset + n]

    if need(4, "magic", 0) != MAGIC:
        raise FormatError(f"{source}: bad magic {blob[:4]!r}, want {MAGIC!r}")
    version, ndim, basis_code = struct.unpack("<III", need(12, "header", 4))
    if version != VERSION:
        raise FormatError(f"{source}: unknown format version {version}")
    if ndim not in (1, 2):
        raise FormatError(f"{source}: unsupported dimension {ndim}")
    if basis_code not in _BASES:
        raise FormatError(f"{source}: unknown basis code {basis_code}")
    basis = _BASES[basis_code]
    offset = 16
    axes = []
    for _ in range(ndim):
        a, b, m = struct.unpack("<ddQ", need(24, "axis description", offset))
        offset += 24
        axes.append((a, b, int(m)))
    time, beta = struct.unpack("<dd", need(16, "time stamp", offset))
    offset += 16
    shape = tuple((m + 1 if basis == "sine" else m) for _, _, m in axes)
    count = int(np.prod(shape))
    payload = need(16 * count, "field payload", offset)
    offset += 16 * count
    if len(blob) != offset:
        raise FormatError(f"{source}: {len(blob) - offset} trailing bytes after payload")
    values = np.frombuffer(payload, dtype="<c16").astype(np.complex128).reshape(shape)
    return Snapshot(axes=tuple(axes), basis=basis, time=time, beta=beta, values=values)


def read_snapshot(path) -> Snapshot:
    with open(path, "rb") as fh:
        return parse_snapshot(fh.read(), source=str(path))
