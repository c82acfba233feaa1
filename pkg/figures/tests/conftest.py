"""Hand-built fixture data for the figure-script tests.

Everything here is synthesized from the *published* file layouts — the
CSV schema and the snapshot byte layout — so the tests exercise the
same decoupling the package promises: no solver import anywhere.
"""

from __future__ import annotations

import struct

import numpy as np
import pytest

BASIS_CODES = {"sine": 0, "fourier": 1}

PNG_MAGIC = b"\x89PNG\r\n\x1a\n"


def png_size(blob: bytes) -> tuple[int, int]:
    """(width, height) in pixels from a PNG's IHDR chunk."""
    assert blob[:8] == PNG_MAGIC
    width = int.from_bytes(blob[16:20], "big")
    height = int.from_bytes(blob[20:24], "big")
    return width, height


def pack_snapshot(
    values,
    axes,
    basis: str = "sine",
    time: float = 0.0,
    beta: float = 8.0,
    *,
    magic: bytes = b"DNLS",
    version: int = 1,
    basis_code: int | None = None,
    trailing: bytes = b"",
) -> bytes:
    """Assemble snapshot bytes directly from the documented layout."""
    code = BASIS_CODES[basis] if basis_code is None else basis_code
    blob = magic + struct.pack("<III", version, len(axes), code)
    for a, b, m in axes:
        blob += struct.pack("<ddQ", float(a), float(b), int(m))
    blob += struct.pack("<dd", float(time), float(beta))
    blob += np.ascontiguousarray(values).astype("<c16").tobytes()
    return blob + trailing


def node_lattice(axes, basis: str = "sine"):
    """Per-axis node coordinates matching the stored payload shape."""
    coords = []
    for a, b, m in axes:
        h = (b - a) / m
        count = m + 1 if basis == "sine" else m
        coords.append(a + h * np.arange(count))
    return coords


def sample_field(axes, basis: str = "sine", width: float = 2.0, phase: float = 0.4):
    """A smooth normalized-ish complex bump on the node lattice."""
    mesh = np.meshgrid(*node_lattice(axes, basis), indexing="ij")
    r2 = sum(g**2 for g in mesh)
    psi = np.exp(-r2 / (2.0 * width**2)) * np.exp(1j * (0.7 * mesh[0] + phase))
    if basis == "sine":
        for axis in range(len(axes)):
            edge = [slice(None)] * len(axes)
            for end in (0, -1):
                edge[axis] = end
                psi[tuple(edge)] = 0.0
    return psi.astype(np.complex128)


def csv_text(rows) -> str:
    """Render rows in the published CSV schema (%.17g, diverged 0/1)."""
    header = "t,N,E,rho_center,rho_max,sigma_x"
    if len(rows[0]) == 8:  # t, N, E, rho_c, rho_max, sigma_x, sigma_y, diverged
        header += ",sigma_y"
    header += ",diverged"
    lines = [header]
    for row in rows:
        *floats, flag = row
        lines.append(",".join("%.17g" % v for v in floats) + f",{int(flag)}")
    return "\n".join(lines) + "\n"


def smooth_rows(ndim: int = 2, samples: int = 40, diverge_from: int | None = None):
    """A plausible arrested-run series, optionally ending in divergence."""
    rows = []
    for i in range(samples):
        t = 0.01 * i
        n = 1.0 * np.exp(-0.3 * t)
        e = -0.75 + 0.1 * np.sin(4 * t)
        rho_c = 2.25 + 8.0 * np.exp(-((t - 0.25) ** 2) / 0.004)
        rho_m = rho_c * 1.01
        sx = 1.3 - 0.8 * np.sin(3 * t) ** 2
        row = [t, n, e, rho_c, rho_m, sx]
        if ndim == 2:
            row.append(0.9 + 0.2 * np.cos(5 * t))
        diverged = diverge_from is not None and i >= diverge_from
        if diverged:
            row[1:] = [float("nan")] * (len(row) - 1)
        row.append(diverged)
        rows.append(row)
    return rows


AXES_2D = ((-8.0, 8.0, 32), (-4.0, 4.0, 16))
AXES_1D = ((-8.0, 8.0, 48),)


@pytest.fixture
def series_2d(tmp_path):
    path = tmp_path / "run2d.csv"
    path.write_text(csv_text(smooth_rows(ndim=2)), newline="\n")
    return path


@pytest.fixture
def series_1d(tmp_path):
    path = tmp_path / "run1d.csv"
    path.write_text(csv_text(smooth_rows(ndim=1)), newline="\n")
    return path


@pytest.fixture
def series_diverged(tmp_path):
    path = tmp_path / "blown.csv"
    path.write_text(csv_text(smooth_rows(ndim=2, diverge_from=30)), newline="\n")
    return path


@pytest.fixture
def snapshot_2d(tmp_path):
    path = tmp_path / "field.snap"
    path.write_bytes(pack_snapshot(sample_field(AXES_2D), AXES_2D, time=0.2))
    return path


@pytest.fixture
def snapshot_1d(tmp_path):
    path = tmp_path / "field1d.snap"
    path.write_bytes(
        pack_snapshot(sample_field(AXES_1D, basis="fourier"), AXES_1D, basis="fourier")
    )
    return path


@pytest.fixture
def snapshot_sequence(tmp_path):
    """Six frames on one grid: a bump narrowing then relaxing."""
    paths = []
    for idx, t in enumerate((0.0, 0.2, 0.4, 0.6, 0.8, 1.0)):
        width = 2.0 - 1.4 * np.exp(-((t - 0.4) ** 2) / 0.02)
        field = sample_field(AXES_2D, width=float(width), phase=0.3 * idx)
        path = tmp_path / f"frame_{idx:02d}.snap"
        path.write_bytes(pack_snapshot(field, AXES_2D, time=t))
        paths.append(path)
    return paths
