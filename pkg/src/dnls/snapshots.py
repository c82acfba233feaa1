"""Binary snapshot format for complex fields.

Little-endian layout, in order:

    bytes 0-3    magic  b"DNLS"
    u32          format version (currently 1)
    u32          dimension d (1 or 2)
    u32          basis (0 = sine, 1 = fourier)
    per axis     f64 a, f64 b, u64 m        (d times)
    f64          sample time t
    f64          beta effective at t
    payload      interleaved re, im as f64 for every node in C order
                 (sine grids store all prod(m_i + 1) nodes including the
                 zero boundary, fourier grids prod(m_i))

Readers must reject bad magic, unknown versions and short payloads; the
error for a truncated file names expected and actual byte counts.
"""

from __future__ import annotations

import struct

import numpy as np

from .spectral import Basis, ComplexField, Grid, make_grid

MAGIC = b"DNLS"
VERSION = 1

_BASIS_CODE = {Basis.SINE: 0, Basis.FOURIER: 1}
_CODE_BASIS = {v: k for k, v in _BASIS_CODE.items()}


def pack_snapshot(field: ComplexField, beta: float) -> bytes:
    grid = field.grid
    head = [MAGIC, struct.pack("<III", VERSION, grid.ndim, _BASIS_CODE[grid.basis])]
    for ax in grid.axes:
        head.append(struct.pack("<ddQ", ax.a, ax.b, ax.m))
    head.append(struct.pack("<dd", field.time, beta))
    flat = np.ascontiguousarray(field.values, dtype=np.complex128)
    payload = flat.astype("<c16", copy=False).tobytes()
    return b"".join(head) + payload


def write_snapshot(path, field: ComplexField, beta: float) -> None:
    with open(path, "wb") as fh:
        fh.write(pack_snapshot(field, beta))


def unpack_snapshot(blob: bytes, source: str = "<snapshot>") -> tuple[ComplexField, float]:
    """Decode bytes into ``(field, beta)``; strict about every header field."""

    def need(n: int, what: str, offset: int) -> bytes:
        if len(blob) < offset + n:
            raise ValueError(
                f"{source}: truncated while reading {what}: need {offset + n} bytes, have {len(blob)}"
            )
        return blob[offset : offset + n]

    if need(4, "magic", 0) != MAGIC:
        raise ValueError(f"{source}: bad magic {blob[:4]!r}; not a snapshot file")
    version, ndim, basis_code = struct.unpack("<III", need(12, "header", 4))
    if version != VERSION:
        raise ValueError(f"{source}: unsupported snapshot version {version}")
    if ndim not in (1, 2):
        raise ValueError(f"{source}: bad dimension {ndim}")
    if basis_code not in _CODE_BASIS:
        raise ValueError(f"{source}: bad basis code {basis_code}")
    off = 16
    axes = []
    for _ in range(ndim):
        a, b, m = struct.unpack("<ddQ", need(24, "axis", off))
        off += 24
        axes.append((a, b, int(m)))
    t, beta = struct.unpack("<dd", need(16, "time/beta", off))
    off += 16
    grid = make_grid(axes, _CODE_BASIS[basis_code])
    count = 1
    for n in grid.shape:
        count *= n
    need(16 * count, "payload", off)
    if len(blob) != off + 16 * count:
        raise ValueError(
            f"{source}: trailing bytes after payload: expected {off + 16 * count}, have {len(blob)}"
        )
    values = np.frombuffer(blob, dtype="<c16", count=count, offset=off).reshape(grid.shape)
    field = ComplexField(grid, values.astype(np.complex128), time=t)
    return field, beta


def read_snapshot(path) -> tuple[ComplexField, float]:
    with open(path, "rb") as fh:
        blob = fh.read()
    return unpack_snapshot(blob, source=str(path))
