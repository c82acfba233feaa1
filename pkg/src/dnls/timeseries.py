"""Diagnostics time series as CSV.

Layout (one header row, LF line endings, no trailing whitespace):

    t,N,E,rho_center,rho_max,sigma_x,sigma_y,diverged

Numbers are written with repr-quality precision (%.17g) so parsing the
file recovers the exact doubles; non-finite values appear as ``nan`` /
``inf`` / ``-inf``; ``diverged`` is 0 or 1.  1-D series omit the
``sigma_y`` column.  Writing is deterministic: identical records produce
byte-identical files.
"""

from __future__ import annotations

from dataclasses import dataclass

from .diagnostics import DiagnosticsRecord

_BASE_COLUMNS = ("t", "N", "E", "rho_center", "rho_max")


def _header(ndim: int) -> str:
    widths = ("sigma_x",) if ndim == 1 else ("sigma_x", "sigma_y")
    return ",".join(_BASE_COLUMNS + widths + ("diverged",))


def _num(x: float) -> str:
    return "%.17g" % (x,)


def format_timeseries(records) -> str:
    """Render records to CSV text (with trailing newline)."""
    records = list(records)
    if not records:
        raise ValueError("no records to write")
    ndim = len(records[0].widths)
    if ndim not in (1, 2):
        raise ValueError(f"records carry {ndim} width entries; expected 1 or 2")
    lines = [_header(ndim)]
    for rec in records:
        if len(rec.widths) != ndim:
            raise ValueError("records mix 1-D and 2-D width tuples")
        cells = [_num(rec.t), _num(rec.n), _num(rec.e), _num(rec.rho_center), _num(rec.rho_max)]
        cells += [_num(w) for w in rec.widths]
        cells.append("1" if rec.diverged else "0")
        lines.append(",".join(cells))
    return "\n".join(lines) + "\n"


def write_timeseries(path, records) -> None:
    text = format_timeseries(records)
    with open(path, "w", encoding="ascii", newline="\n") as fh:
        fh.write(text)


def read_timeseries(path) -> list[DiagnosticsRecord]:
    """Parse a CSV written by :func:`write_timeseries`."""
    with open(path, "r", encoding="ascii", newline="") as fh:
        text = fh.read()
    lines = [ln for ln in text.split("\n") if ln]
    if not lines:
        raise ValueError(f"{path}: empty time series")
    header = lines[0].split(",")
    if header == list(_BASE_COLUMNS + ("sigma_x", "diverged")):
        ndim = 1
    elif header == list(_BASE_COLUMNS + ("sigma_x", "sigma_y", "diverged")):
        ndim = 2
    else:
        raise ValueError(f"{path}: unrecognised header {lines[0]!r}")
    out = []
    want = 6 + ndim
    for i, line in enumerate(lines[1:], start=2):
        cells = line.split(",")
        if len(cells) != want:
            raise ValueError(f"{path}:{i}: expected {want} columns, got {len(cells)}")
        nums = [float(c) for c in cells[:-1]]
        out.append(
            DiagnosticsRecord(
                t=nums[0],
                n=nums[1],
                e=nums[2],
                rho_center=nums[3],
                rho_max=nums[4],
                widths=tuple(nums[5 : 5 + ndim]),
                diverged=cells[-1] == "1",
            )
        )
    return out
