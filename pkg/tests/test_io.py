"""CSV time series and binary snapshot round trips, determinism, errors."""

import math
import struct

import numpy as np
import pytest

from dnls import (
    ComplexField,
    DiagnosticsRecord,
    format_timeseries,
    make_grid,
    pack_snapshot,
    read_snapshot,
    read_timeseries,
    unpack_snapshot,
    write_snapshot,
    write_timeseries,
)
from dnls.spectral import Basis
from dnls.snapshots import MAGIC, VERSION


def rec2(t, n=1.0, e=-0.5, rc=2.0, rm=2.2, w=(0.3, 0.2), diverged=False):
    return DiagnosticsRecord(t=t, n=n, e=e, rho_center=rc, rho_max=rm, widths=w, diverged=diverged)


class TestTimeseriesFormat:
    def test_header_2d(self):
        text = format_timeseries([rec2(0.0)])
        assert text.splitlines()[0] == "t,N,E,rho_center,rho_max,sigma_x,sigma_y,diverged"

    def test_header_1d(self):
        text = format_timeseries([rec2(0.0, w=(0.3,))])
        assert text.splitlines()[0] == "t,N,E,rho_center,rho_max,sigma_x,diverged"

    def test_round_trip_exact_doubles(self, tmp_path):
        awkward = [
            rec2(0.1, n=1 / 3, e=-0.30000000000000004, rc=math.pi, rm=1e-308),
            rec2(0.2, n=6.02e23, e=-1e-17, rc=2.0**-52, rm=1.7976931348623157e308),
        ]
        path = tmp_path / "series.csv"
        write_timeseries(path, awkward)
        back = read_timeseries(path)
        for orig, got in zip(awkward, back):
            assert got.t == orig.t and got.n == orig.n and got.e == orig.e
            assert got.rho_center == orig.rho_center and got.rho_max == orig.rho_max
            assert got.widths == orig.widths and got.diverged is orig.diverged

    def test_non_finite_cells(self, tmp_path):
        divergent = rec2(0.5, n=math.nan, e=math.nan, rc=math.nan, rm=math.inf,
                         w=(math.nan, -math.inf), diverged=True)
        path = tmp_path / "div.csv"
        write_timeseries(path, [rec2(0.0), divergent])
        last = path.read_text().splitlines()[-1]
        assert last == "0.5,nan,nan,nan,inf,nan,-inf,1"
        back = read_timeseries(path)
        assert back[-1].diverged is True
        assert math.isnan(back[-1].n) and back[-1].rho_max == math.inf

    def test_byte_determinism(self, tmp_path):
        recs = [rec2(i * 0.01, n=math.sqrt(i + 1)) for i in range(20)]
        p1, p2 = tmp_path / "a.csv", tmp_path / "b.csv"
        write_timeseries(p1, recs)
        write_timeseries(p2, list(recs))
        assert p1.read_bytes() == p2.read_bytes()
        assert b"\r" not in p1.read_bytes()

    def test_empty_series_rejected(self):
        with pytest.raises(ValueError, match="no records"):
            format_timeseries([])

    def test_mixed_dimensions_rejected(self):
        with pytest.raises(ValueError, match="mix 1-D and 2-D"):
            format_timeseries([rec2(0.0), rec2(0.1, w=(0.3,))])

    def test_read_rejects_unknown_header(self, tmp_path):
        path = tmp_path / "bad.csv"
        path.write_text("time,norm\n0,1\n")
        with pytest.raises(ValueError, match="unrecognised header"):
            read_timeseries(path)

    def test_read_reports_line_of_bad_row(self, tmp_path):
        path = tmp_path / "bad.csv"
        good = format_timeseries([rec2(0.0)])
        path.write_text(good + "1,2,3\n")
        with pytest.raises(ValueError, match=r"bad\.csv:3: expected 8 columns, got 3"):
            read_timeseries(path)


def sample_field(basis=Basis.SINE, ndim=2, seed=0):
    rng = np.random.default_rng(seed)
    axes = [(-3.0, 5.0, 16), (-2.0, 2.0, 8)][: ndim]
    grid = make_grid(axes, basis)
    values = rng.standard_normal(grid.shape) + 1j * rng.standard_normal(grid.shape)
    if basis is Basis.SINE:
        for axis in range(ndim):
            sl = [slice(None)] * ndim
            for edge in (0, -1):
                sl[axis] = edge
                values[tuple(sl)] = 0.0
    return ComplexField(grid, values, time=0.625)


class TestSnapshots:
    @pytest.mark.parametrize("basis", [Basis.SINE, Basis.FOURIER])
    @pytest.mark.parametrize("ndim", [1, 2])
    def test_bit_exact_round_trip(self, tmp_path, basis, ndim):
        field = sample_field(basis, ndim)
        path = tmp_path / "field.snap"
        write_snapshot(path, field, beta=8.0)
        back, beta = read_snapshot(path)
        assert beta == 8.0
        assert back.time == field.time
        assert back.grid == field.grid
        assert np.array_equal(back.values, field.values)  # bitwise for floats
        # And a second write is byte-identical.
        blob = pack_snapshot(field, 8.0)
        assert path.read_bytes() == blob

    def test_header_layout_is_frozen(self):
        field = sample_field(ndim=1)
        blob = pack_snapshot(field, beta=2.5)
        assert blob[:4] == MAGIC
        version, ndim, basis = struct.unpack_from("<III", blob, 4)
        assert (version, ndim, basis) == (VERSION, 1, 0)
        a, b, m = struct.unpack_from("<ddQ", blob, 16)
        assert (a, b, m) == (-3.0, 5.0, 16)
        t, beta = struct.unpack_from("<dd", blob, 40)
        assert (t, beta) == (0.625, 2.5)
        assert len(blob) == 56 + 16 * 17

    def test_bad_magic(self):
        with pytest.raises(ValueError, match="bad magic.*not a snapshot"):
            unpack_snapshot(b"NOPE" + bytes(100))

    def test_unknown_version(self):
        blob = bytearray(pack_snapshot(sample_field(ndim=1), 0.0))
        blob[4:8] = struct.pack("<I", 99)
        with pytest.raises(ValueError, match="unsupported snapshot version 99"):
            unpack_snapshot(bytes(blob))

    def test_bad_basis_code(self):
        blob = bytearray(pack_snapshot(sample_field(ndim=1), 0.0))
        blob[12:16] = struct.pack("<I", 7)
        with pytest.raises(ValueError, match="bad basis code 7"):
            unpack_snapshot(bytes(blob))

    def test_bad_dimension(self):
        blob = bytearray(pack_snapshot(sample_field(ndim=1), 0.0))
        blob[8:12] = struct.pack("<I", 3)
        with pytest.raises(ValueError, match="bad dimension 3"):
            unpack_snapshot(bytes(blob))

    def test_truncation_names_byte_counts(self, tmp_path):
        blob = pack_snapshot(sample_field(ndim=2), 1.0)
        clipped = blob[: len(blob) - 24]
        with pytest.raises(ValueError, match=rf"need {len(blob)} bytes, have {len(blob) - 24}"):
            unpack_snapshot(clipped)

    def test_truncated_header(self):
        with pytest.raises(ValueError, match="truncated while reading header"):
            unpack_snapshot(MAGIC + b"\x01")

    def test_trailing_bytes_rejected(self):
        blob = pack_snapshot(sample_field(ndim=1), 1.0)
        with pytest.raises(ValueError, match="trailing bytes"):
            unpack_snapshot(blob + b"\x00")

    def test_source_name_in_errors(self, tmp_path):
        path = tmp_path / "junk.snap"
        path.write_bytes(b"JUNKJUNKJUNK")
        with pytest.raises(ValueError, match="junk.snap"):
            read_snapshot(path)

    def test_values_copy_is_writable(self, tmp_path):
        # frombuffer yields read-only memory; the field must not inherit that.
        path = tmp_path / "field.snap"
        write_snapshot(path, sample_field(), beta=0.0)
        back, _ = read_snapshot(path)
        back.values[1, 1] = 3.0 + 4.0j
        assert back.values[1, 1] == 3.0 + 4.0j
