"""Trapped-condensate ramp benchmark: property-based checks.

The reference initial state for this benchmark is the ground state of
the repulsive (beta = -40) trapped equation, which the library does not
compute; runs substitute the energy-minimising Gaussian (or load a
snapshot).  The checks below therefore assert the phenomenology rather
than reference numbers: the ramped-up attraction collapses the cloud
when underdamped, stronger damping delays and finally prevents the
collapse (threshold between 1.1 and 1.25), and the arrested cloud
breathes in the trap instead of contracting monotonically.
"""

import math
from dataclasses import replace

import numpy as np
import pytest

from dnls import (
    Arrested,
    Blowup,
    build_state,
    format_timeseries,
    run_config,
    trapped_ramp_config,
    write_snapshot,
)

SWITCH = 0.1  # end of the beta ramp; damping switches on here


@pytest.fixture(scope="module")
def runs():
    """One early-stopping run per damping strength, shared by the tests."""
    out = {}
    for key, cfg in (
        ("none", replace(trapped_ramp_config(), law="none", delta=None)),
        (1.1, trapped_ramp_config(delta=1.1)),
        (1.25, trapped_ramp_config(delta=1.25)),
    ):
        state, records, outcome = run_config(cfg, early_stop=True)
        out[key] = (records, outcome)
    return out


def _direction_changes(values):
    d = np.sign(np.diff(values))
    d = d[d != 0]
    return int(np.sum(d[1:] != d[:-1])) if d.size > 1 else 0


class TestCollapseSide:
    def test_undamped_ramp_collapses(self, runs):
        _, outcome = runs["none"]
        assert isinstance(outcome, Blowup)
        assert outcome.t > SWITCH  # the repulsive phase itself is benign

    def test_underdamped_run_collapses(self, runs):
        _, outcome = runs[1.1]
        assert isinstance(outcome, Blowup)

    def test_damping_delays_the_collapse(self, runs):
        assert runs["none"][1].t < runs[1.1][1].t

    def test_normalization_conserved_while_damping_is_off(self, runs):
        records, _ = runs[1.1]
        pre = [r.n for r in records if r.t <= SWITCH]
        assert pre and max(abs(n - 1.0) for n in pre) < 1e-10


class TestArrestedSide:
    def test_arrested_above_threshold(self, runs):
        records, outcome = runs[1.25]
        assert isinstance(outcome, Arrested)
        assert math.isclose(outcome.t_end, 2.8)

    def test_widths_oscillate_after_the_ramp(self, runs):
        records, _ = runs[1.25]
        sigma_y = [r.widths[1] for r in records if r.t >= SWITCH + 0.02]
        assert _direction_changes(sigma_y) >= 4

    def test_damping_consumes_the_cloud(self, runs):
        records, _ = runs[1.25]
        ns = [r.n for r in records]
        assert all(b <= a + 1e-12 for a, b in zip(ns, ns[1:]))
        assert records[-1].n < 0.01

    def test_peak_density_ordered_by_damping(self, runs):
        peak = {k: max(r.rho_max for r in recs) for k, (recs, _) in runs.items()}
        assert peak[1.25] < peak[1.1]


def test_snapshot_seed_reproduces_the_gaussian_run(tmp_path):
    """Loading the substitute state from a snapshot changes nothing."""
    short = replace(trapped_ramp_config(delta=1.25), t_end=0.3)
    seed = tmp_path / "ground.snap"
    write_snapshot(seed, build_state(short).field, -40.0)
    seeded = replace(
        trapped_ramp_config(delta=1.25, init_path=str(seed)), t_end=0.3
    )
    _, recs_a, _ = run_config(short)
    _, recs_b, _ = run_config(seeded)
    assert format_timeseries(recs_a) == format_timeseries(recs_b)
