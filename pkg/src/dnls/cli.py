"""Batch front end.

Subcommands:

    dnls simulate --config F [--csv PATH] [--snapshot-times ...] [--snapshot-prefix P]
    dnls threshold --config F --delta-lo A --delta-hi B [--tol T] [--jobs N]
    dnls convergence --config F --ladder {k,M} --levels V1,V2,...
    dnls selftest

Data goes to stdout or the named files; progress and summaries go to
stderr.  Exit codes: 0 success, 1 usage or config error (including a
rejected threshold bracket), 2 numerical divergence during simulate,
3 I/O error.
"""

from __future__ import annotations

import argparse
import math
import sys

import numpy as np

from .config import ConfigError, parse_config
from .damping import FlowContext, LinearDamping, NumericDamping, PowerLawDamping
from .diagnostics import Arrested, Blowup, Diverged, norm_l2, observe
from .experiments import (
    GaussianSpec,
    build_state,
    find_threshold,
    gaussian_init,
    run_config,
    space_order_study,
    time_order_study,
)
from .snapshots import write_snapshot
from .spectral import Basis, kinetic_step, make_grid, sine_forward, sine_inverse
from .stepper import evolve, phase_shift_invariance_check, strang_step
from .timeseries import format_timeseries, write_timeseries


def _read_config(path: str):
    with open(path, "r", encoding="utf-8") as fh:
        text = fh.read()
    return parse_config(text, name=path)


def _parse_floats(text: str, what: str) -> list[float]:
    try:
        return [float(chunk) for chunk in text.split(",") if chunk.strip()]
    except ValueError:
        raise ConfigError(f"malformed {what}: {text!r}") from None


def _cmd_simulate(args) -> int:
    cfg = _read_config(args.config)
    state = build_state(cfg)
    snap_times = sorted(_parse_floats(args.snapshot_times, "--snapshot-times")) if args.snapshot_times else []
    for t in snap_times:
        if t < 0 or t > cfg.t_end:
            raise ConfigError(f"snapshot time {t} outside [0, {cfg.t_end}]")

    def snap(st, t):
        beta = st.schedule.beta_at(t)
        path = f"{args.snapshot_prefix}_{len(written):02d}_t{t:g}.snap"
        write_snapshot(path, st.field, beta)
        written.append(path)
        print(f"wrote {path}", file=sys.stderr)

    written: list[str] = []
    records = []
    segments = sorted(set(snap_times) | {cfg.t_end})
    if snap_times and snap_times[0] == 0.0:
        snap(state, 0.0)
    from .diagnostics import BlowupCriterion, classify_blowup

    first = observe(state)
    criterion = BlowupCriterion.from_initial(
        first, horizon=cfg.t_end, rho_cap_factor=cfg.rho_cap_factor, e_floor_factor=cfg.e_floor_factor
    )
    for t_stop in segments:
        if t_stop <= state.field.time:
            continue
        state, recs = evolve(state, t_stop, stride=cfg.stride)
        records.extend(recs if not records else recs[1:])
        if state.field.diverged:
            break
        if t_stop in snap_times:
            snap(state, t_stop)

    text = format_timeseries(records)
    if args.csv:
        with open(args.csv, "w", encoding="ascii", newline="\n") as fh:
            fh.write(text)
        print(f"wrote {args.csv}", file=sys.stderr)
    else:
        sys.stdout.write(text)

    outcome = classify_blowup(records, criterion)
    print(f"outcome: {_describe(outcome)}", file=sys.stderr)
    return 2 if isinstance(outcome, Diverged) else 0


def _describe(outcome) -> str:
    if isinstance(outcome, Arrested):
        return f"arrested through t = {outcome.t_end:g}"
    if isinstance(outcome, Blowup):
        return f"blowup criterion tripped at t = {outcome.t:g}"
    return f"non-finite values at t = {outcome.t:g}"


def _cmd_threshold(args) -> int:
    cfg = _read_config(args.config)
    if args.jobs < 1:
        raise ConfigError("--jobs must be >= 1")

    from .diagnostics import Classification
    from .experiments import _with_delta

    def probe(delta: float) -> Classification:
        outcome = run_config(_with_delta(cfg, delta), early_stop=True)[2]
        print(f"probe delta = {delta:.6g}: {_describe(outcome)}", file=sys.stderr)
        return outcome

    result = find_threshold(
        cfg, args.delta_lo, args.delta_hi, tol=args.tol, probe=probe, jobs=args.jobs
    )
    print(f"{result.delta:.6g}")
    print(
        f"threshold in [{result.lo:.6g}, {result.hi:.6g}] after {len(result.evaluations)} probes",
        file=sys.stderr,
    )
    if not result.monotone:
        print(
            "warning: classification was not monotone in delta; "
            "the criterion is unstable at this resolution",
            file=sys.stderr,
        )
    return 0


def _cmd_convergence(args) -> int:
    cfg = _read_config(args.config)
    levels = _parse_floats(args.levels, "--levels")
    if args.ladder == "k":
        study = time_order_study(cfg, levels)
    else:
        study = space_order_study(cfg, [int(v) for v in levels])
    print(f"{study.parameter},error,order")
    for i, lev in enumerate(study.levels):
        err = "%.6e" % study.errors[i] if i < len(study.errors) else ""
        order = "%.3f" % study.orders[i - 1] if 0 < i <= len(study.orders) else ""
        print(f"{lev:g},{err},{order}")
    return 0


def _selftest_checks():
    rng = np.random.default_rng(7)

    a, b, m = -3.0, 5.0, 64
    grid1 = make_grid([(a, b, m)])
    u = np.zeros(m + 1, dtype=complex)
    u[1:-1] = rng.standard_normal(m - 1) + 1j * rng.standard_normal(m - 1)
    coeffs = sine_forward(u)
    direct = np.zeros(m - 1, dtype=complex)
    x = grid1.nodes(0)
    for l in range(1, m):
        direct[l - 1] = (2.0 / m) * np.sum(u[1:-1] * np.sin(grid1.wavenumbers(0)[l - 1] * (x[1:-1] - a)))
    yield "sine analysis matches the direct sum", float(np.max(np.abs(coeffs - direct))), 1e-12
    yield "sine round trip", float(np.max(np.abs(sine_inverse(coeffs) - u))), 1e-12

    par_lhs = np.sum(np.abs(u[1:-1]) ** 2) / 64
    par_rhs = 0.5 * np.sum(np.abs(coeffs) ** 2)
    yield "discrete Parseval identity", abs(par_lhs - par_rhs), 1e-12

    from .spectral import SCHRODINGER, ComplexField

    mode = np.zeros(m + 1, dtype=complex)
    mu3 = grid1.wavenumbers(0)[2]
    mode[:] = np.sin(mu3 * (x - a))
    mode[0] = mode[-1] = 0.0
    f = ComplexField(grid1, mode)
    stepped = kinetic_step(f, 0.37, SCHRODINGER)
    expected = mode * np.exp(-0.5j * 0.37 * mu3**2)
    yield "kinetic step advances an eigenmode exactly", float(np.max(np.abs(stepped.values - expected))), 1e-12

    # s = 0 is excluded: the numeric fallback pins (h, F, G) to zero there
    # while e.g. the linear law has F(0, r) = delta r; both act identically
    # on a zero amplitude.
    ctx = FlowContext(beta=3.0, sigma=1.0)
    s = np.array([1e-3, 0.2, 1.0, 4.0])
    for law, label in (
        (LinearDamping(0.7), "linear law"),
        (PowerLawDamping(0.4, 1.0), "cubic law"),
        (PowerLawDamping(0.4, 2.0), "quintic law"),
    ):
        ref = NumericDamping(lambda rho, _l=law: _l.rate(ctx, rho), substeps=1024, panels=1024)
        err = 0.0
        for r in (0.01, 0.3):
            hn, fn, gn = ref.flow(ctx, s, r)
            err = max(
                err,
                float(np.max(np.abs(law.h(ctx, s, r) - hn))),
                float(np.max(np.abs(law.F(ctx, s, r) - fn))),
                float(np.max(np.abs(law.G(ctx, s, r) - gn))),
            )
        yield f"{label} matches the numeric flow", err, 1e-8

    from .stepper import Schedule, SimState, ZeroPotential

    grid2 = make_grid([(-8.0, 8.0, 32), (-8.0, 8.0, 32)])
    psi = gaussian_init(grid2, GaussianSpec(eps=1.0, gamma_y=1.0))
    st = SimState(
        field=psi, k=1e-2, law=LinearDamping(0.5), potential=ZeroPotential(), schedule=Schedule.constant(2.0)
    )
    n0 = norm_l2(st.field)
    for _ in range(10):
        st = strang_step(st)
    drift = abs(norm_l2(st.field) ** 2 / n0**2 - math.exp(-2 * 0.5 * st.field.time))
    yield "linear damping decays the norm exactly", drift, 1e-12

    st2 = SimState(
        field=psi.copy(), k=1e-2, law=PowerLawDamping(0.3, 1.0), potential=ZeroPotential(),
        schedule=Schedule.constant(2.0),
    )
    ok = phase_shift_invariance_check(st2, alpha=1.3, n_steps=5, tol=1e-11)
    yield "constant potential shifts only the phase", 0.0 if ok else 1.0, 0.5


def _cmd_selftest(_args) -> int:
    failures = 0
    for label, err, tol in _selftest_checks():
        good = err <= tol
        print(f"{'PASS' if good else 'FAIL'}  {label} (err={err:.3e}, tol={tol:.0e})")
        failures += 0 if good else 1
    return 0 if failures == 0 else 1


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="dnls", description="damped focusing NLS batch solver")
    sub = p.add_subparsers(dest="command", required=True)

    sim = sub.add_parser("simulate", help="integrate one configuration")
    sim.add_argument("--config", required=True, help="path to the run configuration")
    sim.add_argument("--csv", help="write the diagnostics series here instead of stdout")
    sim.add_argument("--snapshot-times", help="comma-separated times to dump field snapshots")
    sim.add_argument("--snapshot-prefix", default="snapshot", help="path prefix for snapshot files")
    sim.set_defaults(fn=_cmd_simulate)

    thr = sub.add_parser("threshold", help="bisect the critical damping strength")
    thr.add_argument("--config", required=True, help="path to the run configuration")
    thr.add_argument("--delta-lo", type=float, required=True, help="strength that must blow up")
    thr.add_argument("--delta-hi", type=float, required=True, help="strength that must arrest")
    thr.add_argument("--tol", type=float, default=None, help="half-width target for the bracket")
    thr.add_argument("--jobs", type=int, default=1, help="concurrent probes per round")
    thr.set_defaults(fn=_cmd_threshold)

    conv = sub.add_parser("convergence", help="refinement ladder in k or mesh size")
    conv.add_argument("--config", required=True, help="path to the run configuration")
    conv.add_argument("--ladder", choices=("k", "M"), required=True)
    conv.add_argument("--levels", required=True, help="comma-separated step sizes or mesh counts")
    conv.set_defaults(fn=_cmd_convergence)

    selftest = sub.add_parser("selftest", help="run built-in numerical identities")
    selftest.set_defaults(fn=_cmd_selftest)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse exits 2 for usage problems and 0 for --help; fold the
        # former into the documented usage-error code.
        return 0 if not exc.code else 1
    try:
        return args.fn(args)
    except (ConfigError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
