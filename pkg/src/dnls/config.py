"""Plain-text run configuration: strict INI-style parser and serializer.

Format: ``[section]`` headers and ``key = value`` lines; ``#`` starts a
comment (whole line, or after whitespace).  Unknown sections or keys,
duplicate keys and malformed lines are all hard errors carrying the line
number.  Schedules are written as comma-separated ``time:value`` pairs
with strictly increasing times, e.g. ``beta_points = 0:-40, 0.1:50``;
values clamp outside the covered range.  ``serialize_config`` echoes
every effective value (defaults included) and round-trips through
``parse_config``.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass

import numpy as np

from .damping import (
    CubicQuinticDamping,
    DampingLaw,
    FeedingQuinticDamping,
    GinzburgLandauLaw,
    LinearDamping,
    NoDamping,
    PowerLawDamping,
)
from .spectral import SCHRODINGER, Basis, Dispersion, Grid, cgl_dispersion, make_grid
from .stepper import HarmonicPotential, Potential, Schedule, ZeroPotential


class ConfigError(ValueError):
    """Raised for any syntactic or semantic configuration problem."""


Points = tuple[tuple[float, float], ...]


@dataclass(frozen=True)
class SimConfig:
    """Validated, plain-value description of one run."""

    # [grid]
    basis: str = "sine"
    xmin: float = -16.0
    xmax: float = 16.0
    mx: int = 256
    ymin: float | None = None
    ymax: float | None = None
    my: int | None = None

    # [equation]
    sigma: float = 1.0
    beta_points: Points = ((0.0, 8.0),)
    dispersion: str = "schrodinger"
    cgl_eps: float = 0.0

    # [potential]
    potential: str = "zero"
    gamma_x: float | None = None
    gamma_y: float | None = None

    # [damping]
    law: str = "none"
    delta: float | None = None
    q: float | None = None
    delta1: float | None = None
    delta2: float | None = None
    delta_scale_points: Points = ((0.0, 1.0),)

    # [time]
    k: float = 1e-3
    t_end: float = 1.0

    # [init]
    init: str = "gaussian"
    init_eps: float = 0.2
    init_gamma_y: float = 1.0
    init_path: str | None = None

    # [blowup]
    rho_cap_factor: float = 1e3
    e_floor_factor: float = 1e3

    # [output]
    stride: int = 10

    def __post_init__(self):
        self.build_grid()
        self.build_law()
        self.build_schedule()
        self.build_potential()
        self.build_dispersion()
        if not (math.isfinite(self.k) and self.k > 0):
            raise ConfigError(f"config error in [time]: k must be positive, got {self.k}")
        if not (math.isfinite(self.t_end) and self.t_end > 0):
            raise ConfigError(f"config error in [time]: t_end must be positive, got {self.t_end}")
        if self.init not in ("gaussian", "snapshot"):
            raise ConfigError(f"config error in [init]: unknown init kind {self.init!r}")
        if self.init == "snapshot":
            if not self.init_path:
                raise ConfigError("config error in [init]: init kind 'snapshot' requires key 'path'")
        elif self.init_path is not None:
            raise ConfigError("config error in [init]: key 'path' does not apply to init kind 'gaussian'")
        if not (math.isfinite(self.init_eps) and self.init_eps > 0):
            raise ConfigError("config error in [init]: eps must be positive")
        if not (math.isfinite(self.init_gamma_y) and self.init_gamma_y > 0):
            raise ConfigError("config error in [init]: gamma_y must be positive")
        if not (math.isfinite(self.rho_cap_factor) and self.rho_cap_factor > 1):
            raise ConfigError("config error in [blowup]: rho_cap_factor must exceed 1")
        if not (math.isfinite(self.e_floor_factor) and self.e_floor_factor > 0):
            raise ConfigError("config error in [blowup]: e_floor_factor must be positive")
        if self.stride < 1:
            raise ConfigError("config error in [output]: stride must be >= 1")

    # -- builders ---------------------------------------------------------

    def build_grid(self) -> Grid:
        try:
            basis = Basis(self.basis)
        except ValueError:
            raise ConfigError(f"config error in [grid]: unknown basis {self.basis!r}") from None
        axes = [(self.xmin, self.xmax, self.mx)]
        ys = (self.ymin, self.ymax, self.my)
        if any(v is not None for v in ys):
            if any(v is None for v in ys):
                raise ConfigError("config error in [grid]: ymin, ymax and my must be given together")
            axes.append(ys)
        try:
            return make_grid(axes, basis)
        except ValueError as exc:
            raise ConfigError(f"config error in [grid]: {exc}") from None

    def build_law(self) -> DampingLaw:
        kind = self.law
        given = {name: getattr(self, name) for name in ("delta", "q", "delta1", "delta2")}
        wanted = {
            "none": (),
            "linear": ("delta",),
            "power": ("delta", "q"),
            "cubic_quintic": ("delta1", "delta2"),
            "feeding_quintic": ("delta1", "delta2"),
            "ginzburg_landau": ("delta1", "delta2"),
        }
        if kind not in wanted:
            raise ConfigError(f"config error in [damping]: unknown law {kind!r}")
        if kind == "ginzburg_landau":
            # The closed-form flow is derived for the cubic, beta = 1 equation.
            if self.sigma != 1.0 or any(b != 1.0 for _, b in self.beta_points):
                raise ConfigError(
                    "config error in [damping]: law 'ginzburg_landau' requires sigma = 1 and beta = 1"
                )
        for name, value in given.items():
            if name in wanted[kind] and value is None:
                raise ConfigError(f"config error in [damping]: law {kind!r} requires key {name!r}")
            if name not in wanted[kind] and value is not None:
                raise ConfigError(f"config error in [damping]: key {name!r} does not apply to law {kind!r}")
        try:
            if kind == "none":
                return NoDamping()
            if kind == "linear":
                return LinearDamping(self.delta)
            if kind == "power":
                return PowerLawDamping(self.delta, self.q)
            if kind == "cubic_quintic":
                return CubicQuinticDamping(self.delta1, self.delta2)
            if kind == "feeding_quintic":
                return FeedingQuinticDamping(self.delta1, self.delta2)
            return GinzburgLandauLaw(self.delta1, self.delta2)
        except ValueError as exc:
            raise ConfigError(f"config error in [damping]: {exc}") from None

    def build_schedule(self) -> Schedule:
        try:
            times = sorted({t for t, _ in self.beta_points} | {t for t, _ in self.delta_scale_points})
            bt = [t for t, _ in self.beta_points]
            bv = [v for _, v in self.beta_points]
            st = [t for t, _ in self.delta_scale_points]
            sv = [v for _, v in self.delta_scale_points]
            betas = tuple(float(np.interp(t, bt, bv)) for t in times)
            scales = tuple(float(np.interp(t, st, sv)) for t in times)
            return Schedule(times=tuple(times), betas=betas, delta_scales=scales)
        except ValueError as exc:
            raise ConfigError(f"config error in [equation]/[damping]: {exc}") from None

    def build_potential(self) -> Potential:
        if self.potential == "zero":
            if self.gamma_x is not None or self.gamma_y is not None:
                raise ConfigError("config error in [potential]: trap frequencies given for kind 'zero'")
            return ZeroPotential()
        if self.potential == "harmonic":
            gx = self.gamma_x
            if gx is None:
                raise ConfigError("config error in [potential]: harmonic potential requires gamma_x")
            gams = [gx]
            two_d = self.my is not None
            if two_d:
                if self.gamma_y is None:
                    raise ConfigError("config error in [potential]: 2-D harmonic potential requires gamma_y")
                gams.append(self.gamma_y)
            elif self.gamma_y is not None:
                raise ConfigError("config error in [potential]: gamma_y given for a 1-D grid")
            try:
                return HarmonicPotential(tuple(float(g) for g in gams))
            except ValueError as exc:
                raise ConfigError(f"config error in [potential]: {exc}") from None
        raise ConfigError(f"config error in [potential]: unknown kind {self.potential!r}")

    def build_dispersion(self) -> Dispersion:
        if self.dispersion == "schrodinger":
            if self.cgl_eps != 0.0:
                raise ConfigError("config error in [equation]: cgl_eps applies only to dispersion = cgl")
            return SCHRODINGER
        if self.dispersion == "cgl":
            try:
                return cgl_dispersion(self.cgl_eps)
            except ValueError as exc:
                raise ConfigError(f"config error in [equation]: {exc}") from None
        raise ConfigError(f"config error in [equation]: unknown dispersion {self.dispersion!r}")


# -- text format ------------------------------------------------------------

_SECTIONS: dict[str, dict[str, str]] = {
    "grid": {
        "basis": "str",
        "xmin": "float",
        "xmax": "float",
        "mx": "int",
        "ymin": "float",
        "ymax": "float",
        "my": "int",
    },
    "equation": {
        "sigma": "float",
        "beta": "float",
        "beta_points": "points",
        "dispersion": "str",
        "cgl_eps": "float",
    },
    "potential": {"kind": "str", "gamma_x": "float", "gamma_y": "float"},
    "damping": {
        "law": "str",
        "delta": "float",
        "q": "float",
        "delta1": "float",
        "delta2": "float",
        "delta_scale": "float",
        "delta_scale_points": "points",
    },
    "time": {"k": "float", "t_end": "float"},
    "init": {"kind": "str", "eps": "float", "gamma_y": "float", "path": "str"},
    "blowup": {"rho_cap_factor": "float", "e_floor_factor": "float"},
    "output": {"stride": "int"},
}

# (section, key) -> SimConfig field; identity unless listed.
_RENAMES = {
    ("potential", "kind"): "potential",
    ("init", "kind"): "init",
    ("init", "eps"): "init_eps",
    ("init", "gamma_y"): "init_gamma_y",
    ("init", "path"): "init_path",
}

_COMMENT_RE = re.compile(r"(^|\s)#.*$")


def _strip_comment(line: str) -> str:
    return _COMMENT_RE.sub("", line).strip()


def _parse_points(text: str, where: str) -> Points:
    pts = []
    for chunk in text.split(","):
        chunk = chunk.strip()
        if not chunk:
            raise ConfigError(f"{where}: empty entry in schedule list")
        if ":" not in chunk:
            raise ConfigError(f"{where}: expected time:value, got {chunk!r}")
        t_str, v_str = chunk.split(":", 1)
        try:
            pts.append((float(t_str), float(v_str)))
        except ValueError:
            raise ConfigError(f"{where}: malformed number in {chunk!r}") from None
    for i in range(len(pts) - 1):
        if not pts[i + 1][0] > pts[i][0]:
            raise ConfigError(f"{where}: schedule times must be strictly increasing")
    return tuple(pts)


def parse_config(text: str, name: str = "<config>") -> SimConfig:
    """Parse configuration text into a validated :class:`SimConfig`."""
    section = None
    seen: dict[tuple[str, str], int] = {}
    raw: dict[tuple[str, str], tuple[int, str]] = {}

    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = _strip_comment(line)
        if not stripped:
            continue
        if stripped.startswith("["):
            if not stripped.endswith("]"):
                raise ConfigError(f"{name}:{lineno}: malformed section header {stripped!r}")
            section = stripped[1:-1].strip()
            if section not in _SECTIONS:
                raise ConfigError(f"{name}:{lineno}: unknown section [{section}]")
            continue
        if "=" not in stripped:
            raise ConfigError(f"{name}:{lineno}: expected 'key = value', got {stripped!r}")
        if section is None:
            raise ConfigError(f"{name}:{lineno}: key outside any [section]")
        key, value = (part.strip() for part in stripped.split("=", 1))
        if key not in _SECTIONS[section]:
            raise ConfigError(f"{name}:{lineno}: unknown key {key!r} in [{section}]")
        if (section, key) in seen:
            raise ConfigError(
                f"{name}:{lineno}: duplicate key {key!r} in [{section}] (first set at line {seen[(section, key)]})"
            )
        seen[(section, key)] = lineno
        raw[(section, key)] = (lineno, value)

    # Mutually exclusive spellings of the schedules.
    for flat, listed in (("equation", "beta"), ("damping", "delta_scale")):
        if (flat, listed) in raw and (flat, listed + "_points") in raw:
            lineno = raw[(flat, listed + "_points")][0]
            raise ConfigError(f"{name}:{lineno}: give either {listed!r} or {listed + '_points'!r}, not both")

    # Gaussian shape keys are inert for snapshot initial data; rejecting them
    # keeps serialize(parse(text)) an identity.
    if raw.get(("init", "kind"), (0, ""))[1].strip() == "snapshot":
        for key in ("eps", "gamma_y"):
            if ("init", key) in raw:
                lineno = raw[("init", key)][0]
                raise ConfigError(f"{name}:{lineno}: key {key!r} does not apply to init kind 'snapshot'")

    kwargs = {}
    for (section, key), (lineno, value) in raw.items():
        kind = _SECTIONS[section][key]
        where = f"{name}:{lineno}"
        if kind == "points":
            parsed = _parse_points(value, where)
        elif kind == "float":
            try:
                parsed = float(value)
            except ValueError:
                raise ConfigError(f"{where}: expected a number for {key!r}, got {value!r}") from None
        elif kind == "int":
            try:
                parsed = int(value)
            except ValueError:
                raise ConfigError(f"{where}: expected an integer for {key!r}, got {value!r}") from None
        else:
            parsed = value
        if section == "equation" and key == "beta":
            kwargs["beta_points"] = ((0.0, parsed),)
        elif section == "damping" and key == "delta_scale":
            kwargs["delta_scale_points"] = ((0.0, parsed),)
        else:
            kwargs[_RENAMES.get((section, key), key)] = parsed

    try:
        return SimConfig(**kwargs)
    except ConfigError:
        raise
    except ValueError as exc:
        raise ConfigError(f"{name}: {exc}") from None


def _fmt(value) -> str:
    if isinstance(value, float):
        return repr(value)
    return str(value)


def _fmt_points(points: Points) -> str:
    return ", ".join(f"{_fmt(t)}:{_fmt(v)}" for t, v in points)


def serialize_config(cfg: SimConfig) -> str:
    """Canonical text with every effective value spelled out."""
    lines = ["[grid]", f"basis = {cfg.basis}"]
    lines += [f"xmin = {_fmt(cfg.xmin)}", f"xmax = {_fmt(cfg.xmax)}", f"mx = {cfg.mx}"]
    if cfg.my is not None:
        lines += [f"ymin = {_fmt(cfg.ymin)}", f"ymax = {_fmt(cfg.ymax)}", f"my = {cfg.my}"]

    lines += ["", "[equation]", f"sigma = {_fmt(cfg.sigma)}"]
    if cfg.beta_points == ((0.0, cfg.beta_points[0][1]),):
        lines.append(f"beta = {_fmt(cfg.beta_points[0][1])}")
    else:
        lines.append(f"beta_points = {_fmt_points(cfg.beta_points)}")
    lines.append(f"dispersion = {cfg.dispersion}")
    if cfg.dispersion == "cgl":
        lines.append(f"cgl_eps = {_fmt(cfg.cgl_eps)}")

    lines += ["", "[potential]", f"kind = {cfg.potential}"]
    if cfg.gamma_x is not None:
        lines.append(f"gamma_x = {_fmt(cfg.gamma_x)}")
    if cfg.gamma_y is not None:
        lines.append(f"gamma_y = {_fmt(cfg.gamma_y)}")

    lines += ["", "[damping]", f"law = {cfg.law}"]
    for name in ("delta", "q", "delta1", "delta2"):
        value = getattr(cfg, name)
        if value is not None:
            lines.append(f"{name} = {_fmt(value)}")
    if cfg.delta_scale_points == ((0.0, cfg.delta_scale_points[0][1]),):
        lines.append(f"delta_scale = {_fmt(cfg.delta_scale_points[0][1])}")
    else:
        lines.append(f"delta_scale_points = {_fmt_points(cfg.delta_scale_points)}")

    lines += ["", "[time]", f"k = {_fmt(cfg.k)}", f"t_end = {_fmt(cfg.t_end)}"]
    lines += ["", "[init]", f"kind = {cfg.init}"]
    if cfg.init == "snapshot":
        lines.append(f"path = {cfg.init_path}")
    else:
        lines += [f"eps = {_fmt(cfg.init_eps)}", f"gamma_y = {_fmt(cfg.init_gamma_y)}"]
    lines += [
        "",
        "[blowup]",
        f"rho_cap_factor = {_fmt(cfg.rho_cap_factor)}",
        f"e_floor_factor = {_fmt(cfg.e_floor_factor)}",
    ]
    lines += ["", "[output]", f"stride = {cfg.stride}", ""]
    return "\n".join(lines)
