"""Exact flow maps for the damped density equation.

With rho = |u|^2 the splitting substep reduces pointwise to

    rho'(tau) = -2 g(rho) rho,      rho(0) = s,

whose solution h(s, tau) feeds the amplitude factor

    F(s, r) = int_0^r g(h(s, tau)) dtau = -log(h(s, r)/s) / 2

and the accumulated focusing phase

    G(s, r) = int_0^r beta h(s, tau)^sigma dtau.

Each law below carries closed forms for (h, F, G); :class:`NumericDamping`
falls back to fixed-step RK4 plus Simpson quadrature for laws supplied as
bare callables.  All maps are vectorised over s and accept scalar or
array tau/r >= 0.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Callable

import numpy as np

_Q_SIGMA_TOL = 1e-12
_NEWTON_RTOL = 1e-12
_NEWTON_MAX_ITER = 100


@dataclass(frozen=True)
class FlowContext:
    """Equation parameters the flow maps need besides the law itself."""

    beta: float
    sigma: float = 1.0

    def __post_init__(self):
        if not math.isfinite(self.beta):
            raise ValueError("beta must be finite")
        if not (math.isfinite(self.sigma) and self.sigma > 0):
            raise ValueError(f"sigma must be positive, got {self.sigma}")


def _asarray(x) -> tuple[np.ndarray, bool]:
    arr = np.asarray(x, dtype=float)
    return arr, arr.ndim == 0


def _maybe_scalar(arr: np.ndarray, scalar: bool):
    return float(arr) if scalar else arr


def _check_nonneg(name: str, value):
    if np.any(np.asarray(value) < 0):
        raise ValueError(f"{name} must be nonnegative")


# Below this the ratio helpers switch to their two-term series: the exact
# expressions hit 0/0 once intermediate products (e.g. p*x) underflow to
# zero for subnormal x, which Gaussian tail densities do produce.
_SERIES_CUTOFF = 1e-15

# Densities below this take the identity flow h = s: every law here has
# g(s) -> 0 at least linearly, so the relative drift over any half step is
# O(s) < 1e-100, far below double precision; the closed forms themselves
# degrade into 0/0 once beta*s products go subnormal.
_TINY_S = 1e-100


def _expm1_ratio(x: np.ndarray) -> np.ndarray:
    """(1 - exp(-x)) / x with the x -> 0 limit handled."""
    x = np.asarray(x, dtype=float)
    tiny = np.abs(x) < _SERIES_CUTOFF
    safe = np.where(tiny, 1.0, x)
    return np.where(tiny, 1.0 - 0.5 * x, -np.expm1(-safe) / safe)


def _log1p_ratio(x: np.ndarray) -> np.ndarray:
    """log(1 + x) / x with the x -> 0 limit handled."""
    x = np.asarray(x, dtype=float)
    tiny = np.abs(x) < _SERIES_CUTOFF
    safe = np.where(tiny, 1.0, x)
    return np.where(tiny, 1.0 - 0.5 * x, np.log1p(safe) / safe)


def _pow_ratio(p: float, x: np.ndarray) -> np.ndarray:
    """((1 + x)^p - 1) / (p x), limits at p -> 0 and x -> 0 included."""
    x = np.asarray(x, dtype=float)
    if abs(p) < _Q_SIGMA_TOL:
        return _log1p_ratio(x)
    tiny = np.abs(x) < _SERIES_CUTOFF
    safe = np.where(tiny, 1.0, x)
    return np.where(tiny, 1.0 + 0.5 * (p - 1.0) * x, np.expm1(p * np.log1p(safe)) / (p * safe))


class DampingLaw:
    """Base class; subclasses provide h/F/G and the instantaneous rate g."""

    #: True when g(rho) >= 0 for all rho >= 0, which makes every substep a
    #: pointwise contraction of |u|.
    nonnegative_rate = True

    def rate(self, ctx: FlowContext, rho):
        raise NotImplementedError

    def h(self, ctx: FlowContext, s, tau):
        raise NotImplementedError

    def F(self, ctx: FlowContext, s, r):
        raise NotImplementedError

    def G(self, ctx: FlowContext, s, r):
        raise NotImplementedError

    def scaled(self, factor: float) -> "DampingLaw":
        """Law with the overall rate multiplied by ``factor`` (0 disables)."""
        raise NotImplementedError


@dataclass(frozen=True)
class NoDamping(DampingLaw):
    """g = 0: the density is frozen and only the focusing phase advances."""

    def rate(self, ctx, rho):
        rho, scalar = _asarray(rho)
        return _maybe_scalar(np.zeros_like(rho), scalar)

    def h(self, ctx, s, tau):
        s, scalar = _asarray(s)
        _check_nonneg("s", s)
        _check_nonneg("tau", tau)
        tau = np.asarray(tau, dtype=float)
        return _maybe_scalar(s + 0.0 * tau, scalar and tau.ndim == 0)

    def F(self, ctx, s, r):
        s, scalar = _asarray(s)
        _check_nonneg("s", s)
        _check_nonneg("r", r)
        r = np.asarray(r, dtype=float)
        return _maybe_scalar(0.0 * s * r, scalar and r.ndim == 0)

    def G(self, ctx, s, r):
        s, scalar = _asarray(s)
        _check_nonneg("s", s)
        _check_nonneg("r", r)
        r = np.asarray(r, dtype=float)
        return _maybe_scalar(ctx.beta * s**ctx.sigma * r, scalar and r.ndim == 0)

    def scaled(self, factor):
        return self


@dataclass(frozen=True)
class LinearDamping(DampingLaw):
    """g = delta: exponential decay at a density-independent rate."""

    delta: float

    def __post_init__(self):
        if not (math.isfinite(self.delta) and self.delta > 0):
            raise ValueError(f"delta must be positive, got {self.delta}")

    def rate(self, ctx, rho):
        rho, scalar = _asarray(rho)
        return _maybe_scalar(np.full_like(rho, self.delta), scalar)

    def h(self, ctx, s, tau):
        s, scalar = _asarray(s)
        _check_nonneg("s", s)
        _check_nonneg("tau", tau)
        tau = np.asarray(tau, dtype=float)
        out = np.exp(-2.0 * self.delta * tau) * s
        return _maybe_scalar(out, scalar and tau.ndim == 0)

    def F(self, ctx, s, r):
        s, scalar = _asarray(s)
        _check_nonneg("s", s)
        _check_nonneg("r", r)
        r = np.asarray(r, dtype=float)
        out = np.broadcast_to(self.delta * r, np.broadcast_shapes(s.shape, r.shape)).copy()
        return _maybe_scalar(out, scalar and r.ndim == 0)

    def G(self, ctx, s, r):
        s, scalar = _asarray(s)
        _check_nonneg("s", s)
        _check_nonneg("r", r)
        r = np.asarray(r, dtype=float)
        # beta s^sigma (1 - e^{-2 delta sigma r}) / (2 delta sigma)
        x = 2.0 * self.delta * ctx.sigma * r
        out = ctx.beta * s**ctx.sigma * r * _expm1_ratio(x)
        return _maybe_scalar(out, scalar and r.ndim == 0)

    def scaled(self, factor):
        if factor == 0:
            return NoDamping()
        return replace(self, delta=self.delta * factor)


@dataclass(frozen=True)
class PowerLawDamping(DampingLaw):
    """g = delta (beta rho)^q: pure power damping, q = 1 cubic, q = 2 quintic."""

    delta: float
    q: float

    def __post_init__(self):
        if not (math.isfinite(self.delta) and self.delta > 0):
            raise ValueError(f"delta must be positive, got {self.delta}")
        if not (math.isfinite(self.q) and self.q > 0):
            raise ValueError(f"q must be positive, got {self.q}")

    def _require_beta(self, ctx):
        if ctx.beta <= 0:
            raise ValueError("power-law damping requires beta > 0")

    def rate(self, ctx, rho):
        self._require_beta(ctx)
        rho, scalar = _asarray(rho)
        return _maybe_scalar(self.delta * (ctx.beta * rho) ** self.q, scalar)

    def _x(self, ctx, s, tau):
        # x = 2 q delta tau beta^q s^q, the dimensionless decay variable
        return 2.0 * self.q * self.delta * np.asarray(tau, dtype=float) * (ctx.beta * s) ** self.q

    def h(self, ctx, s, tau):
        self._require_beta(ctx)
        s, scalar = _asarray(s)
        _check_nonneg("s", s)
        _check_nonneg("tau", tau)
        x = self._x(ctx, s, tau)
        out = s * np.exp(-np.log1p(x) / self.q)
        return _maybe_scalar(out, scalar and np.ndim(tau) == 0)

    def F(self, ctx, s, r):
        self._require_beta(ctx)
        s, scalar = _asarray(s)
        _check_nonneg("s", s)
        _check_nonneg("r", r)
        out = np.log1p(self._x(ctx, s, r)) / (2.0 * self.q)
        return _maybe_scalar(out, scalar and np.ndim(r) == 0)

    def G(self, ctx, s, r):
        self._require_beta(ctx)
        s, scalar = _asarray(s)
        _check_nonneg("s", s)
        _check_nonneg("r", r)
        r_arr = np.asarray(r, dtype=float)
        x = self._x(ctx, s, r_arr)
        # Both the q == sigma and q != sigma closed forms collapse to
        # beta s^sigma r * ((1+x)^p - 1)/(p x) with p = (q - sigma)/q,
        # whose p -> 0 limit is log1p(x)/x.
        if abs(self.q - ctx.sigma) <= _Q_SIGMA_TOL:
            ratio = _log1p_ratio(x)
        else:
            ratio = _pow_ratio((self.q - ctx.sigma) / self.q, x)
        out = ctx.beta * s**ctx.sigma * r_arr * ratio
        return _maybe_scalar(out, scalar and r_arr.ndim == 0)

    def scaled(self, factor):
        if factor == 0:
            return NoDamping()
        return replace(self, delta=self.delta * factor)


@dataclass(frozen=True)
class CubicQuinticDamping(DampingLaw):
    """g = delta1 beta rho + delta2 (beta rho)^2 for sigma = 1.

    The density flow is only implicit here: with
    f(s) = -1/(delta1 beta s) + (delta2/delta1^2) log(delta2 beta + delta1/s)
    the map h solves f(s) - f(h) = 2 tau.  f is strictly increasing
    (f'(s) = 1 / (beta s^2 (delta2 beta s + delta1)) > 0), so
    phi(h) = f(s) - f(h) - 2 tau is strictly decreasing with a unique root
    in (0, s); a bracketed Newton iteration resolves it to relative 1e-12.
    """

    delta1: float
    delta2: float

    def __post_init__(self):
        if not (math.isfinite(self.delta1) and self.delta1 > 0):
            raise ValueError(f"delta1 must be positive, got {self.delta1}")
        if not (math.isfinite(self.delta2) and self.delta2 > 0):
            raise ValueError(f"delta2 must be positive, got {self.delta2}")

    def _require_ctx(self, ctx):
        if abs(ctx.sigma - 1.0) > _Q_SIGMA_TOL:
            raise ValueError("cubic-quintic damping is defined for sigma = 1")
        if ctx.beta <= 0:
            raise ValueError("cubic-quintic damping requires beta > 0")

    def rate(self, ctx, rho):
        self._require_ctx(ctx)
        rho, scalar = _asarray(rho)
        br = ctx.beta * rho
        return _maybe_scalar(self.delta1 * br + self.delta2 * br**2, scalar)

    def _f(self, beta, s):
        d1, d2 = self.delta1, self.delta2
        return -1.0 / (d1 * beta * s) + (d2 / d1**2) * np.log(d2 * beta + d1 / s)

    def _fprime(self, beta, s):
        return 1.0 / (beta * s**2 * (self.delta2 * beta * s + self.delta1))

    def h(self, ctx, s, tau):
        self._require_ctx(ctx)
        s, scalar = _asarray(s)
        _check_nonneg("s", s)
        _check_nonneg("tau", tau)
        tau = np.asarray(tau, dtype=float)
        s_b, tau_b = np.broadcast_arrays(s, tau)
        out = np.array(s_b, dtype=float, copy=True)
        active = (s_b > _TINY_S) & (tau_b > 0)
        if np.any(active):
            out[active] = self._solve(ctx.beta, s_b[active], tau_b[active])
        return _maybe_scalar(out, scalar and tau.ndim == 0)

    def _solve(self, beta, s, tau):
        d1, d2 = self.delta1, self.delta2
        fs = self._f(beta, s)

        def phi(x):
            return fs - self._f(beta, x) - 2.0 * tau

        # One RK4 step of rho' = -2 g rho seeds the iterate; halving from
        # there always reaches phi >= 0 because f(h) -> -inf as h -> 0+.
        def rhs(x):
            bx = beta * x
            return -2.0 * (d1 * bx + d2 * bx * bx) * x

        k1 = rhs(s)
        k2 = rhs(np.maximum(s + 0.5 * tau * k1, 1e-300))
        k3 = rhs(np.maximum(s + 0.5 * tau * k2, 1e-300))
        k4 = rhs(np.maximum(s + tau * k3, 1e-300))
        est = s + (tau / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)
        x = np.clip(est, 1e-300, s)

        lo = x.copy()
        for _ in range(2200):  # 2^-2200 underflows; loop always terminates
            bad = phi(lo) < 0
            if not np.any(bad):
                break
            lo[bad] *= 0.5
        hi = np.array(s, dtype=float, copy=True)  # phi(s) = -2 tau < 0

        x = np.clip(x, lo, hi)
        # Out-of-range Newton updates (including inf/nan from underflowed
        # iterates) fall back to bisection, so float warnings are moot here.
        with np.errstate(divide="ignore", over="ignore", invalid="ignore"):
            for _ in range(_NEWTON_MAX_ITER):
                fx = phi(x)
                pos = fx > 0
                lo = np.where(pos, x, lo)
                hi = np.where(pos, hi, x)
                # phi'(x) = -f'(x), so the Newton update is x + phi(x)/f'(x)
                step = fx / self._fprime(beta, x)
                x_new = x + step
                outside = (x_new <= lo) | (x_new >= hi) | ~np.isfinite(x_new)
                x_new = np.where(outside, 0.5 * (lo + hi), x_new)
                done = np.abs(x_new - x) <= _NEWTON_RTOL * x_new
                x = x_new
                if np.all(done):
                    break
        return x

    def F(self, ctx, s, r):
        self._require_ctx(ctx)
        s_arr, scalar = _asarray(s)
        hv = np.asarray(self.h(ctx, s_arr, r), dtype=float)
        safe_s = np.where(s_arr > 0, s_arr, 1.0)
        safe_h = np.where(s_arr > 0, hv, 1.0)
        out = np.where(s_arr > 0, -0.5 * np.log(safe_h / safe_s), 0.0)
        return _maybe_scalar(out, scalar and np.ndim(r) == 0)

    def G(self, ctx, s, r):
        self._require_ctx(ctx)
        s_arr, scalar = _asarray(s)
        hv = np.asarray(self.h(ctx, s_arr, r), dtype=float)
        d1, d2, beta = self.delta1, self.delta2, ctx.beta
        solved = s_arr > _TINY_S
        safe_s = np.where(solved, s_arr, 1.0)
        safe_h = np.where(solved, hv, 1.0)
        ratio = safe_h * (d1 + d2 * beta * safe_s) / (safe_s * (d1 + d2 * beta * safe_h))
        # Below the solver cutoff the flow is the identity and G -> beta s r.
        out = np.where(solved, -np.log(ratio) / (2.0 * d1), beta * s_arr * np.asarray(r, dtype=float))
        return _maybe_scalar(out, scalar and np.ndim(r) == 0)

    def scaled(self, factor):
        if factor == 0:
            return NoDamping()
        return replace(self, delta1=self.delta1 * factor, delta2=self.delta2 * factor)


@dataclass(frozen=True)
class FeedingQuinticDamping(DampingLaw):
    """g = -delta1 + delta2 (beta rho)^2 for sigma = 1: linear gain saturated
    by quintic loss.  The density relaxes to rho* = sqrt(delta1/delta2)/beta.
    """

    delta1: float
    delta2: float
    nonnegative_rate = False

    def __post_init__(self):
        if not (math.isfinite(self.delta1) and self.delta1 > 0):
            raise ValueError(f"delta1 must be positive, got {self.delta1}")
        if not (math.isfinite(self.delta2) and self.delta2 > 0):
            raise ValueError(f"delta2 must be positive, got {self.delta2}")

    def _require_ctx(self, ctx):
        if abs(ctx.sigma - 1.0) > _Q_SIGMA_TOL:
            raise ValueError("feeding-quintic damping is defined for sigma = 1")
        if ctx.beta <= 0:
            raise ValueError("feeding-quintic damping requires beta > 0")

    def fixed_point(self, ctx) -> float:
        self._require_ctx(ctx)
        return math.sqrt(self.delta1 / self.delta2) / ctx.beta

    def rate(self, ctx, rho):
        self._require_ctx(ctx)
        rho, scalar = _asarray(rho)
        return _maybe_scalar(-self.delta1 + self.delta2 * (ctx.beta * rho) ** 2, scalar)

    def h(self, ctx, s, tau):
        self._require_ctx(ctx)
        s, scalar = _asarray(s)
        _check_nonneg("s", s)
        _check_nonneg("tau", tau)
        tau = np.asarray(tau, dtype=float)
        d1, d2, beta = self.delta1, self.delta2, ctx.beta
        e4 = np.expm1(4.0 * d1 * tau)
        out = s * np.sqrt(d1) * np.exp(2.0 * d1 * tau) / np.sqrt(d1 + d2 * (beta * s) ** 2 * e4)
        return _maybe_scalar(out, scalar and tau.ndim == 0)

    def F(self, ctx, s, r):
        self._require_ctx(ctx)
        s, scalar = _asarray(s)
        _check_nonneg("s", s)
        _check_nonneg("r", r)
        r = np.asarray(r, dtype=float)
        d1, d2, beta = self.delta1, self.delta2, ctx.beta
        e4 = np.expm1(4.0 * d1 * r)
        out = -d1 * r + 0.25 * np.log1p(d2 * (beta * s) ** 2 * e4 / d1)
        return _maybe_scalar(out, scalar and r.ndim == 0)

    def G(self, ctx, s, r):
        self._require_ctx(ctx)
        s, scalar = _asarray(s)
        _check_nonneg("s", s)
        _check_nonneg("r", r)
        r = np.asarray(r, dtype=float)
        d1, d2, beta = self.delta1, self.delta2, ctx.beta
        e4 = np.expm1(4.0 * d1 * r)
        num = beta * s * np.sqrt(d2) * np.exp(2.0 * d1 * r) + np.sqrt(d1 + d2 * (beta * s) ** 2 * e4)
        den = np.sqrt(d1) + beta * s * np.sqrt(d2)
        out = np.log(num / den) / (2.0 * np.sqrt(d1 * d2))
        return _maybe_scalar(out, scalar and r.ndim == 0)

    def scaled(self, factor):
        if factor == 0:
            return NoDamping()
        return replace(self, delta1=self.delta1 * factor, delta2=self.delta2 * factor)


@dataclass(frozen=True)
class GinzburgLandauLaw(DampingLaw):
    """g = delta2 rho - delta1 for sigma = 1, beta = 1: the cubic CGL
    reaction term.  Density relaxes to rho* = delta1/delta2; pair with the
    ``cgl`` dispersion for the full complex Ginzburg-Landau flow.
    """

    delta1: float
    delta2: float
    nonnegative_rate = False

    def __post_init__(self):
        if not (math.isfinite(self.delta1) and self.delta1 > 0):
            raise ValueError(f"delta1 must be positive, got {self.delta1}")
        if not (math.isfinite(self.delta2) and self.delta2 > 0):
            raise ValueError(f"delta2 must be positive, got {self.delta2}")

    def _require_ctx(self, ctx):
        if abs(ctx.sigma - 1.0) > _Q_SIGMA_TOL:
            raise ValueError("the Ginzburg-Landau law is defined for sigma = 1")
        if abs(ctx.beta - 1.0) > _Q_SIGMA_TOL:
            raise ValueError("the Ginzburg-Landau law is defined for beta = 1")

    def fixed_point(self, ctx) -> float:
        self._require_ctx(ctx)
        return self.delta1 / self.delta2

    def rate(self, ctx, rho):
        self._require_ctx(ctx)
        rho, scalar = _asarray(rho)
        return _maybe_scalar(self.delta2 * rho - self.delta1, scalar)

    def h(self, ctx, s, tau):
        self._require_ctx(ctx)
        s, scalar = _asarray(s)
        _check_nonneg("s", s)
        _check_nonneg("tau", tau)
        tau = np.asarray(tau, dtype=float)
        d1, d2 = self.delta1, self.delta2
        em = np.exp(-2.0 * d1 * tau)
        den = s * d2 * (-np.expm1(-2.0 * d1 * tau)) + d1 * em
        out = s * d1 / den
        return _maybe_scalar(out, scalar and tau.ndim == 0)

    def F(self, ctx, s, r):
        self._require_ctx(ctx)
        s, scalar = _asarray(s)
        _check_nonneg("s", s)
        _check_nonneg("r", r)
        r = np.asarray(r, dtype=float)
        d1, d2 = self.delta1, self.delta2
        em = np.exp(-2.0 * d1 * r)
        out = 0.5 * np.log((s * d2 + (d1 - s * d2) * em) / d1)
        return _maybe_scalar(out, scalar and r.ndim == 0)

    def G(self, ctx, s, r):
        self._require_ctx(ctx)
        s, scalar = _asarray(s)
        _check_nonneg("s", s)
        _check_nonneg("r", r)
        r = np.asarray(r, dtype=float)
        d1, d2 = self.delta1, self.delta2
        out = np.log1p(s * d2 * np.expm1(2.0 * d1 * r) / d1) / (2.0 * d2)
        return _maybe_scalar(out, scalar and r.ndim == 0)

    def scaled(self, factor):
        if factor == 0:
            return NoDamping()
        return replace(self, delta1=self.delta1 * factor, delta2=self.delta2 * factor)


def _rk4_density(g: Callable, s: np.ndarray, r, substeps: int) -> np.ndarray:
    r = np.asarray(r, dtype=float)
    rho = np.array(np.broadcast_arrays(s, r)[0], dtype=float, copy=True)
    dt = np.broadcast_to(r / substeps, rho.shape)

    def rhs(x):
        return -2.0 * np.asarray(g(x), dtype=float) * x

    for _ in range(substeps):
        k1 = rhs(rho)
        k2 = rhs(rho + 0.5 * dt * k1)
        k3 = rhs(rho + 0.5 * dt * k2)
        k4 = rhs(rho + dt * k3)
        rho = rho + (dt / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)
    return rho


def numeric_flow(g: Callable, substeps: int, s, r, ctx: FlowContext, panels: int = 64):
    """RK4/quadrature fallback returning the triple (h, F, G).

    ``g`` maps density to rate.  h integrates rho' = -2 g(rho) rho with
    ``substeps`` fixed RK4 steps over [0, r]; F follows from the exact
    identity F = -log(h/s)/2; G changes variables to the density and uses
    composite Simpson with ``panels`` panels on

        G = int_s^h  -beta t^(sigma-1) / (2 g(t)) dt,

    which requires g to be nonvanishing between s and h (a zero of g on
    the path raises).  s = 0 maps to (0, 0, 0).
    """
    if substeps < 1:
        raise ValueError("substeps must be >= 1")
    if panels < 2 or panels % 2:
        raise ValueError("panels must be an even count >= 2")
    s_arr, scalar = _asarray(s)
    _check_nonneg("s", s_arr)
    _check_nonneg("r", r)
    scalar = scalar and np.ndim(r) == 0
    r_arr = np.asarray(r, dtype=float)
    s_b, r_b = np.broadcast_arrays(np.atleast_1d(s_arr), np.atleast_1d(r_arr))

    h_out = np.array(s_b, dtype=float, copy=True)
    f_out = np.zeros_like(h_out)
    g_out = np.zeros_like(h_out)
    active = (s_b > 0) & (r_b > 0)
    if np.any(active):
        sa, ra = s_b[active], r_b[active]
        ha = _rk4_density(g, sa, ra, substeps)
        if np.any(~np.isfinite(ha)) or np.any(ha <= 0):
            raise ArithmeticError("RK4 density integration left (0, inf); increase substeps")
        h_out[active] = ha
        f_out[active] = -0.5 * np.log(ha / sa)

        # Simpson in the density variable; skip points where the path
        # collapsed to zero length (h == s exactly).
        moved = ha != sa
        if np.any(moved):
            sm, hm = sa[moved], ha[moved]
            theta = np.linspace(0.0, 1.0, panels + 1).reshape((-1,) + (1,) * sm.ndim)
            t = sm + (hm - sm) * theta
            gt = np.asarray(g(t), dtype=float)
            # Any exact zero or sign change along a single path means g
            # vanishes between s and h (possible only through RK4 overshoot
            # across a fixed point) and the 1/g integrand is invalid there.
            crossed = np.any(gt == 0, axis=0) | (np.any(gt > 0, axis=0) & np.any(gt < 0, axis=0))
            if np.any(crossed):
                raise ArithmeticError("g vanishes on the quadrature path; no closed G available")
            integrand = -ctx.beta * t ** (ctx.sigma - 1.0) / (2.0 * gt)
            w = np.ones(panels + 1)
            w[1:-1:2] = 4.0
            w[2:-1:2] = 2.0
            w = w.reshape(theta.shape)
            dx = (hm - sm) / panels
            vals = (dx / 3.0) * np.sum(w * integrand, axis=0)
            g_full = np.zeros_like(sa)
            g_full[moved] = vals
            g_out[active] = g_full

    if scalar:
        return h_out.item(), f_out.item(), g_out.item()
    shape = np.broadcast_shapes(s_arr.shape, r_arr.shape)
    return h_out.reshape(shape), f_out.reshape(shape), g_out.reshape(shape)


@dataclass(frozen=True)
class NumericDamping(DampingLaw):
    """Wraps an arbitrary rate callable g(rho) with the RK4/Simpson flow.

    The callable must keep the density positive under RK4 at the step
    sizes in use (sufficiently smooth, bounded g); it is assumed to be
    nonnegative unless ``nonnegative=False`` is passed.
    """

    g: Callable
    substeps: int = 64
    panels: int = 64
    nonnegative: bool = True

    def __post_init__(self):
        if self.substeps < 1:
            raise ValueError("substeps must be >= 1")
        if self.panels < 2 or self.panels % 2:
            raise ValueError("panels must be an even count >= 2")

    @property
    def nonnegative_rate(self):
        return self.nonnegative

    def rate(self, ctx, rho):
        rho, scalar = _asarray(rho)
        return _maybe_scalar(np.asarray(self.g(rho), dtype=float), scalar)

    def h(self, ctx, s, tau):
        return numeric_flow(self.g, self.substeps, s, tau, ctx, self.panels)[0]

    def F(self, ctx, s, r):
        return numeric_flow(self.g, self.substeps, s, r, ctx, self.panels)[1]

    def G(self, ctx, s, r):
        return numeric_flow(self.g, self.substeps, s, r, ctx, self.panels)[2]

    def flow(self, ctx, s, r):
        """One call returning (h, F, G); cheaper than three separate calls."""
        return numeric_flow(self.g, self.substeps, s, r, ctx, self.panels)

    def scaled(self, factor):
        if factor == 0:
            return NoDamping()
        inner = self.g
        return replace(self, g=lambda rho, _g=inner, _f=factor: _f * np.asarray(_g(rho), dtype=float))


def flow_h(law: DampingLaw, ctx: FlowContext, s, tau):
    """Density after evolving rho' = -2 g(rho) rho for time tau from s."""
    return law.h(ctx, s, tau)


def flow_F(law: DampingLaw, ctx: FlowContext, s, r):
    """Integrated damping exponent over a substep of length r."""
    return law.F(ctx, s, r)


def flow_G(law: DampingLaw, ctx: FlowContext, s, r):
    """Integrated focusing phase beta int h^sigma over a substep of length r."""
    return law.G(ctx, s, r)
