"""Flow-map identities for every damping law.

The reference for all closed forms is the numeric fallback run far finer
than its defaults; agreement is checked over wide random (s, r) sets.
"""

import math

import numpy as np
import pytest

from dnls.damping import (
    CubicQuinticDamping,
    FeedingQuinticDamping,
    FlowContext,
    GinzburgLandauLaw,
    LinearDamping,
    NoDamping,
    NumericDamping,
    PowerLawDamping,
    flow_F,
    flow_G,
    flow_h,
    numeric_flow,
)

CTX = FlowContext(beta=2.0, sigma=1.0)


def reference(law, ctx, substeps=4096):
    return NumericDamping(lambda rho, _l=law, _c=ctx: _l.rate(_c, rho), substeps=substeps, panels=substeps)


def max_flow_error(law, ctx, s, r, substeps=4096):
    ref = reference(law, ctx, substeps)
    hn, fn, gn = ref.flow(ctx, s, r)
    return max(
        float(np.max(np.abs(law.h(ctx, s, r) - hn))),
        float(np.max(np.abs(law.F(ctx, s, r) - fn))),
        float(np.max(np.abs(law.G(ctx, s, r) - gn))),
    )


class TestFlowContext:
    def test_validation(self):
        with pytest.raises(ValueError):
            FlowContext(beta=math.nan)
        with pytest.raises(ValueError):
            FlowContext(beta=1.0, sigma=0.0)


class TestNoDamping:
    def test_identity_flow(self):
        law = NoDamping()
        s = np.array([0.0, 0.5, 2.0])
        assert np.array_equal(law.h(CTX, s, 0.7), s)
        assert np.array_equal(law.F(CTX, s, 0.7), np.zeros(3))
        # G reduces to beta s^sigma r
        assert law.G(CTX, 1.5, 0.2) == pytest.approx(2.0 * 1.5 * 0.2, rel=1e-15)

    def test_scaled_is_self(self):
        law = NoDamping()
        assert law.scaled(0.0) is law
        assert law.scaled(3.0) is law


class TestLinearLaw:
    def test_halving_time(self):
        law = LinearDamping(0.5)
        # rho halves when exp(-2 delta tau) = 1/2
        tau = math.log(2.0) / (2 * 0.5)
        assert law.h(CTX, 3.0, tau) == pytest.approx(1.5, rel=1e-14)

    def test_f_independent_of_s(self):
        law = LinearDamping(0.7)
        assert law.F(CTX, 0.1, 0.3) == pytest.approx(0.21, rel=1e-15)
        assert law.F(CTX, 5.0, 0.3) == pytest.approx(0.21, rel=1e-15)

    def test_g_small_r_expansion(self):
        # G -> beta s^sigma r as r -> 0, without cancellation
        law = LinearDamping(0.4)
        s, r = 1.3, 1e-12
        assert law.G(CTX, s, r) == pytest.approx(CTX.beta * s * r, rel=1e-12)

    def test_matches_numeric(self):
        rng = np.random.default_rng(11)
        law = LinearDamping(0.6)
        s = rng.uniform(1e-6, 6.0, 50)
        for r in (1e-4, 0.05, 0.8):
            assert max_flow_error(law, CTX, s, r) < 1e-9

    def test_sigma_two_context(self):
        ctx = FlowContext(beta=1.5, sigma=2.0)
        law = LinearDamping(0.6)
        rng = np.random.default_rng(12)
        s = rng.uniform(1e-4, 3.0, 30)
        assert max_flow_error(law, ctx, s, 0.2) < 1e-9

    def test_validation(self):
        with pytest.raises(ValueError):
            LinearDamping(0.0)
        with pytest.raises(ValueError):
            LinearDamping(-1.0)


class TestPowerLaw:
    @pytest.mark.parametrize("q", [1.0, 2.0, 0.5])
    def test_matches_numeric(self, q):
        rng = np.random.default_rng(13)
        law = PowerLawDamping(0.35, q)
        s = rng.uniform(1e-5, 5.0, 40)
        for r in (1e-3, 0.1, 0.6):
            assert max_flow_error(law, CTX, s, r) < 5e-9

    def test_matches_numeric_steep_exponent(self):
        # q = 3 drains high densities so fast that the 1/g quadrature of
        # the reference gets singular near zero; compare in a mild regime.
        rng = np.random.default_rng(17)
        law = PowerLawDamping(0.35, 3.0)
        s = rng.uniform(0.2, 2.0, 30)
        for r in (1e-3, 0.05):
            assert max_flow_error(law, CTX, s, r) < 1e-9

    def test_q_equals_sigma_branch_continuity(self):
        # The q == sigma branch must agree with nearby q to first order.
        s, r = 1.7, 0.25
        exact = PowerLawDamping(0.35, 1.0).G(CTX, s, r)
        nearby = PowerLawDamping(0.35, 1.0 + 5e-13).G(CTX, s, r)
        assert exact == pytest.approx(nearby, rel=1e-9)
        off = PowerLawDamping(0.35, 1.2).G(CTX, s, r)
        assert abs(off - exact) > 1e-4  # branches genuinely differ away from q = sigma

    def test_zero_density_fixed(self):
        law = PowerLawDamping(0.5, 2.0)
        assert law.h(CTX, 0.0, 0.9) == 0.0
        assert law.F(CTX, 0.0, 0.9) == 0.0
        assert law.G(CTX, 0.0, 0.9) == 0.0

    def test_beta_guard(self):
        law = PowerLawDamping(0.5, 1.0)
        with pytest.raises(ValueError, match="beta"):
            law.h(FlowContext(beta=-1.0), 1.0, 0.1)

    def test_scaling(self):
        law = PowerLawDamping(0.5, 1.0)
        assert law.scaled(2.0).delta == pytest.approx(1.0)
        assert isinstance(law.scaled(0.0), NoDamping)


class TestCubicQuintic:
    LAW = CubicQuinticDamping(0.3, 0.15)

    def test_matches_numeric(self):
        rng = np.random.default_rng(14)
        s = np.concatenate([rng.uniform(1e-5, 6.0, 40), [1e-9, 12.0]])
        for r in (1e-4, 0.05, 0.5):
            assert max_flow_error(self.LAW, CTX, s, r) < 1e-9

    def test_monotone_in_tau(self):
        s = 2.0
        taus = np.linspace(0.0, 1.0, 11)
        hs = np.array([self.LAW.h(CTX, s, t) for t in taus])
        assert np.all(np.diff(hs) < 0)
        assert hs[0] == s

    def test_implicit_equation_satisfied(self):
        # f(s) - f(h) = 2 tau at the returned h
        beta = CTX.beta
        s, tau = 3.0, 0.4
        h = self.LAW.h(CTX, s, tau)
        lhs = self.LAW._f(beta, s) - self.LAW._f(beta, h)
        assert lhs == pytest.approx(2 * tau, rel=1e-11)

    def test_zero_density_fixed(self):
        assert self.LAW.h(CTX, 0.0, 0.3) == 0.0
        assert self.LAW.F(CTX, 0.0, 0.3) == 0.0
        assert self.LAW.G(CTX, 0.0, 0.3) == 0.0

    def test_sigma_guard(self):
        with pytest.raises(ValueError, match="sigma"):
            self.LAW.h(FlowContext(beta=2.0, sigma=2.0), 1.0, 0.1)

    def test_long_time_asymptote(self):
        # The cubic term dominates the tail: h ~ 1/(2 delta1 beta tau).
        tau = 50.0
        h = self.LAW.h(CTX, 4.0, tau)
        asymptote = 1.0 / (2 * 0.3 * CTX.beta * tau)
        assert 0 < h < asymptote
        assert h == pytest.approx(asymptote, rel=0.15)


class TestFeedingQuintic:
    LAW = FeedingQuinticDamping(0.4, 0.25)

    def test_matches_numeric(self):
        rng = np.random.default_rng(15)
        s = rng.uniform(1e-4, 4.0, 40)
        for r in (1e-3, 0.05, 0.3):
            assert max_flow_error(self.LAW, CTX, s, r) < 1e-8

    def test_fixed_point(self):
        star = self.LAW.fixed_point(CTX)
        assert star == pytest.approx(math.sqrt(0.4 / 0.25) / 2.0)
        for r in (0.1, 1.0, 10.0):
            assert self.LAW.h(CTX, star, r) == pytest.approx(star, rel=1e-13)

    def test_attracts_from_both_sides(self):
        star = self.LAW.fixed_point(CTX)
        for s0 in (0.1 * star, 3.0 * star):
            assert self.LAW.h(CTX, s0, 40.0) == pytest.approx(star, rel=1e-10)

    def test_zero_stays_zero_but_gains_amplitude(self):
        # h(0) = 0 yet F(0, r) = -delta1 r: a zero node stays zero while
        # the formal amplitude factor exceeds 1.
        assert self.LAW.h(CTX, 0.0, 0.5) == 0.0
        assert self.LAW.F(CTX, 0.0, 0.5) == pytest.approx(-0.4 * 0.5, rel=1e-13)

    def test_rate_sign(self):
        assert self.LAW.nonnegative_rate is False
        star = self.LAW.fixed_point(CTX)
        assert self.LAW.rate(CTX, 0.5 * star) < 0
        assert self.LAW.rate(CTX, 2.0 * star) > 0


class TestGinzburgLandau:
    LAW = GinzburgLandauLaw(0.5, 0.35)
    CTX1 = FlowContext(beta=1.0, sigma=1.0)

    def test_matches_numeric(self):
        rng = np.random.default_rng(16)
        s = rng.uniform(1e-4, 4.0, 40)
        for r in (1e-3, 0.05, 0.4):
            assert max_flow_error(self.LAW, self.CTX1, s, r) < 1e-9

    def test_fixed_point(self):
        star = self.LAW.fixed_point(self.CTX1)
        assert star == pytest.approx(0.5 / 0.35)
        for r in (0.1, 1.0, 25.0):
            assert self.LAW.h(self.CTX1, star, r) == pytest.approx(star, rel=1e-13)

    def test_zero_density_gain_exponent(self):
        # F(0, r) = -delta1 r comes straight out of the closed form here.
        assert self.LAW.F(self.CTX1, 0.0, 0.3) == pytest.approx(-0.5 * 0.3, rel=1e-13)

    def test_beta_guard(self):
        with pytest.raises(ValueError, match="beta"):
            self.LAW.h(FlowContext(beta=2.0, sigma=1.0), 1.0, 0.1)


class TestNumericFlow:
    def test_zero_density(self):
        h, f, g = numeric_flow(lambda rho: 0.2 + rho, 32, 0.0, 0.5, CTX)
        assert (h, f, g) == (0.0, 0.0, 0.0)

    def test_zero_duration(self):
        h, f, g = numeric_flow(lambda rho: 0.2 + rho, 32, 1.5, 0.0, CTX)
        assert h == 1.5 and f == 0.0 and g == 0.0

    def test_f_from_h_identity(self):
        # F = -log(h/s)/2 holds for any law; cross-check against linear.
        law = LinearDamping(0.3)
        h, f, _ = numeric_flow(lambda rho: 0.3 * np.ones_like(rho), 256, 2.0, 0.4, CTX)
        assert f == pytest.approx(-0.5 * math.log(h / 2.0), rel=1e-13)
        assert f == pytest.approx(law.F(CTX, 2.0, 0.4), rel=1e-8)

    def test_sign_change_on_path_rejected(self):
        # Zeros of g are fixed points of the flow, so a sign change along
        # the quadrature path can only come from RK4 overshoot; it must be
        # reported, not integrated through.  One coarse substep overshoots
        # g(rho) = rho - 1 from s = 2 into (0, 1).
        def g(rho):
            return np.asarray(rho) - 1.0

        with pytest.raises(ArithmeticError, match="vanishes"):
            numeric_flow(g, 1, 2.0, 0.6, CTX)

    def test_rk4_leaving_positive_axis_rejected(self):
        def g(rho):
            return np.asarray(rho) - 1.0

        with pytest.raises(ArithmeticError, match="left"):
            numeric_flow(g, 1, 2.0, 5.0, CTX)

    def test_constant_rate_matches_exponential(self):
        h, _, _ = numeric_flow(lambda rho: 0.5 * np.ones_like(np.asarray(rho)), 64, 1.0, 0.2, CTX)
        assert h == pytest.approx(math.exp(-2 * 0.5 * 0.2), rel=1e-10)

    def test_parameter_validation(self):
        with pytest.raises(ValueError):
            numeric_flow(lambda rho: rho, 0, 1.0, 0.1, CTX)
        with pytest.raises(ValueError):
            numeric_flow(lambda rho: rho, 32, 1.0, 0.1, CTX, panels=3)
        with pytest.raises(ValueError, match="nonnegative"):
            numeric_flow(lambda rho: rho, 32, -1.0, 0.1, CTX)
        with pytest.raises(ValueError, match="nonnegative"):
            numeric_flow(lambda rho: rho, 32, 1.0, -0.1, CTX)

    def test_law_wrapper_scaling(self):
        law = NumericDamping(lambda rho: 0.3 * np.ones_like(np.asarray(rho)), substeps=128, panels=128)
        doubled = law.scaled(2.0)
        lin = LinearDamping(0.6)
        assert doubled.F(CTX, 1.0, 0.2) == pytest.approx(lin.F(CTX, 1.0, 0.2), rel=1e-8)
        assert isinstance(law.scaled(0.0), NoDamping)


class TestModuleHelpers:
    def test_flow_functions_dispatch(self):
        law = LinearDamping(0.5)
        assert flow_h(law, CTX, 2.0, 0.1) == law.h(CTX, 2.0, 0.1)
        assert flow_F(law, CTX, 2.0, 0.1) == law.F(CTX, 2.0, 0.1)
        assert flow_G(law, CTX, 2.0, 0.1) == law.G(CTX, 2.0, 0.1)

    def test_scalar_in_scalar_out(self):
        law = LinearDamping(0.5)
        assert isinstance(law.h(CTX, 2.0, 0.1), float)
        assert isinstance(law.F(CTX, 2.0, 0.1), float)
        arr = law.h(CTX, np.array([1.0, 2.0]), 0.1)
        assert isinstance(arr, np.ndarray) and arr.shape == (2,)

    def test_negative_s_rejected(self):
        law = LinearDamping(0.5)
        with pytest.raises(ValueError, match="nonnegative"):
            law.h(CTX, -1.0, 0.1)
        with pytest.raises(ValueError, match="nonnegative"):
            law.F(CTX, 1.0, -0.1)
