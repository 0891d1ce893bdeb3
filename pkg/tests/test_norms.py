"""Norm evaluation, Marcinkiewicz scans, truncation lemma, divergence fits."""

import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from hardylab.core import HardyParams, exponents
from hardylab.grid import (RadialFunction, build_mesh, from_callable,
                           gamma_weight, lebesgue_weight, power_weight)
from hardylab.green import RadialMeasure, potential
from hardylab.norms import (annulus_marcinkiewicz, classify_divergence,
                            embedding_check, equality_profile,
                            estimate_critical_exponent,
                            gradient_annulus_rate, lp_norm,
                            marcinkiewicz_norm, minimal_hypothesis_constant,
                            stampacchia_bound, stampacchia_k0,
                            truncated_w1p_scan, truncation_energy_check,
                            w1p_norm)

P32 = HardyParams(3, 2.0)


def _ones(mesh):
    return from_callable(mesh, lambda r: np.ones_like(np.asarray(r, float)))


class TestLpNorms:
    def test_constant_l1(self):
        mesh = build_mesh(0.0, 1.0, 64, grading=2.0)
        # ||1||_1 over the unit ball is its volume
        assert lp_norm(_ones(mesh), 1.0, lebesgue_weight(P32)) == pytest.approx(
            4.0 * math.pi / 3.0, rel=1e-12)

    def test_constant_l2(self):
        mesh = build_mesh(0.0, 1.0, 64, grading=2.0)
        assert lp_norm(_ones(mesh), 2.0, lebesgue_weight(P32)) == pytest.approx(
            math.sqrt(4.0 * math.pi / 3.0), rel=1e-12)

    def test_singular_split_exact(self):
        # || r^{-1} ||_{L2(dx)}^2 = int 4 pi dr = 4 pi on the unit ball
        mesh = build_mesh(0.0, 1.0, 64, grading=2.0)
        u = RadialFunction(mesh=mesh, values=np.ones(65), exponent=-1.0)
        assert lp_norm(u, 2.0, lebesgue_weight(P32)) == pytest.approx(
            math.sqrt(4.0 * math.pi), rel=1e-12)

    def test_p_below_one_rejected(self):
        mesh = build_mesh(0.0, 1.0, 32)
        with pytest.raises(ValueError):
            lp_norm(_ones(mesh), 0.5, lebesgue_weight(P32))

    def test_w1p_linear_profile(self):
        # u = r: ||u||_1 = pi, ||u'||_1 = |B| = 4 pi/3
        mesh = build_mesh(0.0, 1.0, 128, grading=2.0)
        u = from_callable(mesh, lambda r: np.asarray(r, float))
        val = w1p_norm(u, 1.0, lebesgue_weight(P32))
        assert val == pytest.approx(math.pi + 4.0 * math.pi / 3.0, rel=1e-6)


class TestMarcinkiewicz:
    def _v0(self, cells=1024):
        mesh = build_mesh(0.0, 1.0, cells, grading=3.0)
        return potential(RadialMeasure(dirac_strength=1.0), P32, 1.0, mesh), mesh

    def test_exponent_validation(self):
        mesh = build_mesh(0.0, 1.0, 32)
        with pytest.raises(ValueError):
            marcinkiewicz_norm(_ones(mesh), 1.0, lebesgue_weight(P32))

    def test_zero_function(self):
        mesh = build_mesh(0.0, 1.0, 32)
        z = from_callable(mesh, lambda r: np.zeros_like(np.asarray(r, float)))
        assert marcinkiewicz_norm(z, 2.0, lebesgue_weight(P32)).value == 0.0

    @given(st.floats(min_value=0.1, max_value=10.0))
    @settings(max_examples=10, deadline=None)
    def test_homogeneity(self, c):
        u, mesh = self._v0(128)
        w = gamma_weight(P32)
        base = marcinkiewicz_norm(u, 2.0, w, n_levels=24, refine=1).value
        uc = RadialFunction(mesh=mesh, values=c * u.values, exponent=u.exponent)
        val = marcinkiewicz_norm(uc, 2.0, w, n_levels=24, refine=1).value
        assert val == pytest.approx(c * base, rel=1e-6)

    def test_indicator_value(self):
        # |u| = indicator of (0, b): ratio is w(E)^{1/kappa} at every level
        mesh = build_mesh(0.0, 1.0, 256)
        u = from_callable(mesh, lambda r: (np.asarray(r, float) < 0.5).astype(float))
        w = power_weight(1.0, 0.0)
        kappa = 2.0
        rep = marcinkiewicz_norm(u, kappa, w)
        assert rep.value == pytest.approx(0.5 ** (1.0 / kappa), rel=1e-2)

    def test_annulus_cross_check_never_exceeds(self):
        u, _ = self._v0(512)
        w = gamma_weight(P32)
        sup = marcinkiewicz_norm(u, 2.0, w).value
        ann = annulus_marcinkiewicz(u, 2.0, w,
                                    radii=(0.0, 0.05, 0.1, 0.25, 0.5, 1.0))
        assert ann <= sup * (1.0 + 1e-9)

    def test_monotone_in_magnitude(self):
        mesh = build_mesh(0.0, 1.0, 128)
        w = power_weight(1.0, 2.0)
        small = from_callable(mesh, lambda r: 1.0 - np.asarray(r, float))
        big = from_callable(mesh, lambda r: 2.0 - np.asarray(r, float))
        ms = marcinkiewicz_norm(small, 2.0, w).value
        mb = marcinkiewicz_norm(big, 2.0, w).value
        assert mb >= ms

    def test_embedding_qth_power_form(self):
        u, _ = self._v0(256)
        w = gamma_weight(P32)
        family = [(0.0, 1.0), (0.0, 0.1), (0.05, 0.3), (0.2, 0.8)]
        c = embedding_check(u, 1.5, 2.0, family, w)
        assert math.isfinite(c) and c > 0.0
        # with M^q in the denominator the constant depends only on q, kappa
        assert c < 20.0

    def test_embedding_validation(self):
        u, _ = self._v0(128)
        with pytest.raises(ValueError):
            embedding_check(u, 2.5, 2.0, [(0.0, 1.0)], gamma_weight(P32))


class TestStampacchia:
    def test_equality_profile_k0(self):
        # the synthetic equality case vanishes exactly at k0 = 1 and the
        # separated-ODE bound is exactly 1
        t, level, A = equality_profile(2.0)
        res = stampacchia_k0(t, level, alpha=2.0, A=A)
        assert res.bound == pytest.approx(1.0, rel=1e-6)
        assert res.k0 == pytest.approx(1.0, rel=0.05)
        assert res.k0 <= res.bound * (1.0 + 1e-6)

    @pytest.mark.parametrize("alpha", [1.5, 2.0, 3.0])
    def test_equality_profile_all_alpha(self, alpha):
        t, level, A = equality_profile(alpha)
        res = stampacchia_k0(t, level, alpha=alpha, A=A)
        assert res.k0 == pytest.approx(res.bound, rel=0.05)

    def test_bound_scaling_in_A(self):
        # k0 bound scales as A^{1/alpha}
        assert stampacchia_bound(2.0, 4.0, 1.0) == pytest.approx(
            2.0 * stampacchia_bound(2.0, 1.0, 1.0), rel=1e-13)

    def test_bound_never_violated_on_monotone_data(self):
        rng = np.random.default_rng(7)
        for _ in range(20):
            t = np.linspace(0.0, rng.uniform(0.5, 3.0), 400)
            # random non-increasing nonnegative level data
            steps = rng.uniform(0.0, 1.0, len(t))
            level = np.cumsum(steps[::-1])[::-1]
            alpha = rng.uniform(1.3, 3.0)
            A = minimal_hypothesis_constant(t, level, alpha)
            res = stampacchia_k0(t, level, alpha=alpha, A=A)
            assert res.k0 <= res.bound * (1.0 + 1e-9)

    def test_minimal_constant_consistent(self):
        t, level, A = equality_profile(2.0, n=4096)
        A_fit = minimal_hypothesis_constant(t, level, 2.0)
        assert A_fit == pytest.approx(A, rel=1e-3)

    def test_input_validation(self):
        t = np.linspace(0.0, 1.0, 10)
        level = np.ones(10)
        with pytest.raises(ValueError):
            stampacchia_k0(t, level, alpha=1.0, A=1.0)
        with pytest.raises(ValueError):
            stampacchia_k0(t, level, alpha=2.0, A=0.0)
        with pytest.raises(ValueError):
            stampacchia_k0(t, np.arange(10.0), alpha=2.0, A=1.0)  # increasing
        with pytest.raises(ValueError):
            stampacchia_k0(t[::-1], level, alpha=2.0, A=1.0)


class TestTruncationEnergy:
    def test_hand_value(self):
        # u0 = 1 - r, k = 1/2: E_k = (0, 1/2), grad = -1, f = 1
        # ratio = sqrt(vol(B_1/2)) / sqrt(vol(B_1/2)) with f = 1 -> 1
        params = HardyParams(3, 0.0)
        mesh = build_mesh(0.0, 1.0, 512)
        u0 = from_callable(mesh, lambda r: 1.0 - np.asarray(r, float))
        f = _ones(mesh)
        ratio = truncation_energy_check(u0, 0.5, f, None, params)
        assert ratio == pytest.approx(1.0, rel=1e-3)

    def test_scaled_data(self):
        params = HardyParams(3, 0.0)
        mesh = build_mesh(0.0, 1.0, 512)
        u0 = from_callable(mesh, lambda r: 1.0 - np.asarray(r, float))
        f5 = from_callable(mesh, lambda r: 5.0 * np.ones_like(np.asarray(r, float)))
        ratio = truncation_energy_check(u0, 0.5, f5, None, params)
        assert ratio == pytest.approx(0.2, rel=1e-3)

    def test_inactive_truncation(self):
        params = HardyParams(3, 0.0)
        mesh = build_mesh(0.0, 1.0, 128)
        u0 = from_callable(mesh, lambda r: 1.0 - np.asarray(r, float))
        assert truncation_energy_check(u0, 2.0, _ones(mesh), None, params) == 0.0

    def test_vanishing_data_gives_inf(self):
        params = HardyParams(3, 0.0)
        mesh = build_mesh(0.0, 1.0, 128)
        u0 = from_callable(mesh, lambda r: 1.0 - np.asarray(r, float))
        assert truncation_energy_check(u0, 0.5, None, None, params) == math.inf


class TestDivergenceDetection:
    def _kernel(self, e, cells=1024):
        mesh = build_mesh(0.0, 1.0, cells, grading=3.0)
        return RadialFunction(mesh=mesh, values=np.ones(cells + 1), exponent=e)

    def test_scan_monotone(self):
        u = self._kernel(-2.0)
        deltas = [2.0 ** (-j) for j in range(3, 9)]
        vals = truncated_w1p_scan(u, 1.2, lebesgue_weight(P32), deltas)
        assert np.all(np.diff(vals) > 0.0)  # grows as delta shrinks

    def test_classifier_divergent_power(self):
        deltas = np.array([2.0 ** (-j) for j in range(3, 10)])
        vals = deltas ** -0.5
        v = classify_divergence(deltas, vals)
        assert v.divergent
        assert v.slope == pytest.approx(-0.5, rel=1e-10)
        assert v.r_squared == pytest.approx(1.0, abs=1e-12)

    def test_classifier_convergent(self):
        deltas = np.array([2.0 ** (-j) for j in range(3, 10)])
        vals = 2.0 - deltas  # tends to a finite limit
        v = classify_divergence(deltas, vals)
        assert not v.divergent

    def test_classifier_needs_three_points(self):
        with pytest.raises(ValueError):
            classify_divergence([0.5, 0.25], [1.0, 2.0])

    def test_annulus_rate_sign(self):
        # u = r^{-2} Gamma-split against dx in N=3: |u'|^q r^2 ~ r^{2-3q},
        # annulus integral ~ d^{3-3q}: positive rate below q = 1, negative
        # above; kernel of (3,2) has critical q = N/(N-1) = 1.5 for u*Gamma
        u = self._kernel(-1.0)  # v0 * Gamma for (3, 2)
        w = lebesgue_weight(P32)
        scales = [2.0 ** (-j) for j in range(4, 11)]
        assert gradient_annulus_rate(u, 1.4, w, scales) > 0.0
        assert gradient_annulus_rate(u, 1.6, w, scales) < 0.0

    def test_estimate_critical_exponent_exact_kernel(self):
        u = self._kernel(-1.0)
        w = lebesgue_weight(P32)
        scales = [2.0 ** (-j) for j in range(4, 11)]
        q = estimate_critical_exponent(u, np.linspace(1.3, 1.7, 9), w, scales)
        assert q == pytest.approx(1.5, rel=1e-3)

    def test_estimate_requires_straddle(self):
        u = self._kernel(-1.0)
        w = lebesgue_weight(P32)
        scales = [2.0 ** (-j) for j in range(4, 9)]
        with pytest.raises(ValueError, match="straddle"):
            estimate_critical_exponent(u, np.linspace(1.1, 1.2, 3), w, scales)
