"""Exact scalar algebra: exponents, kernels, truncation, barrier, cutoffs."""

import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from hardylab.core import (Barrier, Cutoff, HardyParams,
                           TruncationLevel, annulus_plateau, barrier_value,
                           cutoff_value, exponents, gamma, is_supersolution,
                           p_star_remark_diagnostic, phi, poly_bump, s_k,
                           sphere_area, supersolution_margin)

# admissible parameter strategy: N in 3..8, mu strictly above the threshold
params_st = st.builds(
    lambda n, off: HardyParams(dimension=n, mu=-((n - 2) ** 2) / 4.0 + off),
    st.integers(min_value=3, max_value=8),
    st.floats(min_value=1e-6, max_value=50.0),
)


class TestSphereArea:
    def test_known_values(self):
        assert sphere_area(3) == pytest.approx(4.0 * math.pi, rel=1e-15)
        assert sphere_area(4) == pytest.approx(2.0 * math.pi ** 2, rel=1e-15)
        assert sphere_area(2) == pytest.approx(2.0 * math.pi, rel=1e-15)


class TestHardyParams:
    def test_threshold_value(self):
        assert HardyParams(3, 0.0).mu0 == -0.25
        assert HardyParams(4, 0.0).mu0 == -1.0
        assert HardyParams(5, 0.0).mu0 == -2.25

    def test_below_threshold_rejected(self):
        with pytest.raises(ValueError, match="Hardy threshold"):
            HardyParams(3, -0.26)

    def test_dimension_validation(self):
        with pytest.raises(ValueError):
            HardyParams(2, 0.0)
        with pytest.raises(ValueError):
            HardyParams(3.5, 0.0)

    def test_dual_solvable_strict(self):
        # equality mu = (3/4) mu0 is rejected, strictly above passes
        mu_edge = 0.75 * (-0.25)
        assert not HardyParams(3, mu_edge).dual_solvable
        assert HardyParams(3, mu_edge + 1e-12).dual_solvable
        assert HardyParams(3, 2.0).dual_solvable

    def test_critical_hardy_flag(self):
        assert HardyParams(3, -0.25).critical_hardy
        assert not HardyParams(3, 0.0).critical_hardy


class TestExponents:
    def test_oracle_3_2(self):
        ex = exponents(HardyParams(3, 2.0))
        assert ex.tau_plus == pytest.approx(1.0, abs=1e-14)
        assert ex.tau_minus == pytest.approx(-2.0, abs=1e-14)
        assert ex.c_mu == pytest.approx(12.0 * math.pi, rel=1e-14)
        assert ex.p_star == pytest.approx(4.0 / 3.0, rel=1e-14)

    def test_oracle_3_0(self):
        ex = exponents(HardyParams(3, 0.0))
        assert ex.tau_plus == pytest.approx(0.0, abs=1e-14)
        assert ex.tau_minus == pytest.approx(-1.0, abs=1e-14)
        assert ex.c_mu == pytest.approx(4.0 * math.pi, rel=1e-14)
        assert ex.p_star == pytest.approx(1.5, rel=1e-14)

    def test_oracle_4_1(self):
        ex = exponents(HardyParams(4, 1.0))
        assert ex.tau_plus == pytest.approx(-1.0 + math.sqrt(2.0), rel=1e-14)
        assert ex.tau_minus == pytest.approx(-1.0 - math.sqrt(2.0), rel=1e-14)
        assert ex.c_mu == pytest.approx(2.0 * math.sqrt(2.0) * 2.0 * math.pi ** 2,
                                        rel=1e-14)
        assert ex.p_star == pytest.approx(1.2928932188134525, rel=1e-12)

    def test_critical_case_c_mu(self):
        # at mu = mu0 the constant degenerates to the bare surface area
        ex = exponents(HardyParams(3, -0.25))
        assert ex.tau_plus == ex.tau_minus == -0.5
        assert ex.c_mu == pytest.approx(4.0 * math.pi, rel=1e-14)

    @given(params_st)
    def test_indicial_identities(self, params):
        ex = exponents(params)
        n = params.dimension
        assert ex.tau_plus + ex.tau_minus == pytest.approx(2.0 - n, rel=1e-12,
                                                           abs=1e-12)
        # Vieta on t^2 + (N-2)t - mu = 0: product of roots is -mu;
        # cancellation near the threshold limits the product accuracy
        scale = max(1.0, ex.tau_plus ** 2 + ex.tau_minus ** 2)
        assert ex.tau_plus * ex.tau_minus == pytest.approx(
            -params.mu, abs=1e-9 * scale)
        # the two weight exponents are reflections of each other
        assert n - 1.0 + ex.tau_plus == pytest.approx(1.0 - ex.tau_minus,
                                                      rel=1e-12, abs=1e-12)

    @given(params_st)
    def test_indicial_roots(self, params):
        ex = exponents(params)
        n = params.dimension
        for t in (ex.tau_plus, ex.tau_minus):
            assert params.mu - t * (t + n - 2.0) == pytest.approx(
                0.0, abs=1e-8 * max(1.0, abs(params.mu)))


class TestPStarDiagnostic:
    def test_forms_disagree_generically(self):
        d = p_star_remark_diagnostic(HardyParams(3, 0.0))
        assert d["p_star"] == pytest.approx(1.5)
        assert d["remark_form"] == pytest.approx(3.0)
        assert d["discrepancy"] > 1.0


class TestKernels:
    def test_phi_gamma_powers(self):
        params = HardyParams(3, 2.0)
        r = np.array([0.25, 0.5, 1.0, 2.0])
        assert np.allclose(phi(params, r), r ** -2.0)
        assert np.allclose(gamma(params, r), r)

    def test_phi_log_branch_at_threshold(self):
        params = HardyParams(3, -0.25)
        assert phi(params, 0.5) == pytest.approx(-0.5 ** -0.5 * math.log(0.5))

    def test_origin_rejected(self):
        params = HardyParams(3, 2.0)
        with pytest.raises(ValueError):
            phi(params, 0.0)
        with pytest.raises(ValueError):
            gamma(params, np.array([0.5, 0.0]))


class TestTruncation:
    def test_level_validation(self):
        with pytest.raises(ValueError):
            TruncationLevel(0.0)
        with pytest.raises(ValueError):
            TruncationLevel(math.inf)

    def test_values(self):
        assert s_k(1.0, 2.5) == pytest.approx(1.5)
        assert s_k(1.0, -2.5) == pytest.approx(-1.5)
        assert s_k(1.0, 0.7) == 0.0
        assert s_k(TruncationLevel(2.0), 2.0) == 0.0

    @given(st.floats(min_value=1e-6, max_value=1e6),
           st.floats(min_value=-1e6, max_value=1e6))
    def test_odd_and_magnitude(self, k, t):
        assert s_k(k, -t) == pytest.approx(-s_k(k, t), abs=1e-12)
        assert abs(s_k(k, t)) == pytest.approx(max(abs(t) - k, 0.0), abs=1e-12)

    @given(st.floats(min_value=1e-6, max_value=1e3),
           st.floats(min_value=-1e3, max_value=1e3),
           st.floats(min_value=-1e3, max_value=1e3))
    def test_contraction(self, k, a, b):
        assert abs(s_k(k, a) - s_k(k, b)) <= abs(a - b) + 1e-12


class TestBarrier:
    def test_validation(self):
        with pytest.raises(ValueError):
            Barrier(a0=-1.0, R0=1.0)
        with pytest.raises(ValueError):
            Barrier(a0=1.0, R0=0.0)

    def test_value_and_domain(self):
        b = Barrier(a0=5.0, R0=2.0)
        params = HardyParams(3, 2.0)
        assert barrier_value(b, params, 0.0) == pytest.approx(4.0)
        assert barrier_value(b, params, 2.0) == 0.0
        with pytest.raises(ValueError):
            barrier_value(b, params, 2.5)

    def test_supersolution_margin_sign(self):
        # positive strictly above (3/4) mu0, zero at equality
        assert supersolution_margin(HardyParams(3, 2.0)) > 0.0
        edge = HardyParams(3, 0.75 * (-0.25))
        assert supersolution_margin(edge) == pytest.approx(0.0, abs=1e-14)
        below = HardyParams(3, -0.2)
        assert supersolution_margin(below) < 0.0
        assert not is_supersolution(Barrier(1.0, 1.0), below)
        assert is_supersolution(Barrier(1.0, 1.0), HardyParams(4, 1.0))


class TestCutoff:
    def test_plateau_and_support(self):
        c = Cutoff(n0=4)
        v, d1, d2 = cutoff_value(c, np.array([0.0, 0.25, 0.3, 0.5, 0.7]))
        assert v[0] == 1.0 and v[1] == 1.0
        assert 0.0 < v[2] < 1.0
        assert v[3] == 0.0 and v[4] == 0.0
        assert d1[0] == d1[1] == d1[3] == 0.0
        assert d2[0] == d2[3] == 0.0

    def test_derivatives_consistent(self):
        # central finite differences of the value match d1 and d2
        c = Cutoff(n0=1)
        r = np.linspace(1.05, 1.95, 37)
        h = 1e-5
        v, d1, d2 = cutoff_value(c, r)
        vp = (cutoff_value(c, r + h)[0] - cutoff_value(c, r - h)[0]) / (2 * h)
        vpp = (cutoff_value(c, r + h)[0] - 2 * v + cutoff_value(c, r - h)[0]) / h ** 2
        assert np.max(np.abs(vp - d1)) < 1e-8
        assert np.max(np.abs(vpp - d2)) < 1e-4

    def test_validation(self):
        with pytest.raises(ValueError):
            Cutoff(n0=0)
        with pytest.raises(ValueError):
            cutoff_value(Cutoff(1), -0.1)


class TestTestFunctions:
    def test_poly_bump_boundary_derivatives(self):
        # one-sided limits at r = R must survive the support clamp:
        # xi'(R-) = -4/R * 0 = 0 but xi''(R-) = 8/R^2
        xi = poly_bump(2.0)
        assert float(xi.value(2.0)) == 0.0
        assert float(xi.d1(2.0)) == pytest.approx(0.0, abs=1e-14)
        assert float(xi.d2(2.0)) == pytest.approx(8.0 / 4.0, rel=1e-14)
        assert float(xi.d2(2.0 + 1e-9)) == 0.0

    def test_poly_bump_values(self):
        xi = poly_bump(1.0)
        assert xi.origin_value == 1.0
        assert float(xi.value(0.5)) == pytest.approx(0.5625)
        assert float(xi.d1(0.5)) == pytest.approx(-1.5)
        assert float(xi.d2(0.5)) == pytest.approx(-1.0)

    def test_poly_bump_derivatives_fd(self):
        xi = poly_bump(1.0)
        r = np.linspace(0.05, 0.9, 25)
        h = 1e-6
        fd1 = (xi.value(r + h) - xi.value(r - h)) / (2 * h)
        fd2 = (xi.value(r + h) - 2 * xi.value(r) + xi.value(r - h)) / h ** 2
        assert np.max(np.abs(fd1 - xi.d1(r))) < 1e-8
        assert np.max(np.abs(fd2 - xi.d2(r))) < 1e-3

    def test_annulus_plateau_shape(self):
        xi = annulus_plateau(0.2, 0.4, 0.6, 0.8)
        assert xi.origin_value == 0.0
        assert float(xi.value(0.5)) == 1.0
        assert float(xi.value(0.1)) == 0.0
        assert float(xi.value(0.9)) == 0.0
        assert 0.0 < float(xi.value(0.3)) < 1.0

    def test_annulus_plateau_derivatives_fd(self):
        xi = annulus_plateau(0.2, 0.4, 0.6, 0.8)
        r = np.linspace(0.05, 0.95, 61)
        h = 1e-6
        fd1 = (xi.value(r + h) - xi.value(r - h)) / (2 * h)
        fd2 = (xi.value(r + h) - 2 * xi.value(r) + xi.value(r - h)) / h ** 2
        assert np.max(np.abs(fd1 - xi.d1(r))) < 1e-7
        assert np.max(np.abs(fd2 - xi.d2(r))) < 1e-2

    def test_annulus_plateau_validation(self):
        with pytest.raises(ValueError):
            annulus_plateau(0.4, 0.2, 0.6, 0.8)
