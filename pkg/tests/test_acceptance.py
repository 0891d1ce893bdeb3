"""Acceptance gate: the nine primary criteria, one pass/fail line each.

Each test prints a single labeled verdict line before asserting, so the
captured output of a full run doubles as the acceptance report.  Tolerances
are stated inline and never loosened to accommodate the implementation.
"""

import math
import time

import numpy as np
import pytest

from hardylab.cli import EXIT_PASS, EXIT_SUITE_FAILURE, main
from hardylab.core import HardyParams, exponents, poly_bump
from hardylab.grid import RadialFunction, build_mesh, from_callable
from hardylab.norms import (equality_profile, minimal_hypothesis_constant,
                            stampacchia_k0)
from hardylab.operator import (DirichletProblem, OperatorKind, dirac_oracle,
                               solve_dirac, solve_dual, weak_identity_defect)
from hardylab.suites import (SuiteConfig, suite_critical_exponent,
                             suite_dual_linfty, suite_epsilon_cauchy,
                             suite_marcinkiewicz)

TRIPLES = [(3, 0.0), (3, 2.0), (4, 1.0)]


def _verdict(num, label, ok):
    print(f"[criterion {num}] {label}: {'PASS' if ok else 'FAIL'}")
    return ok


def test_criterion_1_fundamental_identity():
    ok = True
    for n, mu in TRIPLES:
        params = HardyParams(n, mu)
        ex = exponents(params)
        mesh = build_mesh(0.0, 1.0, 1024, grading=3.0)
        phi_fn = RadialFunction(mesh=mesh, values=np.ones(1025),
                                exponent=ex.tau_minus)
        xi = poly_bump(1.0)
        t0 = time.perf_counter()
        defect = weak_identity_defect(params, phi_fn, xi, ex.c_mu)
        wall = time.perf_counter() - t0
        ok = ok and defect / ex.c_mu < 1e-3 and wall < 1.0
    assert _verdict(1, "fundamental identity defect < 1e-3, < 1 s/case", ok)


def test_criterion_2_dirac_oracle():
    ok = True
    for n, mu in TRIPLES:
        params = HardyParams(n, mu)
        mesh = build_mesh(0.0, 1.0, 1024, grading=3.0)
        res = solve_dirac(params, mesh, strength=1.0)
        oracle = dirac_oracle(params, 1.0)
        r = mesh.nodes[(mesh.nodes >= 0.05) & (mesh.nodes <= 0.95)]
        rel = np.abs(np.asarray(res.u(r)) - oracle(r)) / np.abs(oracle(r))
        ok = ok and float(np.max(rel)) < 1e-3
    # mu = 0 closed form is the classical ball kernel
    u = dirac_oracle(HardyParams(3, 0.0), 1.0)
    rr = np.array([0.2, 0.5, 0.8])
    ok = ok and np.allclose(u(rr), 1.0 / rr - 1.0, rtol=1e-14)
    assert _verdict(2, "Dirac oracle max relative error < 1e-3", ok)


def test_criterion_3_critical_exponents():
    expected = {
        (3, 2.0): {"unweighted_v0Gamma": 1.5, "weighted_v0": 4.0 / 3.0},
        (4, 1.0): {"unweighted_v0Gamma": 4.0 / 3.0,
                   "weighted_v0": 1.2928932188134525},
    }
    ok = True
    for (n, mu), preds in expected.items():
        t0 = time.perf_counter()
        rep = suite_critical_exponent(SuiteConfig(dimension=n, mu=mu))
        wall = time.perf_counter() - t0
        for case, pred in preds.items():
            est = rep.fitted_value(f"{case}_estimate")
            ok = ok and abs(est - pred) / pred <= 0.05
        ok = ok and wall < 10.0
    t0 = time.perf_counter()
    rep = suite_critical_exponent(SuiteConfig(dimension=3, mu=-0.15))
    wall = time.perf_counter() - t0
    binding = rep.fitted_value("binding_threshold")
    ok = ok and abs(binding - 1.5) / 1.5 <= 0.05 and wall < 10.0
    assert _verdict(3, "critical exponents within 5%, < 10 s/triple", ok)


def test_criterion_4_epsilon_cauchy_rate():
    ok = True
    details = []
    for n, mu in ((3, 2.0), (4, 1.0)):
        cfg = SuiteConfig(dimension=n, mu=mu,
                          eps_ladder=tuple(2.0 ** (-j) for j in range(3, 9)))
        rep = suite_epsilon_cauchy(cfg)
        slope = rep.fitted_value("slope")
        target = (n - 2.0) / 2.0
        details.append(f"N={n}: slope {slope:.3f} vs target {target}")
        ok = ok and abs(slope - target) <= 0.2 * abs(target)
    verdict = _verdict(4, "epsilon-Cauchy slope (N-2)/2 within 20%", ok)
    assert verdict, "; ".join(details)


def test_criterion_5_dual_linfty_stability():
    rep = suite_dual_linfty(SuiteConfig(cells=1024, n_random=50))
    ok = rep.passed
    for variant in ("unweighted", "weighted"):
        sup = rep.fitted_value(f"{variant}_sup_ratio")
        change = rep.fitted_value(f"{variant}_mesh_change")
        ok = ok and math.isfinite(sup) and change < 0.10
    assert _verdict(5, "dual sup-norm finite, < 10% mesh change", ok)


def test_criterion_6_manufactured_convergence():
    params = HardyParams(3, 2.0)
    cells = [64, 128, 256, 512]
    errs = []
    for nc in cells:
        mesh = build_mesh(0.0, 1.0, nc, grading=2.0)
        f = from_callable(mesh,
                          lambda r: 10.0 * np.ones_like(np.asarray(r, float)))
        u = solve_dual(DirichletProblem(params=params, mesh=mesh,
                                        kind=OperatorKind.dual(), f=f)).u
        errs.append(float(np.max(np.abs(u.values - (1.0 - mesh.nodes ** 2)))))
    order = -float(np.polyfit(np.log(cells), np.log(errs), 1)[0])
    ok = abs(order - 2.0) <= 0.2
    assert _verdict(6, f"manufactured convergence order {order:.3f} in 2.0 +/- 0.2", ok)


def test_criterion_7_marcinkiewicz_bound():
    rep = suite_marcinkiewicz(SuiteConfig())
    ok = rep.passed
    ok = ok and rep.fitted_value("ratio_spread") < 10.0
    changes = [row[3] for row in rep.rows]
    ok = ok and max(changes) < 0.10
    fit = rep.fitted_value("level_power_fit")
    ok = ok and abs(fit - 2.0) / 2.0 <= 0.10
    assert _verdict(7, "Marcinkiewicz ratios bounded, level power law within 10%", ok)


def test_criterion_8_stampacchia():
    t, level, A = equality_profile(2.0)
    res = stampacchia_k0(t, level, alpha=2.0, A=A)
    ok = abs(res.k0 - res.bound) / res.bound <= 0.05
    rng = np.random.default_rng(20260823)
    for _ in range(25):
        tt = np.linspace(0.0, rng.uniform(0.5, 2.0), 300)
        lvl = np.cumsum(rng.uniform(0.0, 1.0, len(tt))[::-1])[::-1]
        alpha = rng.uniform(1.3, 3.0)
        Afit = minimal_hypothesis_constant(tt, lvl, alpha)
        r = stampacchia_k0(tt, lvl, alpha=alpha, A=Afit)
        ok = ok and r.k0 <= r.bound * (1.0 + 1e-9)
    assert _verdict(8, "Stampacchia k0 within 5%, bound never violated", ok)


def test_criterion_9_determinism(tmp_path):
    codes = []
    for sub in ("run1", "run2"):
        codes.append(main(["verify", "all", "--out", str(tmp_path / sub)]))
    ok = all(c in (EXIT_PASS, EXIT_SUITE_FAILURE) for c in codes)
    ok = ok and codes[0] == codes[1]
    names = sorted(p.name for p in (tmp_path / "run1").glob("suite_*.csv"))
    ok = ok and len(names) == 6
    for name in names:
        ba = (tmp_path / "run1" / name).read_bytes()
        bb = (tmp_path / "run2" / name).read_bytes()
        ok = ok and ba == bb
    assert _verdict(9, "verify all twice produces byte-identical CSVs", ok)
