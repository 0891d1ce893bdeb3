"""Radial discretization of the Hardy operator and its drift dual.

Direct form:  L u   = -u'' - (N-1)/r u' + mu/r^2 u
Dual form:    L* w  = -w'' - (N-1)/r w' - 2*tau_plus/r w'
Regularized:  the drift term is switched off inside r < epsilon.

The dual operator is never discretized with an explicit drift term.  Since
(N-1+2*tau_plus)/r = (N-1)/r + 2*tau_plus/r exactly, it is rewritten in
conservative form

    L* w = -omega^{-1} (omega w')',   omega(r) = r^{N-1+2*tau_plus},

which is self-adjoint in L^2(omega dr) and discretizes into a symmetric
positive M-matrix (vertex-centered finite volumes, exact face
transmissibilities 1 / int dr/omega).  The direct problem is reduced to the
same kernel by the substitution u = r^{tau_plus} v, which removes the
indicial singularity: L(r^{tau_plus} v) = r^{tau_plus} * (-omega^{-1}(omega v')').

At the origin omega degenerates fast enough that the face transmissibility
through r=0 vanishes; no boundary condition is imposed there beyond
regularity of the unknown (Neumann-type closure in the graded coordinate).
The outer boundary is homogeneous Dirichlet.

Dirac normalization: "strength k" means the weighted distributional pairing
carries c_mu * k * xi(0).  Unit strength corresponds to c_mu in the
identity; results are NOT divided by c_mu.  Both conventions appear in the
literature, so this one is stated here once and used everywhere.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace, field
from typing import Callable, Optional

import numpy as np
from scipy.linalg import solve_banded

from .core import (Cutoff, HardyParams, TestFunction, cutoff_value, exponents,
                   phi, poly_bump, annulus_plateau)
from .grid import (PowerWeight, RadialFunction, RadialMesh, _vec_moment,
                   build_mesh, differentiate, from_callable, gamma_weight,
                   integrate, power_weight, scale_power)

__all__ = [
    "OperatorKind",
    "DirichletProblem",
    "SolveResult",
    "conservative_weight",
    "lstar_apply",
    "radial_apply",
    "assemble",
    "solve_dual",
    "solve_direct_regular",
    "solve_dirac",
    "dirac_oracle",
    "weak_identity_defect",
    "default_cutoff_scale",
]


@dataclass(frozen=True)
class OperatorKind:
    kind: str                       # 'direct' | 'dual' | 'dual_regularized'
    epsilon: Optional[float] = None

    def __post_init__(self):
        if self.kind not in ("direct", "dual", "dual_regularized"):
            raise ValueError(f"unknown operator kind {self.kind!r}")
        if self.kind == "dual_regularized":
            if self.epsilon is None or not self.epsilon > 0.0:
                raise ValueError("dual_regularized requires epsilon > 0")
        elif self.epsilon is not None:
            raise ValueError("epsilon only applies to dual_regularized")

    @classmethod
    def direct(cls):
        return cls("direct")

    @classmethod
    def dual(cls):
        return cls("dual")

    @classmethod
    def dual_regularized(cls, epsilon: float):
        return cls("dual_regularized", epsilon=epsilon)


@dataclass
class DirichletProblem:
    """Dual (or regularized dual) problem L* w = f + div F, w = 0 on the outer boundary.

    f is a scalar radial profile; F is the radial component of the vector
    field F(r) * x/|x|, whose divergence is F' + (N-1) F / r.  Either may be
    None (zero).
    """

    params: HardyParams
    mesh: RadialMesh
    kind: OperatorKind
    f: Optional[RadialFunction] = None
    F: Optional[RadialFunction] = None

    def source_terms(self) -> list:
        """The right side as a list of power-split radial profiles."""
        n = self.params.dimension
        terms = []
        if self.f is not None:
            terms.append(self.f)
        if self.F is not None:
            terms.append(differentiate(self.F))
            terms.append(replace(self.F, values=(n - 1.0) * self.F.values,
                                 exponent=self.F.exponent - 1.0))
        return terms


@dataclass
class SolveResult:
    u: RadialFunction
    residual_linf: float
    weak_identity_defect: float
    stats: dict = field(default_factory=dict)


def conservative_weight(params: HardyParams, kind: OperatorKind) -> PowerWeight:
    """The self-adjointness weight omega for the requested operator.

    dual / direct-regular: omega = r^{N-1+2 tau_plus}.  For the regularized
    dual the drift is off inside B_epsilon, so omega is r^{N-1} there, glued
    so that omega (hence the flux omega*u') is continuous at epsilon.
    """
    n = params.dimension
    tp = exponents(params).tau_plus
    a = n - 1.0 + 2.0 * tp
    if kind.kind == "dual_regularized":
        eps = kind.epsilon
        return PowerWeight(coeffs=(eps ** (2.0 * tp), 1.0),
                           exps=(n - 1.0, a), breaks=(eps,), kind="omega")
    return power_weight(1.0, a, kind="omega")


# ---------------------------------------------------------------------------
# pointwise application


def lstar_apply(params: HardyParams, xi: TestFunction, r):
    """L* xi evaluated analytically: -xi'' - (N-1+2 tau_plus)/r xi'.

    At r=0 the limit -(N + 2 tau_plus) xi''(0) is used (valid for even,
    twice-differentiable test functions, for which xi'(r)/r -> xi''(0)).
    """
    r = np.asarray(r, dtype=float)
    n = params.dimension
    tp = exponents(params).tau_plus
    d1 = np.asarray(xi.d1(r), dtype=float)
    d2 = np.asarray(xi.d2(r), dtype=float)
    with np.errstate(divide="ignore", invalid="ignore"):
        out = -d2 - (n - 1.0 + 2.0 * tp) * np.where(r > 0.0, d1 / np.where(r > 0, r, 1.0), 0.0)
    out = np.where(r == 0.0, -(n + 2.0 * tp) * d2, out)
    return out if out.ndim else float(out)


def radial_apply(params: HardyParams, kind: OperatorKind, u: RadialFunction, r):
    """Apply the operator to a sampled profile at interior radii (finite differences)."""
    r = np.asarray(r, dtype=float)
    if np.any(r <= u.mesh.r_in) or np.any(r >= u.mesh.r_out):
        raise ValueError("operator applied at interior radii only")
    n = params.dimension
    tp = exponents(params).tau_plus
    du = differentiate(u)
    d2u = differentiate(du)
    up, upp = np.asarray(du(r)), np.asarray(d2u(r))
    if kind.kind == "direct":
        out = -upp - (n - 1.0) / r * up + params.mu / r ** 2 * np.asarray(u(r))
    elif kind.kind == "dual":
        out = -upp - (n - 1.0 + 2.0 * tp) / r * up
    else:
        drift_on = (r > kind.epsilon).astype(float)
        out = -upp - (n - 1.0) / r * up - 2.0 * tp / r * up * drift_on
    return out if out.ndim else float(out)


# ---------------------------------------------------------------------------
# assembly


def _halfcell_loads(term: RadialFunction, omega: PowerWeight) -> tuple:
    """Per cell, integrals of term * omega over its left and right halves."""
    r = term.mesh.nodes
    v = term.values
    x0, x1 = r[:-1], r[1:]
    mid = 0.5 * (x0 + x1)
    slope = (v[1:] - v[:-1]) / (x1 - x0)
    c0 = v[:-1] - slope * x0
    e = term.exponent

    def load(a, b):
        m0 = _vec_moment(omega, a, b, shift=e)
        m1 = _vec_moment(omega, a, b, shift=e + 1.0)
        return np.where(c0 == 0.0, 0.0, c0 * m0) + np.where(slope == 0.0, 0.0, slope * m1)

    return load(x0, mid), load(mid, x1)


def assemble(problem: DirichletProblem):
    """Build the tridiagonal finite-volume system for the conservative form.

    Returns (ab, rhs, interior) where ab is the (1,1)-banded matrix in
    scipy ``solve_banded`` layout and interior are the unknown node indices.
    """
    params, mesh, kind = problem.params, problem.mesh, problem.kind
    if kind.kind in ("dual", "dual_regularized") and not params.dual_solvable:
        raise ValueError("dual operator requires mu > (3/4) * Hardy threshold")
    if kind.kind == "dual_regularized" and not kind.epsilon < mesh.r_out:
        raise ValueError("epsilon must be smaller than the outer radius")
    omega = conservative_weight(params, kind)
    r = mesh.nodes
    nfaces = len(r) - 1
    with np.errstate(divide="ignore"):
        inv = _vec_moment(omega, r[:-1], r[1:], invert=True)
        T = np.where(np.isfinite(inv), 1.0 / inv, 0.0)
        T = np.where(inv == math.inf, 0.0, T)

    # unknowns: interior nodes; on a ball the origin node is recovered after
    # the solve (zero transmissibility through r=0 decouples it).
    interior = np.arange(1, len(r) - 1)
    nun = len(interior)
    rhs = np.zeros(nun)
    for term in problem.source_terms():
        left, right = _halfcell_loads(term, omega)
        # node i owns right half of cell i-1 and left half of cell i
        rhs += right[interior - 1] + left[interior]
        if mesh.r_in == 0.0:
            rhs[0] += left[0]  # fold the origin half-cell into node 1
    Tl = T[interior - 1].copy()
    if mesh.r_in == 0.0:
        Tl[0] = 0.0  # no flux through the origin
    Tr = T[interior]
    diag = Tl + Tr
    ab = np.zeros((3, nun))
    ab[0, 1:] = -Tr[:-1]
    ab[1, :] = diag
    ab[2, :-1] = -Tr[:-1]
    return ab, rhs, interior


def _default_test(mesh: RadialMesh) -> TestFunction:
    if mesh.r_in == 0.0:
        return poly_bump(mesh.r_out)
    span = mesh.r_out - mesh.r_in
    return annulus_plateau(mesh.r_in, mesh.r_in + 0.3 * span,
                           mesh.r_out - 0.3 * span, mesh.r_out)


def _weak_form_defect(problem: DirichletProblem, w: RadialFunction) -> float:
    """Residual of the omega-weighted weak form against a smooth test function."""
    omega = conservative_weight(problem.params, problem.kind)
    xi = _default_test(problem.mesh)
    mesh = problem.mesh
    dw = differentiate(w)
    lhs_fn = RadialFunction(mesh=mesh,
                            values=dw.node_values() * np.asarray(xi.d1(mesh.nodes)),
                            exponent=0.0)
    lhs = integrate(lhs_fn, omega)
    rhs = 0.0
    xiv = np.asarray(xi.value(mesh.nodes))
    for term in problem.source_terms():
        rhs += integrate(replace(term, values=term.values * xiv), omega)
    return abs(lhs - rhs) / max(1.0, abs(rhs))


def _solve_tridiag(ab: np.ndarray, rhs: np.ndarray) -> np.ndarray:
    # symmetric Jacobi scaling before the pivoted elimination: the
    # transmissibilities span many orders of magnitude near the origin and
    # unscaled elimination loses the tiny inner fluxes to rounding
    if np.any(ab[1] <= 0.0) or not np.all(np.isfinite(ab[1])):
        raise RuntimeError("singular or non-finite diagonal in tridiagonal system")
    d = 1.0 / np.sqrt(ab[1])
    abs_ = np.zeros_like(ab)
    abs_[1] = 1.0
    abs_[0, 1:] = ab[0, 1:] * d[1:] * d[:-1]
    abs_[2, :-1] = ab[2, :-1] * d[:-1] * d[1:]
    try:
        sol = d * solve_banded((1, 1), abs_, rhs * d)
    except np.linalg.LinAlgError as err:  # pragma: no cover - defensive
        raise RuntimeError(f"singular tridiagonal factorization: {err}") from err
    if not np.all(np.isfinite(sol)):
        raise RuntimeError("tridiagonal solve produced non-finite values")
    return sol


def _banded_matvec(ab: np.ndarray, x: np.ndarray) -> np.ndarray:
    y = ab[1] * x
    y[:-1] += ab[0, 1:] * x[1:]
    y[1:] += ab[2, :-1] * x[:-1]
    return y


def solve_dual(problem: DirichletProblem) -> SolveResult:
    """Solve the dual (or regularized dual) Dirichlet problem."""
    if problem.kind.kind == "direct":
        raise ValueError("solve_dual handles dual kinds; use solve_dirac/"
                         "solve_direct_regular for the direct operator")
    ab, rhs, interior = assemble(problem)
    sol = _solve_tridiag(ab, rhs)
    res = _banded_matvec(ab, sol) - rhs
    residual = float(np.max(np.abs(res)) / max(1.0, np.max(np.abs(rhs))))
    r = problem.mesh.nodes
    values = np.zeros_like(r)
    values[interior] = sol
    if problem.mesh.r_in == 0.0:
        # even-quadratic extrapolation to the origin (w'(0) = 0)
        r1, r2 = r[1], r[2]
        values[0] = (values[1] * r2 ** 2 - values[2] * r1 ** 2) / (r2 ** 2 - r1 ** 2)
    u = RadialFunction(mesh=problem.mesh, values=values)
    defect = _weak_form_defect(problem, u)
    return SolveResult(u=u, residual_linf=residual, weak_identity_defect=defect,
                       stats={"unknowns": len(interior), "kind": problem.kind.kind})


def solve_direct_regular(params: HardyParams, mesh: RadialMesh,
                         g: RadialFunction) -> tuple:
    """Solve L u = g on a ball with u = 0 at r_out and u regular at the origin.

    Regularity is imposed through the substitution u = r^{tau_plus} v: the
    unknown is the regular part v, which satisfies the same conservative
    equation as the dual solve with right side r^{-tau_plus} g.  Returns
    (u as a split profile, residual).
    """
    if mesh.r_in != 0.0:
        raise ValueError("direct regular solve is defined on a ball")
    tp = exponents(params).tau_plus
    prob = DirichletProblem(params=params, mesh=mesh, kind=OperatorKind.direct(),
                            f=scale_power(g, -tp))
    ab, rhs, interior = assemble(prob)
    sol = _solve_tridiag(ab, rhs)
    res = _banded_matvec(ab, sol) - rhs
    residual = float(np.max(np.abs(res)) / max(1.0, np.max(np.abs(rhs))))
    r = mesh.nodes
    values = np.zeros_like(r)
    values[interior] = sol
    r1, r2 = r[1], r[2]
    values[0] = (values[1] * r2 ** 2 - values[2] * r1 ** 2) / (r2 ** 2 - r1 ** 2)
    return RadialFunction(mesh=mesh, values=values, exponent=tp), residual


def default_cutoff_scale(r_out: float) -> int:
    """Smallest n0 with the cutoff supported in the ball: 2/n0 <= r_out."""
    return max(1, math.ceil(2.0 / r_out))


def dirac_oracle(params: HardyParams, R: float) -> Callable:
    """Closed-form solution of the origin-Dirac problem on the ball of radius R.

    u(r) = r^{tau_minus} - R^{tau_minus - tau_plus} r^{tau_plus}: singular
    branch at the origin, vanishing at R, annihilated by the direct operator
    for r > 0.  Carries the unit-strength normalization (pairing c_mu*xi(0)).
    """
    ex = exponents(params)
    if params.critical_hardy:
        raise ValueError("logarithmic Dirac solutions (mu = mu0) are not supported")
    coef = R ** (ex.tau_minus - ex.tau_plus)

    def u(r):
        r = np.asarray(r, dtype=float)
        out = r ** ex.tau_minus - coef * r ** ex.tau_plus
        return out if out.ndim else float(out)

    return u


def solve_dirac(params: HardyParams, mesh: RadialMesh, strength: float,
                n0: Optional[int] = None) -> SolveResult:
    """Solve L u = (strength) * delta_0 on a ball via the cutoff splitting.

    u = strength * (w1 - w2): w1 = phi * eta is the cutoff-localized
    singular kernel (closed form); w2 solves the direct problem with the
    smooth, compactly supported right side -eta' phi' - phi * laplace(eta),
    regular at the origin.  The result is stored as a singular split with
    exponent tau_minus so the r^{tau_minus} factor is carried exactly.
    """
    if mesh.r_in != 0.0:
        raise ValueError("Dirac problem is posed on a ball (r_in = 0)")
    if params.critical_hardy:
        raise ValueError("mu = mu0 Dirac solutions are out of scope")
    ex = exponents(params)
    n = params.dimension
    if n0 is None:
        n0 = default_cutoff_scale(mesh.r_out)
    cut = Cutoff(n0=n0)
    r = mesh.nodes

    if strength == 0.0:
        u = RadialFunction(mesh=mesh, values=np.zeros_like(r), exponent=ex.tau_minus)
        return SolveResult(u=u, residual_linf=0.0, weak_identity_defect=0.0,
                           stats={"n0": n0, "strength": 0.0})

    def rhs_splitting(rr):
        eta, eta1, eta2 = cutoff_value(cut, rr)
        ph = rr ** ex.tau_minus
        ph1 = ex.tau_minus * rr ** (ex.tau_minus - 1.0)
        return -2.0 * eta1 * ph1 - ph * (eta2 + (n - 1.0) / rr * eta1)

    g = from_callable(mesh, rhs_splitting, origin_value=0.0)
    w2, residual = solve_direct_regular(params, mesh, g)

    eta = cutoff_value(cut, r)[0]
    # regular part of u * r^{-tau_minus}; the w2 contribution vanishes at 0
    shift = np.zeros_like(r)
    shift[1:] = r[1:] ** (ex.tau_plus - ex.tau_minus) * w2.values[1:]
    reg = strength * (eta - shift)
    u = RadialFunction(mesh=mesh, values=reg, exponent=ex.tau_minus)
    xi = poly_bump(mesh.r_out)
    defect = weak_identity_defect(params, u, xi,
                                  ex.c_mu * strength * xi.origin_value)
    return SolveResult(u=u, residual_linf=residual, weak_identity_defect=defect,
                       stats={"n0": n0, "strength": strength})


def weak_identity_defect(params: HardyParams, u: RadialFunction,
                         xi: TestFunction, rhs_functional: float,
                         oversample: int = 8) -> float:
    """|int u (L* xi) dgamma  -  rhs_functional|.

    L* xi is evaluated analytically; the weighted integral uses the split
    quadrature, so the singular power of u never gets sampled.  Because the
    stored regular part is piecewise linear, resampling on a subdivided mesh
    is exact for u while sharpening the quadrature of the analytic factor;
    ``oversample`` controls the subdivision.  The test function must vanish
    at the outer boundary.
    """
    mesh = u.mesh
    if abs(float(xi.value(mesh.r_out))) > 1e-12:
        raise ValueError("test function must vanish at the outer boundary")
    if oversample > 1:
        r = mesh.nodes
        steps = np.linspace(0.0, 1.0, oversample, endpoint=False)
        fine = np.append((r[:-1, None] + steps * np.diff(r)[:, None]).ravel(),
                         r[-1])
        mesh = RadialMesh(r_in=mesh.r_in, r_out=mesh.r_out,
                          grading=mesh.grading, nodes=fine)
        vreg = np.interp(fine, u.mesh.nodes, u.values)
    else:
        vreg = u.values
    lst = np.asarray(lstar_apply(params, xi, mesh.nodes))
    prod = RadialFunction(mesh=mesh, values=vreg * lst, exponent=u.exponent)
    val = integrate(prod, gamma_weight(params))
    return abs(val - rhs_functional)
