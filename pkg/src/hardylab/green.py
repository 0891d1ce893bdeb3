"""Mode-0 Green functions on the ball and potentials of radial measures.

Only the spherical average (mode 0) of the Green function is needed for
radial measures.  With P(r) = r^{tau_plus} (regular at the origin) and
Q(r) = r^{tau_minus} - R^{tau_minus - tau_plus} r^{tau_plus} (vanishing at
the outer radius R), the flux Wronskian s^{N-1}(PQ' - P'Q) is the constant
(tau_minus - tau_plus) r^{2-N} * r^{N-1}... it reduces so that the unit-mass
jump normalization gives the symmetric kernel

    G(r, s) = P(min) Q(max) / c_mu.

A Dirac atom of weighted mass k at the origin contributes k * Q / c_mu,
the s -> 0 limit of shells with Gamma-weighted mass held fixed (and equal to
solve_dirac at strength k / c_mu).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .core import HardyParams, exponents, sphere_area
from .grid import (PowerWeight, RadialFunction, RadialMesh, _vec_moment,
                   integrate, power_weight)

__all__ = [
    "RadialMeasure",
    "MeasureNorm",
    "GreenMode0",
    "measure_norm",
    "green_mode0",
    "sample_green",
    "potential",
    "angular_riesz_average",
]


@dataclass(frozen=True)
class RadialMeasure:
    """Nonnegative radial measure: origin atom + spherical shells + density.

    The density is taken against Lebesgue measure dx; shells carry plain
    masses concentrated on spheres of the given radii.
    """

    dirac_strength: float = 0.0
    shells: tuple = ()          # of (radius, mass)
    density: Optional[RadialFunction] = None

    def __post_init__(self):
        if self.dirac_strength < 0.0:
            raise ValueError("Dirac strength must be nonnegative")
        object.__setattr__(self, "shells", tuple((float(s), float(m))
                                                 for s, m in self.shells))
        for s, m in self.shells:
            if s <= 0.0:
                raise ValueError("shell radii must be positive")
            if m < 0.0:
                raise ValueError("shell masses must be nonnegative")

    def supported_in(self, R: float) -> bool:
        if any(s >= R for s, _ in self.shells):
            return False
        if self.density is not None and self.density.mesh.r_out > R + 1e-12:
            return False
        return True

    def scaled(self, factor: float) -> "RadialMeasure":
        dens = self.density
        if dens is not None:
            from dataclasses import replace
            dens = replace(dens, values=factor * dens.values)
        return RadialMeasure(dirac_strength=factor * self.dirac_strength,
                             shells=tuple((s, factor * m) for s, m in self.shells),
                             density=dens)


@dataclass(frozen=True)
class MeasureNorm:
    """Gamma-weighted mass of the punctured-domain part, plus the origin atom.

    The atom is reported separately and never folded into the weighted part.
    """

    weighted: float
    atom: float

    @property
    def total(self) -> float:
        return self.weighted + self.atom


def measure_norm(nu: RadialMeasure, params: HardyParams) -> MeasureNorm:
    """Weighted norm: sum of Gamma(s)-weighted shell masses + Gamma-weighted density."""
    ex = exponents(params)
    weighted = sum(m * s ** ex.tau_plus for s, m in nu.shells)
    if nu.density is not None:
        n = params.dimension
        w = power_weight(sphere_area(n), n - 1.0 + ex.tau_plus, kind="gamma")
        weighted += integrate(nu.density, w)
    return MeasureNorm(weighted=float(weighted), atom=nu.dirac_strength)


@dataclass(frozen=True)
class GreenMode0:
    """Closed-form spherically averaged Green function on the ball of radius R."""

    params: HardyParams
    R: float

    def __post_init__(self):
        if not self.R > 0.0:
            raise ValueError("outer radius must be positive")
        if not self.params.mu > self.params.mu0:
            raise ValueError("Green function requires mu above the Hardy threshold")

    def _pq(self, r):
        ex = exponents(self.params)
        r = np.asarray(r, dtype=float)
        P = r ** ex.tau_plus
        Q = r ** ex.tau_minus - self.R ** (ex.tau_minus - ex.tau_plus) * r ** ex.tau_plus
        return P, Q

    def coefficients(self, s: float) -> tuple:
        """(A, B) with G = A P(r) for r <= s and G = B Q(r) for r >= s."""
        if not 0.0 < s < self.R:
            raise ValueError("source radius must lie strictly inside the ball")
        ex = exponents(self.params)
        Ps, Qs = self._pq(s)
        return float(Qs) / ex.c_mu, float(Ps) / ex.c_mu

    def __call__(self, r, s: float):
        A, B = self.coefficients(s)
        r = np.asarray(r, dtype=float)
        P, Q = self._pq(np.maximum(r, 1e-300))
        out = np.where(r <= s, A * P, B * Q)
        return out if out.ndim else float(out)


def green_mode0(params: HardyParams, R: float) -> GreenMode0:
    return GreenMode0(params=params, R=R)


def sample_green(params: HardyParams, R: float, s: float,
                 mesh: RadialMesh) -> RadialFunction:
    """G(., s) on a mesh as a split profile carrying the r^{tau_plus} factor.

    The regular part is exactly constant inside the source radius, so the
    piecewise-linear representation loses nothing near the origin.
    """
    g = GreenMode0(params=params, R=R)
    ex = exponents(params)
    A, B = g.coefficients(s)
    r = mesh.nodes
    inner = A * np.ones_like(r)
    with np.errstate(divide="ignore"):
        outer = B * (np.where(r > 0.0, r, 1.0) ** (ex.tau_minus - ex.tau_plus)
                     - R ** (ex.tau_minus - ex.tau_plus))
    values = np.where(r <= s, inner, outer)
    return RadialFunction(mesh=mesh, values=values, exponent=ex.tau_plus)


def _cumulative_cell_integrals(term: RadialFunction, w: PowerWeight) -> np.ndarray:
    """Per node i, the integral of term * w over [r_0, r_i]."""
    r = term.mesh.nodes
    v = term.values
    x0, x1 = r[:-1], r[1:]
    slope = (v[1:] - v[:-1]) / (x1 - x0)
    c0 = v[:-1] - slope * x0
    e = term.exponent
    m0 = _vec_moment(w, x0, x1, shift=e)
    m1 = _vec_moment(w, x0, x1, shift=e + 1.0)
    cells = np.where(c0 == 0.0, 0.0, c0 * m0) + np.where(slope == 0.0, 0.0, slope * m1)
    out = np.zeros_like(r)
    out[1:] = np.cumsum(cells)
    return out


def potential(nu: RadialMeasure, params: HardyParams, R: float,
              mesh: RadialMesh) -> RadialFunction:
    """Green potential of a radial measure, sampled on the mesh.

    Superposition of the closed-form kernel: atom k -> k Q / c_mu, shells ->
    mass * G(., s), density -> exact per-cell power-moment quadrature of the
    kernel in the source variable (the diagonal cell is handled analytically
    because the kernel is a power law on each side of the node).
    """
    if mesh.r_in != 0.0 or abs(mesh.r_out - R) > 1e-12:
        raise ValueError("potential mesh must cover the ball of radius R")
    if not nu.supported_in(R):
        raise ValueError("measure must be supported inside the ball")
    ex = exponents(params)
    n = params.dimension
    r = mesh.nodes
    qreg_coef = R ** (ex.tau_minus - ex.tau_plus)
    with np.errstate(divide="ignore"):
        rsafe = np.where(r > 0.0, r, 1.0)
        q_shift = rsafe ** (ex.tau_minus - ex.tau_plus) - qreg_coef
        q_shift[0] = 0.0 if ex.tau_minus < ex.tau_plus else q_shift[0]

    # regular part relative to the generic exponent tau_plus
    reg = np.zeros_like(r)
    for s, m in nu.shells:
        gs = sample_green(params, R, s, mesh)
        reg += m * gs.values
    if nu.density is not None:
        area = sphere_area(n)
        w_gamma = power_weight(area, n - 1.0 + ex.tau_plus)
        w_qmin = power_weight(area, n - 1.0 + ex.tau_minus)
        w_qplus = power_weight(area * qreg_coef, n - 1.0 + ex.tau_plus)
        inner = _cumulative_cell_integrals(nu.density, w_gamma)      # int_0^r rho Gamma
        qm = _cumulative_cell_integrals(nu.density, w_qmin)
        qp = _cumulative_cell_integrals(nu.density, w_qplus)
        outer = (qm[-1] - qm) - (qp[-1] - qp)                        # int_r^R rho Q
        reg += (q_shift * inner + outer) / ex.c_mu

    if nu.dirac_strength > 0.0:
        k = nu.dirac_strength
        # switch to the singular split r^{tau_minus}; the regular branch
        # picks up the factor r^{tau_plus - tau_minus}
        vals = (k / ex.c_mu) * (1.0 - qreg_coef * rsafe ** (ex.tau_plus - ex.tau_minus))
        vals += rsafe ** (ex.tau_plus - ex.tau_minus) * reg
        vals[0] = k / ex.c_mu
        return RadialFunction(mesh=mesh, values=vals, exponent=ex.tau_minus)
    return RadialFunction(mesh=mesh, values=reg, exponent=ex.tau_plus)


_GAUSS_CACHE: dict = {}


def angular_riesz_average(dimension: int, r: float, s: float, a: float,
                          order: int = 200) -> float:
    """Average of |x - y|^{-a} over directions of y with |x| = r, |y| = s.

    Gauss-Legendre quadrature in the polar angle with the (sin theta)^{N-2}
    surface factor.  Returns +inf on the diagonal when the average diverges
    (a >= N - 1).
    """
    if r < 0.0 or s < 0.0:
        raise ValueError("radii must be nonnegative")
    if a == 0.0:
        return 1.0
    if s == 0.0 or r == 0.0:
        d = max(r, s)
        if d == 0.0:
            return math.inf if a > 0.0 else 1.0
        return d ** (-a)
    if r == s and a >= dimension - 1:
        return math.inf
    key = (dimension, order)
    if key not in _GAUSS_CACHE:
        x, wq = np.polynomial.legendre.leggauss(order)
        theta = 0.5 * math.pi * (x + 1.0)
        wq = wq * 0.5 * math.pi
        sinw = np.sin(theta) ** (dimension - 2)
        _GAUSS_CACHE[key] = (theta, wq * sinw, float(np.sum(wq * sinw)))
    theta, wsin, norm = _GAUSS_CACHE[key]
    dist2 = r * r + s * s - 2.0 * r * s * np.cos(theta)
    vals = dist2 ** (-0.5 * a)
    return float(np.sum(wsin * vals) / norm)
