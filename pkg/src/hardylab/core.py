"""Closed-form building blocks for the inverse-square Hardy operator.

The operator under study is ``L = -laplace + mu/|x|^2`` on a domain of
R^N containing the origin, with ``mu >= mu0 := -(N-2)^2/4``.  Everything
in this module is exact scalar algebra: the indicial exponents
``tau_minus <= tau_plus`` (roots of ``mu - t*(t+N-2) = 0``), the singular
and regular radial kernel solutions ``phi`` and ``gamma``, the
normalization constant ``c_mu`` of the weighted Dirac identity, the
critical gradient-integrability exponent ``p_star``, the quadratic
barrier used for comparison arguments, the soft-threshold truncation
``s_k``, smooth radial cutoffs, and closed-form radial test functions.

All derived constants are computed once per parameter set and cached;
downstream modules must not recompute exponents on their own.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable

import numpy as np

__all__ = [
    "sphere_area",
    "HardyParams",
    "DerivedExponents",
    "exponents",
    "p_star_remark_diagnostic",
    "phi",
    "gamma",
    "TruncationLevel",
    "s_k",
    "Barrier",
    "barrier_value",
    "supersolution_margin",
    "is_supersolution",
    "Cutoff",
    "cutoff_value",
    "TestFunction",
    "poly_bump",
    "annulus_plateau",
]


def sphere_area(n: int) -> float:
    """Surface area of the unit sphere S^{n-1} in R^n."""
    return 2.0 * math.pi ** (n / 2.0) / math.gamma(n / 2.0)


@dataclass(frozen=True)
class HardyParams:
    """Dimension N >= 3 and inverse-square coefficient mu >= -(N-2)^2/4."""

    dimension: int
    mu: float

    def __post_init__(self):
        if int(self.dimension) != self.dimension or self.dimension < 3:
            raise ValueError(f"dimension must be an integer >= 3, got {self.dimension}")
        object.__setattr__(self, "dimension", int(self.dimension))
        object.__setattr__(self, "mu", float(self.mu))
        if self.mu < self.mu0:
            raise ValueError(
                f"mu below Hardy threshold {self.mu0}: operator not bounded below"
            )

    @property
    def mu0(self) -> float:
        n = self.dimension
        return -((n - 2) ** 2) / 4.0

    @property
    def dual_solvable(self) -> bool:
        """True iff mu > (3/4)*mu0, strictly; equality is rejected."""
        return self.mu > 0.75 * self.mu0

    @property
    def critical_hardy(self) -> bool:
        return self.mu == self.mu0


@dataclass(frozen=True)
class DerivedExponents:
    """Constants derived from (N, mu); see :func:`exponents`."""

    tau_minus: float
    tau_plus: float
    c_mu: float
    p_star: float
    s: float          # sqrt(mu - mu0)
    surface: float    # |S^{N-1}|


@lru_cache(maxsize=None)
def exponents(params: HardyParams) -> DerivedExponents:
    """Indicial exponents and derived constants for given parameters.

    tau_{+/-} = -(N-2)/2 +/- sqrt(mu - mu0) are the two roots of
    mu - t*(t+N-2) = 0.  c_mu = 2*sqrt(mu-mu0)*|S^{N-1}| for mu > mu0
    and |S^{N-1}| at mu = mu0.  p_star = (N+tau_plus)/(N-1+tau_plus).
    """
    n = params.dimension
    s = math.sqrt(params.mu - params.mu0)
    half = (n - 2) / 2.0
    tau_plus = -half + s
    tau_minus = -half - s
    surf = sphere_area(n)
    c_mu = surf if s == 0.0 else 2.0 * s * surf
    p_star = (n + tau_plus) / (n - 1 + tau_plus)
    return DerivedExponents(
        tau_minus=tau_minus,
        tau_plus=tau_plus,
        c_mu=c_mu,
        p_star=p_star,
        s=s,
        surface=surf,
    )


def p_star_remark_diagnostic(params: HardyParams) -> dict:
    """Compare the authoritative p_star with the alternative form 1 - 2/tau_minus.

    The alternative expression circulating in the literature does not agree
    with (N+tau_plus)/(N-1+tau_plus) in general (e.g. N=3, mu=0 gives 3
    versus 3/2).  We expose both and their discrepancy; only ``p_star`` is
    used anywhere else in the library.
    """
    ex = exponents(params)
    alt = 1.0 - 2.0 / ex.tau_minus
    return {
        "p_star": ex.p_star,
        "remark_form": alt,
        "discrepancy": abs(ex.p_star - alt),
    }


def phi(params: HardyParams, r):
    """Singular radial kernel solution: r^{tau_minus}, or -r^{tau_minus}*ln(r) at mu=mu0."""
    r = np.asarray(r, dtype=float)
    if np.any(r <= 0.0):
        raise ValueError("phi is singular at the origin: r must be > 0")
    ex = exponents(params)
    if params.critical_hardy:
        out = -(r ** ex.tau_minus) * np.log(r)
    else:
        out = r ** ex.tau_minus
    return out if out.ndim else float(out)


def gamma(params: HardyParams, r):
    """Regular radial kernel solution r^{tau_plus}; the density of the working weight."""
    r = np.asarray(r, dtype=float)
    if np.any(r <= 0.0):
        raise ValueError("gamma requires r > 0")
    out = r ** exponents(params).tau_plus
    return out if out.ndim else float(out)


@dataclass(frozen=True)
class TruncationLevel:
    """Level k > 0 of the soft-threshold truncation."""

    k: float

    def __post_init__(self):
        if not (self.k > 0.0 and math.isfinite(self.k)):
            raise ValueError("truncation level k must be finite and > 0")


def s_k(level: TruncationLevel | float, t):
    """Soft threshold: t+k below -k, zero on [-k, k], t-k above k."""
    k = level.k if isinstance(level, TruncationLevel) else TruncationLevel(level).k
    t = np.asarray(t, dtype=float)
    out = np.sign(t) * np.maximum(np.abs(t) - k, 0.0)
    return out if out.ndim else float(out)


# ---------------------------------------------------------------------------
# barrier


@dataclass(frozen=True)
class Barrier:
    """Quadratic barrier a0/(N+2)*(R0^2 - r^2) dominating dual solutions.

    a0 bounds the sup norm of the data (f plus div F); R0 is the radius of
    a ball enclosing the domain.
    """

    a0: float
    R0: float

    def __post_init__(self):
        if self.a0 < 0.0:
            raise ValueError("a0 must be >= 0")
        if not self.R0 > 0.0:
            raise ValueError("R0 must be > 0")


def barrier_value(b: Barrier, params: HardyParams, r):
    r = np.asarray(r, dtype=float)
    if np.any(r < 0.0) or np.any(r > b.R0):
        raise ValueError("barrier is defined on 0 <= r <= R0")
    out = b.a0 / (params.dimension + 2) * (b.R0 ** 2 - r ** 2)
    return out if out.ndim else float(out)


def supersolution_margin(params: HardyParams) -> float:
    """(2N + 4*tau_plus)/(N+2) - 1; positive exactly when mu > (3/4)*mu0.

    Applying the dual operator to the barrier with unit data bound gives
    2*(N + 2*tau_plus)/(N+2) times the data; a positive margin means the
    barrier is a supersolution.  The margin vanishes at mu = (3/4)*mu0,
    where tau_plus = -(N-2)/4 and 2N + 4*tau_plus = N + 2 exactly.
    """
    n = params.dimension
    tp = exponents(params).tau_plus
    return (2 * n + 4 * tp) / (n + 2) - 1.0


def is_supersolution(b: Barrier, params: HardyParams) -> bool:
    return supersolution_margin(params) >= 0.0


# ---------------------------------------------------------------------------
# cutoff

def _smoothstep(s):
    """Quintic smoothstep 6s^5 - 15s^4 + 10s^3 clamped to [0, 1]; C^2."""
    s = np.clip(s, 0.0, 1.0)
    return s ** 3 * (10.0 + s * (-15.0 + 6.0 * s))


def _smoothstep_d1(s):
    s = np.asarray(s, dtype=float)
    inside = (s > 0.0) & (s < 1.0)
    return np.where(inside, 30.0 * s ** 2 * (1.0 - s) ** 2, 0.0)


def _smoothstep_d2(s):
    s = np.asarray(s, dtype=float)
    inside = (s > 0.0) & (s < 1.0)
    return np.where(inside, 60.0 * s * (1.0 - s) * (1.0 - 2.0 * s), 0.0)


@dataclass(frozen=True)
class Cutoff:
    """Decreasing C^2 profile: 1 on [0, 1/n0], 0 on [2/n0, inf).

    The base profile is 1 on [0,1] and 0 on [2,inf) with a quintic
    smoothstep descent on [1,2]; the scaled profile is base(n0*r).
    """

    n0: int = 1

    def __post_init__(self):
        if int(self.n0) != self.n0 or self.n0 < 1:
            raise ValueError("n0 must be an integer >= 1")


def cutoff_value(c: Cutoff, r):
    """Return (value, first derivative, second derivative) of the scaled cutoff."""
    r = np.asarray(r, dtype=float)
    if np.any(r < 0.0):
        raise ValueError("cutoff defined for r >= 0")
    t = c.n0 * r  # base coordinate
    s = t - 1.0   # descent coordinate on [0, 1]
    v = 1.0 - _smoothstep(s)
    d1 = -_smoothstep_d1(s) * c.n0
    d2 = -_smoothstep_d2(s) * c.n0 ** 2
    if v.ndim:
        return v, d1, d2
    return float(v), float(d1), float(d2)


# ---------------------------------------------------------------------------
# radial test functions (closed-form value and two derivatives)


@dataclass(frozen=True)
class TestFunction:
    """Radial test function with closed-form derivatives.

    ``value``, ``d1``, ``d2`` are vectorized callables of r >= 0.  The
    function must vanish at the outer boundary of the domain it is paired
    with; ``origin_value`` caches value at r=0 for Dirac pairings.
    """

    value: Callable
    d1: Callable
    d2: Callable
    support: tuple = (0.0, math.inf)
    label: str = ""

    @property
    def origin_value(self) -> float:
        return float(self.value(0.0))

    def __call__(self, r):
        return self.value(r)


def poly_bump(radius: float = 1.0, label: str = "poly_bump") -> TestFunction:
    """(1 - (r/R)^2)^2 on [0, R]: C^{1,1} up to the boundary, equals 1 at 0."""
    R2 = radius * radius

    def val(r):
        r = np.asarray(r, dtype=float)
        q = np.clip(1.0 - r * r / R2, 0.0, None)
        return q * q

    # derivatives take interior (one-sided) values on the closed support,
    # so quadrature over [0, R] sees the correct boundary limits
    def d1(r):
        r = np.asarray(r, dtype=float)
        q = 1.0 - r * r / R2
        return np.where(q >= 0.0, -4.0 * r / R2 * q, 0.0)

    def d2(r):
        r = np.asarray(r, dtype=float)
        q = 1.0 - r * r / R2
        return np.where(q >= 0.0, -4.0 / R2 * q + 8.0 * r * r / (R2 * R2), 0.0)

    return TestFunction(val, d1, d2, support=(0.0, radius), label=label)


def annulus_plateau(a1: float, a2: float, a3: float, a4: float,
                    label: str = "annulus_plateau") -> TestFunction:
    """C^2 plateau: 0 outside (a1, a4), 1 on [a2, a3], smoothstep ramps.

    Vanishes at the origin, so its Dirac pairing must be zero.
    """
    if not (0.0 <= a1 < a2 <= a3 < a4):
        raise ValueError("need 0 <= a1 < a2 <= a3 < a4")
    wl = a2 - a1
    wr = a4 - a3

    def val(r):
        r = np.asarray(r, dtype=float)
        up = _smoothstep((r - a1) / wl)
        down = 1.0 - _smoothstep((r - a3) / wr)
        return up * down

    def d1(r):
        r = np.asarray(r, dtype=float)
        sl = (r - a1) / wl
        sr = (r - a3) / wr
        up = _smoothstep(sl)
        down = 1.0 - _smoothstep(sr)
        return _smoothstep_d1(sl) / wl * down - up * _smoothstep_d1(sr) / wr

    def d2(r):
        r = np.asarray(r, dtype=float)
        sl = (r - a1) / wl
        sr = (r - a3) / wr
        up = _smoothstep(sl)
        down = 1.0 - _smoothstep(sr)
        return (_smoothstep_d2(sl) / wl ** 2 * down
                - 2.0 * _smoothstep_d1(sl) / wl * _smoothstep_d1(sr) / wr
                + up * (-_smoothstep_d2(sr) / wr ** 2))

    return TestFunction(val, d1, d2, support=(a1, a4), label=label)
