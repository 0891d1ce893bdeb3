"""Weighted Lebesgue, Sobolev and Marcinkiewicz norms; truncation analytics.

The Marcinkiewicz supremum over Borel sets is uncomputable; for monotone
radial integrands the super-level family {|u| > t} is extremal (bathtub
rearrangement), so the norm is evaluated as an adaptively refined scan over
levels, and an annulus cross-check guards the reduction empirically.

Divergence of inner-truncated norms is detected two ways: the slope/R^2
classifier on log(norm) vs log(delta) (thresholds configurable), and a
sharper dyadic-annulus rate fit used to estimate critical exponents.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Callable, Optional, Sequence

import numpy as np

from .core import HardyParams, TruncationLevel, s_k
from .grid import (PowerWeight, RadialFunction, abs_power, differentiate,
                   integrate, lebesgue_weight, level_set_data,
                   super_level_intervals)

__all__ = [
    "NormReport",
    "StampacchiaResult",
    "DivergenceVerdict",
    "lp_norm",
    "w1p_norm",
    "marcinkiewicz_norm",
    "annulus_marcinkiewicz",
    "embedding_check",
    "stampacchia_k0",
    "stampacchia_bound",
    "minimal_hypothesis_constant",
    "equality_profile",
    "truncation_energy_check",
    "truncated_w1p_scan",
    "classify_divergence",
    "gradient_annulus_rate",
    "estimate_critical_exponent",
]


@dataclass(frozen=True)
class NormReport:
    exponent: float
    weight_kind: str
    value: float
    levels: tuple = ()
    extremal_level: float = math.nan

    def __post_init__(self):
        if self.value < 0.0:
            raise ValueError("norm value must be nonnegative")


def lp_norm(u: RadialFunction, p: float, w: PowerWeight,
            lo: Optional[float] = None, hi: Optional[float] = None) -> float:
    if p < 1.0:
        raise ValueError("p must be at least 1")
    return integrate(abs_power(u, p), w, lo=lo, hi=hi) ** (1.0 / p)


def w1p_norm(u: RadialFunction, p: float, w: PowerWeight,
             lo: Optional[float] = None, hi: Optional[float] = None) -> float:
    """lp_norm of u plus lp_norm of its radial derivative (full gradient for radial u)."""
    return (lp_norm(u, p, w, lo=lo, hi=hi)
            + lp_norm(differentiate(u), p, w, lo=lo, hi=hi))


def _level_ratio(u: RadialFunction, t: float, w: PowerWeight, kp: float) -> float:
    meas, mass = level_set_data(u, t, w)
    if meas <= 0.0:
        return 0.0
    return mass / meas ** (1.0 / kp)


def marcinkiewicz_norm(u: RadialFunction, kappa: float, w: PowerWeight,
                       n_levels: int = 48, refine: int = 2) -> NormReport:
    """sup over super-level sets E_t of int_{E_t} |u| dw / w(E_t)^{1/kappa'}.

    Levels are scanned on a log grid from near-zero to the largest finite
    nodal value, then refined around the maximizer.
    """
    if kappa <= 1.0:
        raise ValueError("Marcinkiewicz exponent must exceed 1")
    kp = kappa / (kappa - 1.0)
    au = np.abs(u.node_values())
    tmax = float(np.max(au[np.isfinite(au)]))
    if tmax == 0.0:
        return NormReport(exponent=kappa, weight_kind=w.kind, value=0.0)
    lo_t, hi_t = tmax * 1e-6, tmax * 0.999999
    best_t, best = 0.0, _level_ratio(u, 0.0, w, kp)
    levels = [0.0]
    for _ in range(refine + 1):
        ts = np.geomspace(lo_t, hi_t, n_levels)
        vals = [_level_ratio(u, float(t), w, kp) for t in ts]
        levels.extend(float(t) for t in ts)
        j = int(np.argmax(vals))
        if vals[j] > best:
            best, best_t = vals[j], float(ts[j])
        lo_t = float(ts[max(j - 1, 0)])
        hi_t = float(ts[min(j + 1, len(ts) - 1)])
        if lo_t >= hi_t:
            break
    return NormReport(exponent=kappa, weight_kind=w.kind, value=best,
                      levels=tuple(sorted(levels)), extremal_level=best_t)


def annulus_marcinkiewicz(u: RadialFunction, kappa: float, w: PowerWeight,
                          radii: Sequence[float]) -> float:
    """Max of the Marcinkiewicz ratio over annuli with the given endpoints.

    Cross-check for the level-set reduction: must never exceed the level-set
    supremum for monotone |u|.
    """
    kp = kappa / (kappa - 1.0)
    radii = sorted(radii)
    best = 0.0
    ua = abs_power(u, 1.0)
    for i, a in enumerate(radii):
        for b in radii[i + 1:]:
            meas = w.measure(a, b)
            if meas <= 0.0:
                continue
            mass = integrate(ua, w, lo=a, hi=b)
            best = max(best, mass / meas ** (1.0 / kp))
    return best


def embedding_check(u: RadialFunction, q: float, kappa: float,
                    family: Sequence, w: PowerWeight) -> float:
    """Max over sets E of int_E |u|^q dw / (M^q * w(E)^{1 - q/kappa}).

    M is the computed Marcinkiewicz norm; the q-th power of M is used (the
    only 1-homogeneous form; see README on the first-power variant).
    Family entries are (lo, hi) radial intervals.
    """
    if not 1.0 <= q < kappa:
        raise ValueError("requires 1 <= q < kappa")
    M = marcinkiewicz_norm(u, kappa, w).value
    if M == 0.0:
        return 0.0
    uq = abs_power(u, q)
    best = 0.0
    for lo, hi in family:
        meas = w.measure(lo, hi)
        if meas <= 0.0:
            continue
        num = integrate(uq, w, lo=lo, hi=hi)
        best = max(best, num / (M ** q * meas ** (1.0 - q / kappa)))
    return best


# ---------------------------------------------------------------------------
# Stampacchia truncation


@dataclass(frozen=True)
class StampacchiaResult:
    k0: float           # vanishing level from the marched differential inequality
    bound: float        # closed-form separation-of-variables bound
    h0: float           # total mass H(0)
    alpha: float
    A: float


def stampacchia_bound(alpha: float, A: float, h0: float) -> float:
    """Separated-ODE constant: k0 <= alpha/(alpha-1) * A^{1/alpha} * H(0)^{1-1/alpha}."""
    return alpha / (alpha - 1.0) * A ** (1.0 / alpha) * h0 ** (1.0 - 1.0 / alpha)


def minimal_hypothesis_constant(t: np.ndarray, level: np.ndarray,
                                alpha: float) -> float:
    """Smallest A with H(t) <= A * level(t)^alpha on the grid (where level > 0)."""
    H = _tail_integral(t, level)
    live = level > 0.0
    if not np.any(live):
        return 0.0
    return float(np.max(H[live] / level[live] ** alpha))


def _tail_integral(t: np.ndarray, level: np.ndarray) -> np.ndarray:
    # H(t_i) = int_{t_i}^{t_end} level ds, trapezoid, zero beyond the grid
    seg = 0.5 * (level[1:] + level[:-1]) * np.diff(t)
    H = np.zeros_like(t, dtype=float)
    H[:-1] = np.cumsum(seg[::-1])[::-1]
    return H


def stampacchia_k0(t: Sequence[float], level: Sequence[float],
                   alpha: float, A: float) -> StampacchiaResult:
    """March -H' = (H/A)^{1/alpha} on the level-data grid until H hits zero.

    level must be the non-increasing distribution function t -> |{|w| > t}|.
    Explicit steps with linear interpolation at the crossing; if H is still
    positive at the end of the grid the closed-form remaining time is added.
    """
    if alpha <= 1.0:
        raise ValueError("alpha must exceed 1")
    if A <= 0.0:
        raise ValueError("A must be positive")
    t = np.asarray(t, dtype=float)
    level = np.asarray(level, dtype=float)
    if t.ndim != 1 or t.shape != level.shape or len(t) < 2:
        raise ValueError("t and level must be matching 1-d grids")
    if np.any(np.diff(t) <= 0.0):
        raise ValueError("t grid must be strictly increasing")
    if np.any(level < -1e-12) or np.any(np.diff(level) > 1e-12 * max(1.0, level[0])):
        raise ValueError("level data must be nonnegative and non-increasing")
    h0 = float(_tail_integral(t, level)[0])
    H = h0
    k0 = float(t[-1])
    crossed = False
    for i in range(len(t) - 1):
        dt = float(t[i + 1] - t[i])
        rate = (H / A) ** (1.0 / alpha)
        if rate * dt >= H:
            k0 = float(t[i]) + (H / rate if rate > 0.0 else 0.0)
            crossed = True
            break
        H -= rate * dt
    if not crossed:
        if H > 0.0:
            k0 = float(t[-1]) + stampacchia_bound(alpha, A, H)
        else:
            k0 = float(t[-1])
    return StampacchiaResult(k0=k0, bound=stampacchia_bound(alpha, A, h0),
                             h0=h0, alpha=alpha, A=A)


def equality_profile(alpha: float, n: int = 2048) -> tuple:
    """Synthetic equality case of the truncation inequality.

    H(t) = (1-t)_+^{alpha/(alpha-1)} turns the differential inequality into
    an equality with A = ((alpha-1)/alpha)^alpha, and vanishes exactly at
    k0 = 1.  Returns (t grid, level data, A).
    """
    if alpha <= 1.0:
        raise ValueError("alpha must exceed 1")
    beta = alpha / (alpha - 1.0)
    t = np.linspace(0.0, 1.0, n)
    level = beta * (1.0 - t) ** (beta - 1.0)
    return t, level, beta ** (-alpha)


def truncation_energy_check(u0: RadialFunction, k: float,
                            f: Optional[RadialFunction],
                            F: Optional[RadialFunction],
                            params: HardyParams) -> float:
    """Ratio ||grad S_k(u0)||_{L2(E_k)} / (||f||_{L2(E_k)} + ||F||_{L2(E_k)}).

    E_k = {|u0| > k}.  Returns 0 when the truncation is inactive; inf when
    the data vanish on E_k but the truncated gradient does not.
    """
    TruncationLevel(k=k)
    w = lebesgue_weight(params)
    segs = super_level_intervals(u0, k)
    if not segs:
        return 0.0
    du = differentiate(u0)
    grad2 = abs_power(du, 2.0)
    left = right = 0.0
    for lo, hi in segs:
        left += integrate(grad2, w, lo=lo, hi=hi)
        if f is not None:
            right += integrate(abs_power(f, 2.0), w, lo=lo, hi=hi)
        if F is not None:
            right += integrate(abs_power(F, 2.0), w, lo=lo, hi=hi)
    left = math.sqrt(max(left, 0.0))
    right = math.sqrt(max(right, 0.0))
    if right == 0.0:
        return 0.0 if left == 0.0 else math.inf
    return left / right


# ---------------------------------------------------------------------------
# divergence detection


@dataclass(frozen=True)
class DivergenceVerdict:
    divergent: bool
    slope: float
    r_squared: float
    slope_tol: float
    r2_min: float


def truncated_w1p_scan(u: RadialFunction, p: float, w: PowerWeight,
                       deltas: Sequence[float]) -> np.ndarray:
    """W^{1,p} norms over the outer region r > delta, per delta."""
    return np.array([w1p_norm(u, p, w, lo=float(d)) for d in deltas])


def classify_divergence(deltas: Sequence[float], values: Sequence[float],
                        slope_tol: float = 0.05,
                        r2_min: float = 0.9) -> DivergenceVerdict:
    """Fit log(value) vs log(delta); divergent when the norm grows as delta
    shrinks with a clean power trend (|slope| above tolerance, R^2 above
    threshold)."""
    ld = np.log(np.asarray(deltas, dtype=float))
    lv = np.log(np.asarray(values, dtype=float))
    if len(ld) < 3:
        raise ValueError("need at least three truncation levels")
    slope, intercept = np.polyfit(ld, lv, 1)
    fit = slope * ld + intercept
    ss_res = float(np.sum((lv - fit) ** 2))
    ss_tot = float(np.sum((lv - np.mean(lv)) ** 2))
    r2 = 1.0 - ss_res / ss_tot if ss_tot > 0.0 else 1.0
    divergent = bool(slope < -slope_tol and r2 > r2_min)
    return DivergenceVerdict(divergent=divergent, slope=float(slope),
                             r_squared=r2, slope_tol=slope_tol, r2_min=r2_min)


def gradient_annulus_rate(u: RadialFunction, q: float, w: PowerWeight,
                          scales: Sequence[float]) -> float:
    """Fitted dyadic rate beta(q): int over the annulus (d/2, d) of |u'|^q dw
    scales like d^beta; beta > 0 means the truncated W^{1,q} seminorm
    converges, beta < 0 means divergence."""
    du = differentiate(u)
    gq = abs_power(du, q)
    scales = np.asarray(sorted(scales, reverse=True), dtype=float)
    incs = np.array([integrate(gq, w, lo=float(d) / 2.0, hi=float(d))
                     for d in scales])
    if np.any(incs <= 0.0):
        raise ValueError("annulus increments must be positive for a rate fit")
    return float(np.polyfit(np.log(scales), np.log(incs), 1)[0])


def estimate_critical_exponent(u: RadialFunction, q_grid: Sequence[float],
                               w: PowerWeight,
                               scales: Sequence[float]) -> float:
    """Root of the (affine in q) dyadic rate: the q where the truncated
    W^{1,q} seminorm switches from convergent to divergent."""
    q_grid = np.asarray(q_grid, dtype=float)
    betas = np.array([gradient_annulus_rate(u, float(q), w, scales)
                      for q in q_grid])
    if betas.min() > 0.0 or betas.max() < 0.0:
        raise ValueError("q grid must straddle the critical exponent")
    slope, intercept = np.polyfit(q_grid, betas, 1)
    return float(-intercept / slope)
