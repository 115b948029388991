"""Worst-case rates of gradient descent with relatively inexact gradients.

All rates bound the normalized squared gradient norm ``(1/L) ||grad f(x)||^2``
by a multiple of an initial accuracy, for steps ``x+ = x - (h/L) d`` where the
direction ``d`` satisfies ``||d - grad f(x)|| <= delta ||grad f(x)||``.

Functions taking a stepsize accept scalars or arrays of stepsizes; scalar
input gives a Python float back. An infinite value (``math.inf``) means the
analysis gives no guarantee at that stepsize (no progress is certified).
"""

import enum
import math
from dataclasses import dataclass

import numpy as np
from scipy import optimize

from .cubic import largest_real_root, real_roots, relative_residual


class DivergenceRegionError(ValueError):
    """Stepsize outside ``[0, 2/(1+delta)]``, where no rate exists."""


class Regime(str, enum.Enum):
    LEFT = "left"
    INTERMEDIATE = "intermediate"
    RIGHT = "right"


@dataclass(frozen=True)
class RateQuery:
    """Parameter tuple consumed by the rate and certificate functions."""

    L: float = 1.0
    h: float = 1.0
    delta: float = 0.0
    N: int = 1

    def __post_init__(self):
        if not self.L > 0:
            raise ValueError(f"L must be positive, got {self.L}")
        check_delta(self.delta)
        check_n(self.N)
        check_stepsize(self.h, self.delta)


@dataclass(frozen=True)
class RegimeBoundaries:
    left_end: float  # h_LI = 3 / (2 (1 + delta))
    right_start: float  # h_IR
    h_max: float  # 2 / (1 + delta)

    def __iter__(self):
        return iter((self.left_end, self.right_start, self.h_max))


@dataclass(frozen=True)
class CubicCoeffs:
    c3: float
    c2: float
    c1: float
    c0: float

    def __iter__(self):
        return iter((self.c3, self.c2, self.c1, self.c0))


def check_delta(delta, allow_zero=True):
    if not (0.0 <= delta < 1.0) or (not allow_zero and delta == 0.0):
        lo = "[0, 1)" if allow_zero else "(0, 1)"
        raise ValueError(f"delta must lie in {lo}, got {delta}")


def check_n(N):
    if int(N) != N or N < 1:
        raise ValueError(f"N must be a positive integer, got {N}")


def h_max(delta):
    """Largest stepsize with a convergence guarantee, ``2/(1+delta)``."""
    check_delta(delta)
    return 2.0 / (1.0 + delta)


def check_stepsize(h, delta):
    h = np.asarray(h, dtype=float)
    hm = h_max(delta)
    if np.any(~np.isfinite(h)) or np.any(h < 0) or np.any(h > hm):
        raise DivergenceRegionError(
            f"stepsize must lie in [0, {hm!r}] for delta={delta}, got {h if h.ndim == 0 else 'array'}"
        )
    return h


def _right_start(delta):
    # (3d + 2 - sqrt(4 - 3d^2)) / (2 d (d + 1)), rationalized so that d -> 0 is stable
    return (3.0 + 3.0 * delta / (2.0 + math.sqrt(4.0 - 3.0 * delta * delta))) / (2.0 * (1.0 + delta))


def regime_boundaries(delta):
    """Endpoints ``(h_LI, h_IR, h_max)`` of the three stepsize regimes.

    At ``delta = 0`` the intermediate regime collapses to the point 3/2.
    """
    check_delta(delta)
    return RegimeBoundaries(1.5 / (1.0 + delta), _right_start(delta), 2.0 / (1.0 + delta))


def classify_regime(h, delta):
    """Regime of a stepsize; the intermediate interval is closed on both ends."""
    check_stepsize(h, delta)
    lo, hi, _ = regime_boundaries(delta)
    if h < lo:
        return Regime.LEFT
    if h <= hi:
        return Regime.INTERMEDIATE
    return Regime.RIGHT


def _regime_masks(h, delta):
    lo, hi, _ = regime_boundaries(delta)
    left = h < lo
    right = h > hi
    return left, ~left & ~right, right


def cubic_coeffs(h, delta):
    """Coefficients of the cubic defining the intermediate-regime multiplier."""
    a = (delta - 1.0) * (delta + 1.0) * h * h
    return CubicCoeffs(a + 2.0 * h, 2.0 * a + 5.0 * h - 4.0, a + 4.0 * (h - 1.0), h - 1.0)


def _at_right_start(h, delta):
    hi = _right_start(delta)
    return np.abs(h - hi) <= 8 * np.finfo(float).eps * hi


def _deflated_top_roots(q0, q1, lead, r3):
    # q(t) = q0 + q1 t + ... + lead t^3 = (t - r3)(lead t^2 + b t + c): the two
    # roots other than r3, from the low-order coefficients only
    with np.errstate(invalid="ignore", divide="ignore"):
        c = -q0 / r3
        b = (c - q1) / r3
        disc = b * b - 4.0 * lead * c
        ok = disc >= -1e-14 * (b * b + np.abs(4.0 * lead * c))
        s = -0.5 * (b + np.copysign(np.sqrt(np.maximum(disc, 0.0)), b))
        r1 = s / lead
        r2 = np.where(s != 0, c / s, r1)
    return np.maximum(r1, r2), np.minimum(r1, r2), ok & np.isfinite(r1) & np.isfinite(r2)


def _lambda_tilde_unchecked(h, delta):
    # NaN where the leading coefficient h (2 - (1 - delta^2) h) vanishes
    # (h = 0, or h = h_max with delta below rounding)
    h = np.asarray(h, dtype=float)
    ok = (h > 0) & (2.0 - (1.0 - delta) * (1.0 + delta) * h > 0)
    hs = np.where(ok, h, 1.0)
    a = (delta - 1.0) * (delta + 1.0) * hs * hs
    c3, c2, c1, c0 = a + 2.0 * hs, 2.0 * a + 5.0 * hs - 4.0, a + 4.0 * (hs - 1.0), hs - 1.0
    roots = real_roots(c3, c2, c1, c0)
    lam = roots[..., 0]
    three = np.sum(~np.isnan(roots), axis=-1) == 3
    lam3 = np.nanmin(roots, axis=-1)

    # The two largest roots merge at 1 as delta -> 0 and at 0 as delta -> 1,
    # where the rounded coefficients only pin them down to ~sqrt(eps). Around
    # either point the low-order coefficients are known accurately (around 1,
    # p(1) and p'(1) factor exactly), so deflate the well-separated smallest
    # root and solve the remaining quadratic.
    top0, _, ok0 = _deflated_top_roots(c0, c1, c3, lam3)
    p0 = (2.0 * hs * (1.0 + delta) - 3.0) * (3.0 - 2.0 * hs * (1.0 - delta))
    p1 = 8.0 * delta * delta * hs * hs - 4.0 * (2.0 * hs - 3.0) * (hs - 1.0)
    # q(t) = p(1 - t) = p0 - p1 t + ... - c3 t^3; the largest lam is the smallest t
    _, t_small, ok1 = _deflated_top_roots(p0, -p1, -c3, 1.0 - lam3)
    near_one = lam > 0.5
    lam = np.where(three & near_one & ok1, 1.0 - t_small, lam)
    lam = np.where(three & ~near_one & ok0, top0, lam)
    # At h_IR the largest root is (2 - u)/(u - 1), the right-regime
    # multiplier. For delta near 1 the top two roots merge just past h_IR, so
    # a rounded h_IR may land where the exact pair is complex; use the closed
    # form there.
    u = hs * (1.0 + delta)
    with np.errstate(invalid="ignore", divide="ignore"):
        lam = np.where(_at_right_start(hs, delta), (2.0 - u) / (u - 1.0), lam)
    return np.where(ok, lam, np.nan)


def lambda_tilde(h, delta):
    """Largest real root of the intermediate-regime cubic.

    Defined on the intermediate regime ``[h_LI, h_IR]`` (with ``delta = 0`` the
    regime is the single point 3/2, where the root is 1).
    """
    check_delta(delta)
    h_arr = check_stepsize(h, delta)
    lo, hi, _ = regime_boundaries(delta)
    # boundary values computed in floating point may sit one ulp outside
    slack = 4 * np.finfo(float).eps * hi
    if np.any(h_arr < lo - slack) or np.any(h_arr > hi + slack):
        raise ValueError(f"h outside the intermediate regime [{lo}, {hi}] for delta={delta}")
    lam = _lambda_tilde_unchecked(h_arr, delta)
    c = cubic_coeffs(h_arr, delta)
    resid = np.where(_at_right_start(h_arr, delta), 0.0, relative_residual(*c, lam))
    if np.any(~np.isfinite(lam)) or np.any(lam <= 0) or np.any(resid > 1e-12):
        raise ArithmeticError(f"cubic root failed for h={h}, delta={delta}")
    return float(lam) if lam.ndim == 0 else lam


def lambda_tilde_diagnostics(h, delta):
    """All real roots of the cubic at one stepsize, with residuals.

    Returns a dict with ``roots`` (descending), ``largest``, ``multiplicity``
    (number of real roots within 1e-6 of the largest) and ``residual``.
    """
    c = cubic_coeffs(float(h), delta)
    roots = real_roots(*c)
    roots = roots[~np.isnan(roots)]
    largest = float(roots[0])
    return {
        "roots": [float(r) for r in roots],
        "largest": largest,
        "multiplicity": int(np.sum(np.abs(roots - largest) <= 1e-6 * max(1.0, abs(largest)))),
        "residual": float(relative_residual(*c, largest)),
    }


def _scalar_or_array(x, like):
    x = np.asarray(x, dtype=float)
    return float(x) if np.ndim(like) == 0 else x


def _safe_div(num, den):
    num, den = np.broadcast_arrays(np.asarray(num, float), np.asarray(den, float))
    with np.errstate(divide="ignore", invalid="ignore"):
        out = np.where(den > 0, num / np.where(den > 0, den, 1.0), math.inf)
    return out


# Per-branch formulas. Each is evaluated on any stepsize where it is finite so
# that continuity across regime boundaries can be inspected directly.

def branch_values(h, delta, N=1, criterion="fstar"):
    """Left/intermediate/right formulas evaluated at the same stepsize(s).

    ``criterion`` is ``"f1"`` (bound relative to ``f(x0) - f(x1)``, one step
    only) or ``"fstar"`` (relative to ``f(x0) - f*``, any ``N``). The
    intermediate formula needs the cubic's largest root, which is computed
    even outside the intermediate regime.
    """
    h = np.asarray(h, dtype=float)
    u = h * (1.0 + delta)
    lam = _lambda_tilde_unchecked(h, delta) if delta > 0 else np.ones_like(h)
    inter_den1 = h * lam * lam + 2.0 * (h - 1.0) * lam + h - 1.0
    with np.errstate(divide="ignore", invalid="ignore"):
        inv_sq = np.where(u != 1.0, 1.0 / (1.0 - u) ** 2, math.inf)
    if criterion == "f1":
        if N != 1:
            raise ValueError("the f(x0) - f(x1) criterion is a one-step bound")
        left = _safe_div(1.0, h * (1.0 - delta))
        inter = _safe_div(2.0 * lam, inter_den1)
        right = _safe_div(2.0, inv_sq - 1.0)
    elif criterion == "fstar":
        left = _safe_div(1.0, N * h * (1.0 - delta) + 0.5)
        inter = _safe_div(2.0 * lam, N * inter_den1 + lam)
        right = _safe_div(2.0, N * inv_sq - (N - 1))
    else:
        raise ValueError(f"unknown criterion {criterion!r}")
    return left, inter, right


def _piecewise(h, delta, N, criterion):
    h_arr = check_stepsize(h, delta)
    left, inter, right = branch_values(h_arr, delta, N, criterion)
    mL, mI, mR = _regime_masks(h_arr, delta)
    out = np.where(mL, left, np.where(mI, inter, right))
    return _scalar_or_array(out, h)


def rate_exact_one_step(h):
    """Tight one-step rate with exact gradients: ``max(1/(h+1/2), 2(1-h)^2)``."""
    return rate_exact_N(h, 1)


def rate_exact_N(h, N):
    """Tight ``N``-step rate with exact gradients, ``max(1/(Nh+1/2), 2(1-h)^(2N))``."""
    check_n(N)
    h_arr = check_stepsize(h, 0.0)
    out = np.maximum(1.0 / (N * h_arr + 0.5), 2.0 * (1.0 - h_arr) ** (2 * N))
    return _scalar_or_array(out, h)


def rate_exact_one_step_to_f1(h):
    """Exact-gradient bound relative to ``f(x0) - f(x1)``: ``max(1/h, 2/((1-h)^-2 - 1))``."""
    h_arr = check_stepsize(h, 0.0)
    u = h_arr
    with np.errstate(divide="ignore", invalid="ignore"):
        inv_sq = np.where(u != 1.0, 1.0 / (1.0 - u) ** 2, math.inf)
    out = np.maximum(_safe_div(1.0, h_arr), _safe_div(2.0, inv_sq - 1.0))
    return _scalar_or_array(out, h)


def rate_one_step_to_f1(h, delta):
    """One-step bound ``C(h, delta)`` relative to ``f(x0) - f(x1)``.

    Infinite at ``h = 0`` and ``h = h_max``, where no decrease is certified.
    """
    check_delta(delta)
    if delta == 0:
        return rate_exact_one_step_to_f1(h)
    return _piecewise(h, delta, 1, "f1")


def rate_one_step_to_fstar(h, delta):
    """Tight one-step rate ``C~(h, delta)`` relative to ``f(x0) - f*``."""
    check_delta(delta)
    if delta == 0:
        return rate_exact_one_step(h)
    return _piecewise(h, delta, 1, "fstar")


def rate_N_steps(h, delta, N):
    """Upper bound ``C~_N(h, delta)`` on ``(1/L) min_k ||g_k||^2 / (f0 - f*)``.

    With ``delta = 0`` this is the tight exact-gradient rate.
    """
    check_delta(delta)
    check_n(N)
    if delta == 0:
        return rate_exact_N(h, N)
    return _piecewise(h, delta, N, "fstar")


def lower_bound_N(h, delta, N):
    """Rate attained after ``N`` steps by the Huber or the quadratic instance.

    ``max(1/(N h (1-delta) + 1/2), 2 (1 - h(1+delta))^(2N))``.
    """
    check_delta(delta)
    check_n(N)
    h_arr = check_stepsize(h, delta)
    out = np.maximum(
        1.0 / (N * h_arr * (1.0 - delta) + 0.5),
        2.0 * (1.0 - h_arr * (1.0 + delta)) ** (2 * N),
    )
    return _scalar_or_array(out, h)


def h_max_vasin(delta):
    """Earlier sufficient stepsize bound ``2((1-delta)/(1+delta))^(3/2)``."""
    check_delta(delta)
    return 2.0 * ((1.0 - delta) / (1.0 + delta)) ** 1.5


def compare_h_max(delta):
    """``(ours, prior, ours / prior)`` for the largest admissible stepsize."""
    ours = h_max(delta)
    prior = h_max_vasin(delta)
    return ours, prior, ours / prior


def approx_optimal_stepsize(delta):
    """Right end of the intermediate regime, a near-optimal stepsize for any N."""
    return regime_boundaries(delta).right_start


def optimal_stepsize(delta, N, resolution=1e-4, xtol=1e-10):
    """Stepsize minimizing ``rate_N_steps(., delta, N)`` over ``[0, h_max]``.

    A uniform scan at ``resolution`` (regime endpoints included) locates the
    best grid point; a bounded scalar minimization then refines it inside the
    neighbouring grid cells.

    Returns
    -------
    h_opt, rate : float
    """
    check_delta(delta, allow_zero=False)
    check_n(N)
    lo, hi, hm = regime_boundaries(delta)
    n = int(math.ceil(hm / resolution))
    grid = np.union1d(np.linspace(0.0, hm, n + 1), [lo, hi])
    vals = rate_N_steps(grid, delta, N)
    i = int(np.argmin(vals))
    a = grid[max(i - 1, 0)]
    b = grid[min(i + 1, len(grid) - 1)]
    res = optimize.minimize_scalar(
        lambda t: rate_N_steps(float(t), delta, N),
        bounds=(a, b),
        method="bounded",
        options={"xatol": xtol},
    )
    if res.fun <= vals[i]:
        return float(res.x), float(res.fun)
    return float(grid[i]), float(vals[i])
