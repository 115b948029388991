"""Real roots of cubic polynomials, vectorized over coefficient arrays.

The multiplier of the intermediate stepsize regime is the largest real root of
a cubic whose two largest roots nearly coalesce at the right end of that
regime, so roots are enumerated with the trigonometric method (stable when
all three roots are real) and then polished with a few Newton steps.
"""

import numpy as np

# |cos argument| up to 1 + ARG_SLACK is treated as a (near-)repeated real root
ARG_SLACK = 1e-9


def polyval3(c3, c2, c1, c0, x):
    """Horner evaluation of ``c3 x^3 + c2 x^2 + c1 x + c0``."""
    return ((c3 * x + c2) * x + c1) * x + c0


def relative_residual(c3, c2, c1, c0, x):
    """``|p(x)|`` divided by the sum of the magnitudes of the monomials."""
    ax = np.abs(x)
    scale = ((np.abs(c3) * ax + np.abs(c2)) * ax + np.abs(c1)) * ax + np.abs(c0)
    num = np.abs(polyval3(c3, c2, c1, c0, x))
    with np.errstate(invalid="ignore", divide="ignore"):
        return np.where(scale > 0, num / np.where(scale > 0, scale, 1.0), num)


def _polish(c3, c2, c1, c0, x, steps=4):
    # Newton, keeping an update only when it does not increase |p|
    for _ in range(steps):
        p = polyval3(c3, c2, c1, c0, x)
        dp = (3.0 * c3 * x + 2.0 * c2) * x + c1
        with np.errstate(invalid="ignore", divide="ignore"):
            step = np.where(dp != 0, p / np.where(dp != 0, dp, 1.0), 0.0)
        x_new = x - step
        better = np.abs(polyval3(c3, c2, c1, c0, x_new)) <= np.abs(p)
        x = np.where(better & np.isfinite(x_new), x_new, x)
    return x


def real_roots(c3, c2, c1, c0):
    """All real roots of a cubic with nonzero leading coefficient.

    Parameters
    ----------
    c3, c2, c1, c0 : array_like
        Coefficients, highest degree first. Broadcast together.

    Returns
    -------
    roots : ndarray, shape (..., 3)
        Real roots sorted in decreasing order; slots for missing roots (when
        the cubic has a complex-conjugate pair) are NaN.
    """
    c3, c2, c1, c0 = np.broadcast_arrays(*(np.asarray(c, dtype=float) for c in (c3, c2, c1, c0)))
    if np.any(c3 == 0):
        raise ValueError("leading coefficient must be nonzero")
    a = c2 / c3
    b = c1 / c3
    c = c0 / c3
    # depressed cubic t^3 + p t + q with x = t - a/3
    shift = a / 3.0
    p = b - a * a / 3.0
    q = 2.0 * a**3 / 27.0 - a * b / 3.0 + c

    out = np.full(c3.shape + (3,), np.nan)

    neg = p < 0
    with np.errstate(invalid="ignore", divide="ignore"):
        m = np.sqrt(np.where(neg, -p / 3.0, 0.0))
        arg = np.where(neg, (3.0 * q / (2.0 * p)) * np.sqrt(np.where(neg, -3.0 / p, 0.0)), np.inf)
    three = neg & (np.abs(arg) <= 1.0 + ARG_SLACK)
    theta = np.arccos(np.clip(np.where(three, arg, 0.0), -1.0, 1.0)) / 3.0
    for k in range(3):
        tk = 2.0 * m * np.cos(theta - 2.0 * np.pi * k / 3.0)
        out[..., k] = np.where(three, tk - shift, np.nan)

    # exactly one real root: Cardano with real cube roots
    one = ~three
    disc = q * q / 4.0 + p**3 / 27.0
    sq = np.sqrt(np.where(one, np.maximum(disc, 0.0), 0.0))
    u = np.cbrt(-q / 2.0 + sq)
    v = np.cbrt(-q / 2.0 - sq)
    out[..., 0] = np.where(one, u + v - shift, out[..., 0])

    ex = [c3[..., None], c2[..., None], c1[..., None], c0[..., None]]
    polished = _polish(*ex, np.where(np.isnan(out), 0.0, out))
    out = np.where(np.isnan(out), np.nan, polished)
    # descending order, NaNs last
    key = np.where(np.isnan(out), -np.inf, out)
    order = np.argsort(-key, axis=-1)
    return np.take_along_axis(out, order, axis=-1)


def largest_real_root(c3, c2, c1, c0):
    """Largest real root of a cubic (vectorized)."""
    return real_roots(c3, c2, c1, c0)[..., 0]
