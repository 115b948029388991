"""Fixed-dimension search for worst-case one-step configurations.

Unknowns are the data ``{x_i, g_i, f_i}`` at ``i in {0, 1, *}`` plus the
inexact direction ``d0``, with ``L = 1``, ``x1 = x0 - h d0``, ``g* = 0``,
``f* = 0``. Every returned candidate satisfies the smooth convex
interpolation inequalities and the inexactness bound, so its objective is a
valid lower bound on the true worst case.

Canonical form: ``x0 = 0`` and ``g0 = (a, 0)`` with ``a > 0`` (rotations,
reflections and translations preserve the problem). Given ``(d0, g1)``, the
smallest admissible ``f0, f1`` are longest paths in a 3-node
difference-constraint graph, and ``x*`` only needs to lie in two half-planes,
so candidates are completed and repaired in closed form.
"""

import json
import math
import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy import optimize

from . import rates
from .certificate import PepPoint, interpolation_check
from .instances import rotate90

FEAS_TOL = 1e-9
CRITERIA = ("to_fstar", "to_f1")


class SearchError(RuntimeError):
    """No feasible candidate was found."""


@dataclass
class PepCandidate:
    h: float
    delta: float
    criterion: str
    dimension: int
    points: dict  # label -> PepPoint, labels "0", "1" and (to_fstar) "*"
    d0: np.ndarray
    value: float = math.nan
    slacks: dict = field(default_factory=dict)
    source: str = ""

    def validate(self, tol=FEAS_TOL):
        """Recheck every constraint from scratch; returns ``(ok, report)``."""
        p0, p1 = self.points["0"], self.points["1"]
        issues = []
        step_err = float(np.max(np.abs(p1.x - (p0.x - self.h * self.d0))))
        if step_err > tol:
            issues.append("step")
        g0n = float(np.linalg.norm(p0.g))
        inexact = self.delta * g0n - float(np.linalg.norm(self.d0 - p0.g))
        if inexact < -tol:
            issues.append("inexactness")
        if self.criterion == "to_fstar":
            ps = self.points["*"]
            if np.any(ps.g != 0) or ps.f != 0:
                issues.append("optimality")
            norm_err = abs(p0.f - ps.f - 1.0)
        else:
            norm_err = abs(p0.f - p1.f - 1.0)
        if norm_err > tol:
            issues.append("normalization")
        rep = interpolation_check(self.points, L=1.0, tol=tol)
        if not rep.feasible:
            issues.append(f"interpolation{rep.worst_pair}")
        value = float(np.dot(p1.g, p1.g))
        return not issues, {
            "issues": issues,
            "min_interpolation_slack": rep.min_slack,
            "inexactness_slack": inexact,
            "step_error": step_err,
            "normalization_error": norm_err,
            "value": value,
            "slacks": rep.slacks,
        }

    def to_dict(self):
        return {
            "h": self.h,
            "delta": self.delta,
            "criterion": self.criterion,
            "dimension": self.dimension,
            "objective": self.value,
            "source": self.source,
            "d0": [float(v) for v in self.d0],
            "points": {
                k: {"x": [float(v) for v in p.x], "g": [float(v) for v in p.g], "f": p.f}
                for k, p in self.points.items()
            },
            "slacks": {f"{i}->{j}": s for (i, j), s in self.slacks.items()},
            "inexactness_slack": self.delta * float(np.linalg.norm(self.points["0"].g))
            - float(np.linalg.norm(self.d0 - self.points["0"].g)),
            "orthogonality": orthogonality_diagnostic(self),
        }

    def to_json(self, **kw):
        return json.dumps(self.to_dict(), **kw)


# ---------------------------------------------------------------------------
# closed-form completion of (d0, g1) with g0 = (1, 0), x0 = 0


def _complete(h, d0, g1, criterion):
    """Vectorized minimal function values and objective for rows of (d0, g1).

    Returns ``(value, f0, f1, alpha0, alpha1, feasible)``; ``alpha_i`` bound
    ``<g_i, x*>`` from above (to_fstar only).
    """
    d0 = np.atleast_2d(d0)
    g1 = np.atleast_2d(g1)
    g0 = np.zeros_like(d0)
    g0[:, 0] = 1.0
    x1 = -h * d0
    diff = g0 - g1
    half = 0.5 * np.sum(diff * diff, axis=1)
    c01 = -np.sum(g1 * x1, axis=1) + half  # f0 - f1 >= c01
    c10 = np.sum(g0 * x1, axis=1) + half  # f1 - f0 >= c10
    g1sq = np.sum(g1 * g1, axis=1)
    # equality (e.g. exact steps on a quadratic) must survive rounding
    cocoercive = c01 + c10 <= 1e-13 * (1.0 + half + np.abs(c01))
    if criterion == "to_f1":
        with np.errstate(divide="ignore", invalid="ignore"):
            value = np.where(c01 > 0, g1sq / c01, -np.inf)
        feasible = cocoercive & (c01 > 0)
        nan = np.full_like(c01, np.nan)
        return np.where(feasible, value, -np.inf), c01, np.zeros_like(c01), nan, nan, feasible
    f0 = np.maximum(0.5, 0.5 * g1sq + c01)
    f1 = np.maximum(0.5 * g1sq, f0 + c10)
    alpha0 = -f0 - 0.5
    alpha1 = np.sum(g1 * x1, axis=1) - 0.5 * g1sq - f1
    # half-planes <g0,x> <= alpha0 and <g1,x> <= alpha1 only fail to meet
    # when g1 points against g0
    cross = np.abs(g1[:, 1])
    scale = np.sqrt(g1sq)
    anti = (cross <= 1e-12 * np.maximum(scale, 1e-300)) & (g1[:, 0] < 0)
    with np.errstate(divide="ignore", invalid="ignore"):
        lower = np.where(anti, alpha1 / np.where(anti, g1[:, 0], -1.0), -np.inf)
    star_ok = ~anti | (lower <= alpha0 + 1e-12 * (1.0 + np.abs(alpha0)))
    star_ok &= ~((g1sq == 0) & (alpha1 < 0))
    feasible = cocoercive & star_ok
    value = np.where(feasible, g1sq / f0, -np.inf)
    return value, f0, f1, alpha0, alpha1, feasible


def _min_norm_star(g0, g1, alpha0, alpha1):
    """Minimum-norm ``x`` with ``<g0,x> <= alpha0`` and ``<g1,x> <= alpha1``."""
    tol = 1e-12 * (1.0 + abs(alpha0) + abs(alpha1))
    cands = []
    if alpha0 >= 0 and alpha1 >= 0:
        return np.zeros(2)
    for g, a in ((g0, alpha0), (g1, alpha1)):
        gg = float(np.dot(g, g))
        if gg > 0:
            cands.append(a * g / gg)
    M = np.vstack([g0, g1])
    if abs(np.linalg.det(M)) > 1e-12 * max(1.0, float(np.dot(g1, g1))):
        cands.append(np.linalg.solve(M, [alpha0, alpha1]))
    feas = [x for x in cands if np.dot(g0, x) <= alpha0 + tol and np.dot(g1, x) <= alpha1 + tol]
    if not feas:
        return None
    return min(feas, key=lambda x: float(np.dot(x, x)))


def _build(h, delta, d0, g1, criterion, dimension, source):
    """Exact candidate from canonical ``(d0, g1)``, scaled to the normalization."""
    d0 = np.asarray(d0, dtype=float)
    g1 = np.asarray(g1, dtype=float)
    value, f0, f1, a0, a1, ok = (v[0] for v in _complete(h, d0, g1, criterion))
    if not ok or not np.isfinite(value):
        return None
    g0 = np.array([1.0, 0.0])
    x0 = np.zeros(2)
    x1 = -h * d0
    t = 1.0 / math.sqrt(f0)  # homogeneity: x, g scale by t and f by t^2
    if criterion == "to_f1":
        points = {
            "0": PepPoint(t * x0, t * g0, 1.0),
            "1": PepPoint(t * x1, t * g1, 0.0),
        }
    else:
        xs = _min_norm_star(g0, g1, a0, a1)
        if xs is None:
            return None
        points = {
            "0": PepPoint(t * x0, t * g0, 1.0),
            "1": PepPoint(t * x1, t * g1, t * t * f1),
            "*": PepPoint(t * xs, np.zeros(2), 0.0),
        }
    cand = PepCandidate(h, delta, criterion, dimension, points, t * d0, source=source)
    ok, rep = cand.validate()
    if not ok:
        return None
    cand.value = rep["value"]
    cand.slacks = rep["slacks"]
    return cand


def _repair(h, delta, a, d0, g1):
    """Canonical ``(d0, g1)`` from raw refinement output, made exactly feasible."""
    if not a > 0:
        return None
    g0 = np.array([1.0, 0.0])
    d0 = np.asarray(d0, float) / a
    g1 = np.asarray(g1, float) / a
    e = d0 - g0
    ne = float(np.linalg.norm(e))
    if ne > delta:
        e *= delta / ne
    d0 = g0 + e
    v = g1 - g0
    q = h * float(np.dot(v, d0)) + float(np.dot(v, v))
    if q > 0:
        lin = h * float(np.dot(v, d0))
        v = v * (-lin / float(np.dot(v, v))) if lin < 0 else np.zeros(2)
    return d0, g0 + v


# ---------------------------------------------------------------------------
# starts


def _random_starts(rng, n, h, delta, dimension):
    g0 = np.array([1.0, 0.0])
    if dimension == 1:
        u = rng.choice([-1.0, 1.0], size=n)[:, None] * g0
        w = rng.choice([-1.0, 1.0], size=n)[:, None] * g0
    else:
        th = rng.uniform(0, 2 * np.pi, size=n)
        u = np.column_stack([np.cos(th), np.sin(th)])
        th = rng.uniform(0, 2 * np.pi, size=n)
        w = np.column_stack([np.cos(th), np.sin(th)])
    # half of the starts saturate the inexactness ball
    r = np.where(rng.uniform(size=n) < 0.5, 1.0, rng.uniform(size=n))
    d0 = g0 + delta * r[:, None] * u
    # g1 - g0 inside the cocoercivity ball centered at -h d0 / 2
    nd = np.linalg.norm(d0, axis=1)
    rho = np.sqrt(rng.uniform(size=n))
    g1 = g0 - 0.5 * h * d0 + (0.5 * h * nd * rho)[:, None] * w
    return d0, g1


def analytic_seeds(h, delta, dimension):
    """Canonical ``(name, d0, g1)`` for the closed-form worst-case candidates.

    ``scaled_lower``: Huber-type, ``d0 = (1 - delta) g0`` and ``g1 = g0``.
    ``scaled_upper``: quadratic, ``d0 = (1 + delta) g0``, ``g1 = (1 - h(1+delta)) g0``.
    ``orthogonal`` (2D): quadratic with the tangent direction of the orthogonal oracle.
    """
    g0 = np.array([1.0, 0.0])
    seeds = [
        ("scaled_lower", (1 - delta) * g0, g0.copy()),
        ("scaled_upper", (1 + delta) * g0, (1 - h * (1 + delta)) * g0),
    ]
    if dimension == 2 and delta > 0:
        d0 = (1 - delta**2) * g0 + delta * math.sqrt(1 - delta**2) * rotate90(g0)
        seeds.append(("orthogonal", d0, g0 - h * d0))
    return seeds


def seed_candidate(h, delta, name, criterion="to_fstar", dimension=None):
    """Exact feasible candidate for one of :func:`analytic_seeds`."""
    dim = dimension or (2 if name == "orthogonal" else 1)
    for n, d0, g1 in analytic_seeds(h, delta, 2):
        if n == name:
            return _build(h, delta, d0, g1, criterion, dim, name)
    raise KeyError(name)


# ---------------------------------------------------------------------------
# local refinement in the full normalized formulation


def _refine(h, delta, d0, g1, criterion, dimension, maxiter=200):
    D = dimension
    base = _build(h, delta, d0, g1, criterion, 2, "start")
    if base is None:
        return None
    p0, p1 = base.points["0"], base.points["1"]
    parts = [[p0.g[0]], base.d0[:D], p1.g[:D]]
    if criterion == "to_fstar":
        parts += [[p1.f], base.points["*"].x[:D]]
    z0 = np.concatenate(parts)

    def pad(v):
        out = np.zeros(2)
        out[:D] = v
        return out

    def unpack(z):
        a = z[0]
        d = pad(z[1 : 1 + D])
        g = pad(z[1 + D : 1 + 2 * D])
        if criterion == "to_fstar":
            f1 = z[1 + 2 * D]
            xs = pad(z[2 + 2 * D : 2 + 3 * D])
        else:
            f1, xs = 0.0, None
        return a, d, g, f1, xs

    def cons(z):
        a, d, g, f1, xs = unpack(z)
        g0 = np.array([a, 0.0])
        x0 = np.zeros(2)
        x1 = x0 - h * d
        pts = [(x0, g0, 1.0), (x1, g, f1)]
        if criterion == "to_fstar":
            pts.append((xs, np.zeros(2), 0.0))
        out = [delta**2 * a * a - float(np.dot(d - g0, d - g0))]
        for i, (xi, gi, fi) in enumerate(pts):
            for j, (xj, gj, fj) in enumerate(pts):
                if i != j:
                    dg = gi - gj
                    out.append(fi - fj - float(np.dot(gj, xi - xj)) - 0.5 * float(np.dot(dg, dg)))
        return np.array(out)

    with warnings.catch_warnings():
        # SLSQP clips the lower bound on a; the repair step handles the rest
        warnings.simplefilter("ignore", RuntimeWarning)
        res = optimize.minimize(
            lambda z: -float(np.dot(z[1 + D : 1 + 2 * D], z[1 + D : 1 + 2 * D])),
            z0,
            jac=lambda z: np.concatenate([np.zeros(1 + D), -2 * z[1 + D : 1 + 2 * D], np.zeros(len(z) - 1 - 2 * D)]),
            method="SLSQP",
            constraints=[{"type": "ineq", "fun": cons}],
            bounds=[(1e-6, None)] + [(None, None)] * (len(z0) - 1),
            options={"maxiter": maxiter, "ftol": 1e-14},
        )
    a, d, g, _, _ = unpack(res.x)
    fixed = _repair(h, delta, a, d, g)
    if fixed is None:
        return None
    return _build(h, delta, fixed[0], fixed[1], criterion, dimension, "refined")


# ---------------------------------------------------------------------------


def search_one_step(h, delta, criterion="to_fstar", dimension=2, budget=10_000, seed=0, n_refine=16, extra_seeds=()):
    """Largest ``||g1||^2`` (normalized) found over feasible one-step configurations.

    ``budget`` random starts are scored exactly after closed-form completion;
    the ``n_refine`` best of them and the analytic seeds are refined locally,
    and each refined point is repaired to exact feasibility. In dimension 2
    the best univariate candidate (same seed and budget) is also a seed, so the
    bivariate value is never below the univariate one.

    Returns
    -------
    best : PepCandidate
    value : float
    """
    if criterion not in CRITERIA:
        raise ValueError(f"criterion must be one of {CRITERIA}")
    if dimension not in (1, 2):
        raise ValueError("dimension must be 1 or 2")
    rates.check_delta(delta)
    hm = rates.h_max(delta)
    if not 0 < h < hm:
        raise ValueError(f"h must lie in (0, {hm})")
    if budget < 1:
        raise ValueError("budget must be at least 1")

    rng = np.random.default_rng(seed)
    pool = []
    for name, d0, g1 in analytic_seeds(h, delta, dimension):
        c = _build(h, delta, d0, g1, criterion, dimension, name)
        if c is not None:
            pool.append(c)
    pool.extend(c for c in extra_seeds if c is not None)
    if dimension == 2:
        best1, _ = search_one_step(h, delta, criterion, 1, budget, seed, n_refine)
        pool.append(best1)

    d0s, g1s = _random_starts(rng, budget, h, delta, dimension)
    vals = _complete(h, d0s, g1s, criterion)[0]
    order = np.argsort(-vals, kind="stable")
    starts = [(d0s[i], g1s[i]) for i in order[:n_refine] if np.isfinite(vals[i])]
    for c in pool[:]:
        if c.criterion == criterion:
            t = 1.0 / c.points["0"].g[0]
            starts.append((t * c.d0, t * c.points["1"].g))
    for i in order[:n_refine]:
        if np.isfinite(vals[i]):
            c = _build(h, delta, d0s[i], g1s[i], criterion, dimension, "random")
            if c is not None:
                pool.append(c)
    for d0, g1 in starts:
        c = _refine(h, delta, d0, g1, criterion, dimension)
        if c is not None:
            pool.append(c)
    if not pool:
        raise SearchError(f"no feasible candidate for h={h}, delta={delta}, dimension={dimension}")
    best = max(pool, key=lambda c: c.value)
    best.dimension = dimension
    return best, best.value


def compare_1d_2d(h, delta, budget=10_000, seed=0, criterion="to_fstar"):
    """Best univariate and bivariate one-step worst cases at the same stepsize."""
    best1, v1 = search_one_step(h, delta, criterion, 1, budget, seed)
    best2, v2 = search_one_step(h, delta, criterion, 2, budget, seed, extra_seeds=[best1])
    return (best1, v1), (best2, v2)


def orthogonality_diagnostic(candidate):
    """Normalized inner products of the direction error ``e = d0 - g0``.

    ``cos_error_gradient = <e, g0> / (||e|| ||g0||)`` (``+-1`` for scaled
    directions) and ``cos_error_direction = <e, d0> / (||e|| ||d0||)`` (0 for the
    orthogonal oracle, whose error is tangent to the admissible ball). Values
    are ``None`` with ``undefined`` set when a norm vanishes.
    """
    g0 = candidate.points["0"].g
    d0 = candidate.d0
    e = d0 - g0
    ne, ng, nd = (float(np.linalg.norm(v)) for v in (e, g0, d0))
    if ne == 0 or ng == 0 or nd == 0:
        return {"cos_error_gradient": None, "cos_error_direction": None, "undefined": True}
    return {
        "cos_error_gradient": float(np.dot(e, g0)) / (ne * ng),
        "cos_error_direction": float(np.dot(e, d0)) / (ne * nd),
        "undefined": False,
    }
